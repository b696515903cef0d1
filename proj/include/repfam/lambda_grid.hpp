#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "repfam/error.hpp"

namespace repfam {

/// Uniform grid on the box [−Λ, Λ]ⁿ with nodes k·step on every axis, so
/// λ = 0 is always a node. Nodes are listed in lexicographic order.
class LambdaGrid {
  public:
    LambdaGrid(std::size_t n, double window, double step) : n_(n), window_(window), step_(step) {
        if (n == 0) throw InvalidArgument("lambda grid dimension must be positive");
        if (!(step > 0.0) || !(window > 0.0) || step > window)
            throw InvalidArgument("lambda grid needs 0 < step <= window");
        const long m = long(std::floor(window / step + 1e-9));
        for (long k = -m; k <= m; ++k) axis_.push_back(double(k) * step);
        std::size_t total = 1;
        for (std::size_t d = 0; d < n_; ++d) total *= axis_.size();
        nodes_.reserve(total);
        std::vector<std::size_t> idx(n_, 0);
        for (std::size_t c = 0; c < total; ++c) {
            std::vector<double> node(n_);
            for (std::size_t d = 0; d < n_; ++d) node[d] = axis_[idx[d]];
            nodes_.push_back(std::move(node));
            for (std::size_t d = n_; d-- > 0;) {
                if (++idx[d] < axis_.size()) break;
                idx[d] = 0;
            }
        }
    }

    std::size_t dim() const noexcept { return n_; }
    double window() const noexcept { return window_; }
    double step() const noexcept { return step_; }
    const std::vector<double>& axis() const noexcept { return axis_; }
    const std::vector<std::vector<double>>& nodes() const noexcept { return nodes_; }
    std::size_t size() const noexcept { return nodes_.size(); }

    static double norm2(const std::vector<double>& lambda) {
        double s = 0.0;
        for (double x : lambda) s += x * x;
        return s;
    }

    static std::string format(const std::vector<double>& lambda) {
        std::string s = "(";
        for (std::size_t i = 0; i < lambda.size(); ++i) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", lambda[i]);
            s += (i ? ", " : "") + std::string(buf);
        }
        return s + ")";
    }

  private:
    std::size_t n_;
    double window_;
    double step_;
    std::vector<double> axis_;
    std::vector<std::vector<double>> nodes_;
};

}  // namespace repfam
