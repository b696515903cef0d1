#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "repfam/error.hpp"
#include "repfam/matrix.hpp"

namespace repfam {

namespace detail {
inline bool lex_less(const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}
}  // namespace detail

/// A finite cloud of complex points identified up to `resolution`.
///
/// Points are kept sorted by (real, imag); a point within `resolution` of an
/// earlier kept point is dropped. `truncated` marks a sample of a possibly
/// larger set taken over a finite window.
class SpectrumSet {
  public:
    SpectrumSet() = default;

    SpectrumSet(std::vector<Complex> points, double resolution, bool truncated = false)
        : points_(std::move(points)), resolution_(resolution), truncated_(truncated) {
        if (!(resolution >= 0.0)) throw InvalidArgument("SpectrumSet: resolution must be nonnegative");
        canonicalize();
    }

    static SpectrumSet from_real(std::span<const double> values, double resolution, bool truncated = false) {
        std::vector<Complex> pts(values.begin(), values.end());
        return SpectrumSet(std::move(pts), resolution, truncated);
    }

    const std::vector<Complex>& points() const& noexcept { return points_; }
    std::vector<Complex> points() && noexcept { return std::move(points_); }
    double resolution() const noexcept { return resolution_; }
    bool truncated() const noexcept { return truncated_; }
    bool empty() const noexcept { return points_.empty(); }
    std::size_t size() const noexcept { return points_.size(); }

    void set_truncated(bool t) noexcept { truncated_ = t; }

    /// Distance from z to the nearest stored point (+inf for the empty set).
    double distance_to(Complex z) const {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : points_) best = std::min(best, std::abs(p - z));
        return best;
    }

    bool contains(Complex z) const { return distance_to(z) <= resolution_; }

    /// Union; the coarser resolution wins and truncation propagates.
    SpectrumSet united(const SpectrumSet& other) const {
        std::vector<Complex> pts = points_;
        pts.insert(pts.end(), other.points_.begin(), other.points_.end());
        return SpectrumSet(std::move(pts), std::max(resolution_, other.resolution_), truncated_ || other.truncated_);
    }

    double min_real() const {
        if (points_.empty()) throw EmptySet("min_real of empty spectrum");
        return points_.front().real();
    }
    double max_real() const {
        if (points_.empty()) throw EmptySet("max_real of empty spectrum");
        return points_.back().real();
    }

    friend bool operator==(const SpectrumSet&, const SpectrumSet&) = default;

  private:
    void canonicalize() {
        std::sort(points_.begin(), points_.end(), detail::lex_less);
        std::vector<Complex> kept;
        kept.reserve(points_.size());
        for (const auto& p : points_) {
            bool merged = false;
            // kept is sorted by real part, so only its tail can be close
            for (std::size_t i = kept.size(); i-- > 0;) {
                if (kept[i].real() < p.real() - resolution_) break;
                if (std::abs(kept[i] - p) <= resolution_) {
                    merged = true;
                    break;
                }
            }
            if (!merged) kept.push_back(p);
        }
        points_ = std::move(kept);
    }

    std::vector<Complex> points_;
    double resolution_ = 0.0;
    bool truncated_ = false;
};

namespace detail {

// sup_{a ∈ from} dist(a, to); `to` sorted by real part.
inline double directed_hausdorff(const std::vector<Complex>& from, const std::vector<Complex>& to) {
    double worst = 0.0;
    for (const auto& a : from) {
        auto it = std::lower_bound(to.begin(), to.end(), a.real(),
                                   [](const Complex& z, double re) { return z.real() < re; });
        double best = std::numeric_limits<double>::infinity();
        for (auto r = it; r != to.end(); ++r) {
            if (r->real() - a.real() >= best) break;
            best = std::min(best, std::abs(*r - a));
        }
        for (auto l = it; l != to.begin();) {
            --l;
            if (a.real() - l->real() >= best) break;
            best = std::min(best, std::abs(*l - a));
        }
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace detail

/// Symmetric Hausdorff distance between two nonempty point clouds.
inline double hausdorff(const SpectrumSet& s1, const SpectrumSet& s2) {
    if (s1.empty() || s2.empty()) throw EmptySet("hausdorff: empty spectrum set");
    return std::max(detail::directed_hausdorff(s1.points(), s2.points()),
                    detail::directed_hausdorff(s2.points(), s1.points()));
}

}  // namespace repfam
