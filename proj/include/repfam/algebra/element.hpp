#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "repfam/algebra/model.hpp"
#include "repfam/linalg.hpp"
#include "repfam/matrix.hpp"

namespace repfam {

/// Element of an AlgebraModel: matrices at the grid points, interpolated
/// linearly in between (periodically on the circle).
///
/// The Lipschitz bound is that of the interpolant, so the sup over the whole
/// base space differs from the grid maximum by at most
/// lipschitz_bound()·grid_step()/2.
class AlgebraElement {
  public:
    static constexpr double kConstraintTol = 1e-12;

    AlgebraElement(ModelPtr model, std::vector<ComplexMatrix> values) : model_(std::move(model)), values_(std::move(values)) {
        if (!model_) throw InvalidArgument("AlgebraElement: null model");
        if (values_.size() != model_->base.size())
            throw InvalidArgument("AlgebraElement: expected one matrix per grid point");
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (values_[i].dim() != model_->fiber_dim())
                throw InvalidArgument("AlgebraElement: matrix size differs from fiber dimension");
            const double t = model_->base.grid()[i];
            if (const auto* c = model_->blocks.constraint_at(t)) {
                if (BlockStructure::off_block_mass(*c, values_[i]) > kConstraintTol)
                    throw InvalidArgument("AlgebraElement: block constraint violated at t = " + std::to_string(t));
                values_[i] = BlockStructure::project(*c, std::move(values_[i]));
            }
        }
        compute_lipschitz();
    }

    /// Samples `f(t)` at every grid point.
    template <typename F>
    static AlgebraElement from_function(ModelPtr model, F&& f) {
        std::vector<ComplexMatrix> vals;
        vals.reserve(model->base.size());
        for (double t : model->base.grid()) vals.push_back(f(t));
        return AlgebraElement(std::move(model), std::move(vals));
    }

    static AlgebraElement scalar(ModelPtr model, Complex c) {
        const std::size_t d = model->fiber_dim();
        return from_function(model, [&](double) { return ComplexMatrix::identity(d) * c; });
    }

    static AlgebraElement identity(ModelPtr model) { return scalar(std::move(model), 1.0); }

    const ModelPtr& model() const noexcept { return model_; }
    const std::vector<ComplexMatrix>& values() const noexcept { return values_; }
    const ComplexMatrix& value(std::size_t grid_index) const { return values_.at(grid_index); }
    double lipschitz_bound() const noexcept { return lipschitz_; }
    std::size_t fiber_dim() const noexcept { return model_->fiber_dim(); }

    /// Value at an arbitrary point of the base space.
    ComplexMatrix at(double t) const {
        const auto& base = model_->base;
        if (!base.contains(t) && !(base.kind() == BaseKind::Circle && std::abs(t - 1.0) <= BaseSpace::kMatchTol))
            throw IncompatibleModel("point " + std::to_string(t) + " is outside the base space");
        if (auto idx = base.index_of(t)) return values_[*idx];
        if (base.kind() == BaseKind::Discrete) throw IncompatibleModel("no such point in discrete base space");
        const auto& g = base.grid();
        auto it = std::upper_bound(g.begin(), g.end(), t);
        const std::size_t hi = std::size_t(it - g.begin());
        const std::size_t lo = hi - 1;
        const double t_hi = hi < g.size() ? g[hi] : 1.0;
        const ComplexMatrix& v_hi = hi < g.size() ? values_[hi] : values_[0];
        const double w = (t - g[lo]) / (t_hi - g[lo]);
        return values_[lo] * (1.0 - w) + v_hi * w;
    }

    AlgebraElement adjoint() const {
        std::vector<ComplexMatrix> v;
        v.reserve(values_.size());
        for (const auto& m : values_) v.push_back(m.adjoint());
        return AlgebraElement(model_, std::move(v));
    }

    friend AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) {
        return zip(a, b, [](const ComplexMatrix& x, const ComplexMatrix& y) { return x + y; });
    }
    friend AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) {
        return zip(a, b, [](const ComplexMatrix& x, const ComplexMatrix& y) { return x - y; });
    }
    /// Pointwise product at the grid points.
    friend AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
        return zip(a, b, [](const ComplexMatrix& x, const ComplexMatrix& y) { return x * y; });
    }
    friend AlgebraElement operator*(Complex s, const AlgebraElement& a) {
        std::vector<ComplexMatrix> v;
        v.reserve(a.values_.size());
        for (const auto& m : a.values_) v.push_back(m * s);
        return AlgebraElement(a.model_, std::move(v));
    }

    AlgebraElement shifted(Complex s) const { return *this + scalar(model_, s); }

    bool is_normal(double tol = kDefaultTol) const {
        return std::all_of(values_.begin(), values_.end(),
                           [&](const ComplexMatrix& m) { return normality_defect(m) <= tol; });
    }

    bool is_self_adjoint(double tol = kDefaultTol) const {
        return std::all_of(values_.begin(), values_.end(), [&](const ComplexMatrix& m) { return is_hermitian(m, tol); });
    }

  private:
    template <typename Op>
    static AlgebraElement zip(const AlgebraElement& a, const AlgebraElement& b, Op op) {
        if (a.model_ != b.model_) throw IncompatibleModel("elements belong to different models");
        std::vector<ComplexMatrix> v;
        v.reserve(a.values_.size());
        for (std::size_t i = 0; i < a.values_.size(); ++i) v.push_back(op(a.values_[i], b.values_[i]));
        return AlgebraElement(a.model_, std::move(v));
    }

    void compute_lipschitz() {
        lipschitz_ = 0.0;
        const auto& base = model_->base;
        if (!base.continuous()) return;
        const auto& g = base.grid();
        for (std::size_t i = 1; i < g.size(); ++i)
            lipschitz_ = std::max(lipschitz_, op_norm(values_[i] - values_[i - 1]) / (g[i] - g[i - 1]));
        if (base.kind() == BaseKind::Circle && g.size() > 1)
            lipschitz_ = std::max(lipschitz_, op_norm(values_.front() - values_.back()) / (1.0 - g.back() + g.front()));
    }

    ModelPtr model_;
    std::vector<ComplexMatrix> values_;
    double lipschitz_ = 0.0;
};

/// Norm of an element with its certified error bar.
struct CertifiedNorm {
    double value = 0.0;  // max over the grid
    double error = 0.0;  // lipschitz_bound · grid_step / 2
    double argmax = 0.0;
};

inline CertifiedNorm elem_norm(const AlgebraElement& a) {
    CertifiedNorm r;
    const auto& g = a.model()->base.grid();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double n = op_norm(a.value(i));
        if (n > r.value) {
            r.value = n;
            r.argmax = g[i];
        }
    }
    r.error = a.lipschitz_bound() * a.model()->base.grid_step() / 2.0;
    return r;
}

}  // namespace repfam
