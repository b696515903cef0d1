#pragma once

#include <algorithm>
#include <complex>
#include <concepts>
#include <string>
#include <type_traits>
#include <vector>

#include "repfam/error.hpp"
#include "repfam/linalg.hpp"
#include "repfam/matrix.hpp"
#include "repfam/spectrum_set.hpp"

namespace repfam {

/// Spectrum of a normal matrix. Multiplicities collapse; the resolution of
/// the returned set is `tol`.
inline SpectrumSet eig_normal(const ComplexMatrix& a, double tol = kDefaultTol) {
    auto eig = normal_eigen(a, tol);
    return SpectrumSet(std::move(eig.values), tol);
}

/// Piecewise-linear function of a real variable with explicit breakpoints.
/// Evaluation outside [front, back] of the breakpoints is a DomainError.
class SampledFunction {
  public:
    SampledFunction(std::vector<double> breakpoints, std::vector<Complex> values)
        : x_(std::move(breakpoints)), y_(std::move(values)) {
        if (x_.empty() || x_.size() != y_.size())
            throw InvalidArgument("SampledFunction: need matching, nonempty breakpoints and values");
        for (std::size_t i = 1; i < x_.size(); ++i)
            if (!(x_[i] > x_[i - 1])) throw InvalidArgument("SampledFunction: breakpoints must increase strictly");
    }

    /// Samples `f` at the given breakpoints.
    template <typename F>
    static SampledFunction sample(std::vector<double> breakpoints, F&& f) {
        std::vector<Complex> vals;
        vals.reserve(breakpoints.size());
        for (double x : breakpoints) vals.emplace_back(f(x));
        return SampledFunction(std::move(breakpoints), std::move(vals));
    }

    /// Uniform breakpoints lo, lo+h, ..., hi.
    template <typename F>
    static SampledFunction uniform(double lo, double hi, std::size_t intervals, F&& f) {
        std::vector<double> xs(intervals + 1);
        for (std::size_t i = 0; i <= intervals; ++i) xs[i] = lo + (hi - lo) * double(i) / double(intervals);
        xs.back() = hi;
        return sample(std::move(xs), std::forward<F>(f));
    }

    double lower() const noexcept { return x_.front(); }
    double upper() const noexcept { return x_.back(); }

    Complex operator()(double t) const {
        if (t < x_.front() || t > x_.back())
            throw DomainError("sampled function evaluated at " + std::to_string(t) + " outside [" +
                              std::to_string(x_.front()) + ", " + std::to_string(x_.back()) + "]");
        auto it = std::upper_bound(x_.begin(), x_.end(), t);
        if (it == x_.end()) return y_.back();
        const std::size_t hi = std::size_t(it - x_.begin());
        const std::size_t lo = hi - 1;
        const double w = (t - x_[lo]) / (x_[hi] - x_[lo]);
        return (1.0 - w) * y_[lo] + w * y_[hi];
    }

  private:
    std::vector<double> x_;
    std::vector<Complex> y_;
};

/// U·f(D)·Uᴴ for A = U·D·Uᴴ.
///
/// A function of a real argument requires A self-adjoint; a function of a
/// complex argument accepts any normal A.
template <typename F>
ComplexMatrix func_calc(const ComplexMatrix& a, F&& f, double tol = kDefaultTol) {
    const std::size_t n = a.dim();
    std::vector<Complex> fd(n);
    ComplexMatrix u;
    if constexpr (std::is_invocable_v<F&, Complex>) {
        auto eig = normal_eigen(a, tol);
        for (std::size_t i = 0; i < n; ++i) fd[i] = Complex(f(eig.values[i]));
        u = std::move(eig.vectors);
    } else {
        static_assert(std::is_invocable_v<F&, double>, "func_calc: f must accept double or std::complex<double>");
        if (!is_hermitian(a, tol)) {
            if (normality_defect(a) > tol) throw NotNormal("func_calc: matrix is not normal");
            throw NotSelfAdjoint("func_calc: real-argument function needs a self-adjoint matrix");
        }
        auto eig = eigh(a);
        for (std::size_t i = 0; i < n; ++i) fd[i] = Complex(f(eig.values[i]));
        u = std::move(eig.vectors);
    }
    ComplexMatrix r(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Complex s{};
            for (std::size_t k = 0; k < n; ++k) s += u(i, k) * fd[k] * std::conj(u(j, k));
            r(i, j) = s;
        }
    return r;
}

}  // namespace repfam
