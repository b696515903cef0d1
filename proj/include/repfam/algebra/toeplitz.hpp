#pragma once

// Toeplitz algebra model: T(σ) + C on l²(N) with σ a trigonometric
// polynomial and C finitely supported. The shift S: εₖ ↦ εₖ₊₁ has symbol
// e^{iθ}; the finite section of size N is the top-left N×N corner.

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "repfam/error.hpp"
#include "repfam/linalg.hpp"
#include "repfam/matrix.hpp"

namespace repfam {

/// Toeplitz model with the character circle sampled at `theta_samples`
/// equally spaced angles 2πj/n.
struct ToeplitzModel {
    std::size_t theta_samples = 64;

    double theta(std::size_t j) const { return 2.0 * std::numbers::pi * double(j) / double(theta_samples); }
    double theta_step() const { return 2.0 * std::numbers::pi / double(theta_samples); }
};

class ToeplitzElement {
  public:
    static inline const std::vector<std::size_t> kDefaultSections{8, 16, 32, 64, 128};

    /// `coeffs[k + K]` is the Fourier coefficient cₖ, k ∈ [−K, K];
    /// `correction` acts on the first correction.dim() basis vectors.
    ToeplitzElement(std::vector<Complex> coeffs, ComplexMatrix correction = {},
                    std::vector<std::size_t> sections = kDefaultSections)
        : coeffs_(std::move(coeffs)), correction_(std::move(correction)), sections_(std::move(sections)) {
        if (coeffs_.size() % 2 == 0) throw InvalidArgument("Toeplitz symbol needs 2K+1 coefficients");
        std::sort(sections_.begin(), sections_.end());
        sections_.erase(std::unique(sections_.begin(), sections_.end()), sections_.end());
        if (!sections_.empty() && sections_.front() == 0) throw InvalidArgument("section sizes must be positive");
        trim();
    }

    static ToeplitzElement from_symbol(const std::map<int, Complex>& coeffs, ComplexMatrix correction = {},
                                       std::vector<std::size_t> sections = kDefaultSections) {
        int k_max = 0;
        for (const auto& [k, c] : coeffs) k_max = std::max(k_max, std::abs(k));
        std::vector<Complex> v(std::size_t(2 * k_max + 1));
        for (const auto& [k, c] : coeffs) v[std::size_t(k + k_max)] += c;
        return ToeplitzElement(std::move(v), std::move(correction), std::move(sections));
    }

    static ToeplitzElement shift() { return from_symbol({{1, 1.0}}); }
    static ToeplitzElement scalar(Complex c) { return from_symbol({{0, c}}); }
    static ToeplitzElement compact(ComplexMatrix correction) { return ToeplitzElement({0.0}, std::move(correction)); }

    int degree() const noexcept { return int(coeffs_.size() / 2); }
    Complex coeff(int k) const {
        const int K = degree();
        return std::abs(k) > K ? Complex{} : coeffs_[std::size_t(k + K)];
    }
    const std::vector<Complex>& coeffs() const noexcept { return coeffs_; }
    const ComplexMatrix& correction() const noexcept { return correction_; }
    std::size_t correction_support() const noexcept { return correction_.dim(); }
    const std::vector<std::size_t>& section_sizes() const noexcept { return sections_; }

    ToeplitzElement with_sections(std::vector<std::size_t> sections) const {
        return ToeplitzElement(coeffs_, correction_, std::move(sections));
    }

    Complex symbol(double theta) const {
        Complex s{};
        const int K = degree();
        for (int k = -K; k <= K; ++k) s += coeff(k) * std::polar(1.0, double(k) * theta);
        return s;
    }

    /// Σ |k|·|cₖ|, a Lipschitz constant of θ ↦ σ(θ).
    double symbol_lipschitz() const {
        double l = 0.0;
        const int K = degree();
        for (int k = -K; k <= K; ++k) l += std::abs(double(k)) * std::abs(coeff(k));
        return l;
    }

    /// Top-left N×N corner of the operator.
    ComplexMatrix section(std::size_t n) const {
        if (n < correction_.dim())
            throw TruncationTooSmall("section size " + std::to_string(n) + " is smaller than the correction support " +
                                     std::to_string(correction_.dim()));
        ComplexMatrix m(n);
        const int K = degree();
        for (std::size_t i = 0; i < n; ++i)
            for (int k = -K; k <= K; ++k) {
                const long j = long(i) - k;
                if (j >= 0 && j < long(n)) m(i, std::size_t(j)) += coeff(k);
            }
        for (std::size_t i = 0; i < correction_.dim(); ++i)
            for (std::size_t j = 0; j < correction_.dim(); ++j) m(i, j) += correction_(i, j);
        return m;
    }

    ToeplitzElement adjoint() const {
        std::vector<Complex> c(coeffs_.size());
        const int K = degree();
        for (int k = -K; k <= K; ++k) c[std::size_t(k + K)] = std::conj(coeff(-k));
        return ToeplitzElement(std::move(c), correction_.adjoint(), sections_);
    }

    friend ToeplitzElement operator+(const ToeplitzElement& a, const ToeplitzElement& b) {
        const int K = std::max(a.degree(), b.degree());
        std::vector<Complex> c(std::size_t(2 * K + 1));
        for (int k = -K; k <= K; ++k) c[std::size_t(k + K)] = a.coeff(k) + b.coeff(k);
        const std::size_t n0 = std::max(a.correction_support(), b.correction_support());
        ComplexMatrix corr = embed(a.correction_, n0) + embed(b.correction_, n0);
        return ToeplitzElement(std::move(c), std::move(corr), merged_sections(a, b));
    }

    friend ToeplitzElement operator*(Complex s, const ToeplitzElement& a) {
        std::vector<Complex> c = a.coeffs_;
        for (auto& x : c) x *= s;
        return ToeplitzElement(std::move(c), a.correction_ * s, a.sections_);
    }

    friend ToeplitzElement operator-(const ToeplitzElement& a, const ToeplitzElement& b) { return a + Complex(-1.0) * b; }

    /// Exact product. T(a)T(b) − T(ab) is finite rank; the correction of the
    /// product is supported in a corner of size
    /// max(Ka, Kb, N0b + Ka, N0a + Kb), which is read off a large enough
    /// finite section.
    friend ToeplitzElement operator*(const ToeplitzElement& a, const ToeplitzElement& b) {
        const int Ka = a.degree(), Kb = b.degree();
        const int K = Ka + Kb;
        std::vector<Complex> c(std::size_t(2 * K + 1));
        for (int i = -Ka; i <= Ka; ++i)
            for (int j = -Kb; j <= Kb; ++j) c[std::size_t(i + j + K)] += a.coeff(i) * b.coeff(j);

        const std::size_t support =
            std::max({std::size_t(Ka), std::size_t(Kb), b.correction_support() + std::size_t(Ka),
                      a.correction_support() + std::size_t(Kb)});
        const std::size_t big = 2 * support + std::size_t(K) + std::max(a.correction_support(), b.correction_support()) + 1;
        const ComplexMatrix prod = a.section(big) * b.section(big);
        ToeplitzElement symbol_part(c);
        const ComplexMatrix toep = symbol_part.section(big);
        ComplexMatrix corr(support);
        for (std::size_t i = 0; i < support; ++i)
            for (std::size_t j = 0; j < support; ++j) corr(i, j) = prod(i, j) - toep(i, j);
        return ToeplitzElement(std::move(c), std::move(corr), merged_sections(a, b));
    }

  private:
    static ComplexMatrix embed(const ComplexMatrix& m, std::size_t n) {
        ComplexMatrix r(n);
        for (std::size_t i = 0; i < m.dim(); ++i)
            for (std::size_t j = 0; j < m.dim(); ++j) r(i, j) = m(i, j);
        return r;
    }

    static std::vector<std::size_t> merged_sections(const ToeplitzElement& a, const ToeplitzElement& b) {
        std::vector<std::size_t> s = a.sections_;
        s.insert(s.end(), b.sections_.begin(), b.sections_.end());
        return s;
    }

    // Drops exactly-zero outer coefficients and correction rows/columns.
    void trim() {
        while (coeffs_.size() > 1 && coeffs_.front() == Complex{} && coeffs_.back() == Complex{}) {
            coeffs_.erase(coeffs_.begin());
            coeffs_.pop_back();
        }
        std::size_t n = correction_.dim();
        while (n > 0) {
            bool zero = true;
            for (std::size_t k = 0; k < n && zero; ++k)
                zero = correction_(n - 1, k) == Complex{} && correction_(k, n - 1) == Complex{};
            if (!zero) break;
            --n;
        }
        if (n != correction_.dim()) correction_ = correction_.block(0, n);
    }

    std::vector<Complex> coeffs_;
    ComplexMatrix correction_;
    std::vector<std::size_t> sections_;
};

struct ToeplitzNorm {
    double value = 0.0;           // largest finite-section norm
    double last_increment = 0.0;  // norm(N_last) − norm(N_prev)
    std::vector<std::pair<std::size_t, double>> by_section;
};

/// Finite-section norms over the element's section sizes. They increase to
/// the operator norm; the last increment indicates convergence.
inline ToeplitzNorm toeplitz_norm(const ToeplitzElement& x) {
    if (x.section_sizes().empty()) throw InvalidArgument("toeplitz_norm: no section sizes");
    ToeplitzNorm r;
    for (std::size_t n : x.section_sizes()) {
        if (n < x.correction_support()) continue;
        r.by_section.emplace_back(n, op_norm(x.section(n)));
    }
    if (r.by_section.empty())
        throw TruncationTooSmall("every section size is smaller than the correction support");
    for (const auto& [n, v] : r.by_section) r.value = std::max(r.value, v);
    if (r.by_section.size() > 1)
        r.last_increment = r.by_section.back().second - r.by_section[r.by_section.size() - 2].second;
    return r;
}

}  // namespace repfam
