#pragma once

// Dense Hermitian / normal eigendecomposition and singular values.
//
// Hermitian matrices are reduced to real symmetric tridiagonal form by complex
// Householder reflections followed by a diagonal phase change, then
// diagonalized by the implicit QL iteration with Wilkinson-type shifts
// (EISPACK tql2). Normal matrices are diagonalized through their Hermitian
// and skew-Hermitian parts.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "repfam/error.hpp"
#include "repfam/matrix.hpp"

namespace repfam {

/// Default absolute tolerance for matrices of norm <= 1e3.
inline constexpr double kDefaultTol = 1e-10;

/// Iteration cap per eigenvalue in the QL sweep.
inline constexpr int kMaxQlIterations = 60;

struct HermitianEigen {
    std::vector<double> values;  // ascending
    ComplexMatrix vectors;       // columns are eigenvectors
};

struct NormalEigen {
    std::vector<Complex> values;
    ComplexMatrix vectors;
};

namespace detail {

// Implicit QL on a real symmetric tridiagonal matrix. `d` holds the diagonal,
// `e[i]` the entry (i+1, i) with e[n-1] = 0. On exit `d` holds eigenvalues and
// the columns of `v` (row-major n×n, initially identity) the eigenvectors;
// an empty `v` skips the vector updates.
inline void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, std::vector<double>& v) {
    const std::size_t n = d.size();
    if (n == 0) return;
    const double eps = std::numeric_limits<double>::epsilon();
    double f = 0.0;
    double tst1 = 0.0;
    e[n - 1] = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        std::size_t m = l;
        while (m < n) {
            if (std::abs(e[m]) <= eps * tst1) break;
            ++m;
        }
        if (m > l) {
            int iter = 0;
            do {
                if (++iter > kMaxQlIterations)
                    throw NoConvergence("tridiagonal QL: no convergence after " + std::to_string(kMaxQlIterations) +
                                        " iterations");
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
                f += h;

                p = d[m];
                double c = 1.0, c2 = c, c3 = c;
                const double el1 = e[l + 1];
                double s = 0.0, s2 = 0.0;
                for (std::size_t ii = m; ii-- > l;) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[ii];
                    h = c * p;
                    r = std::hypot(p, e[ii]);
                    e[ii + 1] = s * r;
                    s = e[ii] / r;
                    c = p / r;
                    p = c * d[ii] - s * g;
                    d[ii + 1] = h + s * (c * g + s * d[ii]);
                    for (std::size_t k = 0; k < n && !v.empty(); ++k) {
                        h = v[k * n + ii + 1];
                        v[k * n + ii + 1] = s * v[k * n + ii] + c * h;
                        v[k * n + ii] = c * v[k * n + ii] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

}  // namespace detail

/// Eigendecomposition of a Hermitian matrix; the input is symmetrized first.
/// With `want_vectors` false only `values` is filled.
inline HermitianEigen eigh(const ComplexMatrix& input, bool want_vectors = true) {
    const std::size_t n = input.dim();
    ComplexMatrix a(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (input(i, j) + std::conj(input(j, i)));
    ComplexMatrix q = ComplexMatrix::identity(n);

    std::vector<Complex> v(n), p(n), w(n), qv(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double tail = 0.0;
        for (std::size_t i = k + 2; i < n; ++i) tail += std::norm(a(i, k));
        if (tail == 0.0) continue;
        const Complex x0 = a(k + 1, k);
        const double sigma = std::sqrt(tail + std::norm(x0));
        const Complex phase = std::abs(x0) > 0 ? x0 / std::abs(x0) : Complex{1.0};
        const Complex alpha = -phase * sigma;

        std::fill(v.begin(), v.end(), Complex{});
        v[k + 1] = x0 - alpha;
        for (std::size_t i = k + 2; i < n; ++i) v[i] = a(i, k);
        double vnorm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) vnorm += std::norm(v[i]);
        vnorm = std::sqrt(vnorm);
        for (std::size_t i = k + 1; i < n; ++i) v[i] /= vnorm;

        // A <- H A H with H = I - 2 v vᴴ, as A - 2 (v wᴴ + w vᴴ). Rows and
        // columns before k are already reduced and stay untouched.
        for (std::size_t i = k; i < n; ++i) {
            Complex s{};
            for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j];
            p[i] = s;
        }
        double c = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) c += (std::conj(v[i]) * p[i]).real();
        for (std::size_t i = k; i < n; ++i) w[i] = p[i] - c * v[i];
        for (std::size_t i = k; i < n; ++i)
            for (std::size_t j = k; j < n; ++j) a(i, j) -= 2.0 * (v[i] * std::conj(w[j]) + w[i] * std::conj(v[j]));

        if (!want_vectors) continue;
        // Q <- Q H
        for (std::size_t i = 0; i < n; ++i) {
            Complex s{};
            for (std::size_t j = k + 1; j < n; ++j) s += q(i, j) * v[j];
            qv[i] = s;
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) q(i, j) -= 2.0 * qv[i] * std::conj(v[j]);
    }

    std::vector<double> d(n), e(n, 0.0);
    std::vector<Complex> delta(n, Complex{1.0});
    for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i).real();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const Complex ei = a(i + 1, i);
        const double mag = std::abs(ei);
        e[i] = mag;
        delta[i + 1] = mag > 0 ? delta[i] * ei / mag : delta[i];
    }

    std::vector<double> z;
    if (want_vectors) {
        z.assign(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) z[i * n + i] = 1.0;
    }
    detail::tridiagonal_ql(d, e, z);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });

    HermitianEigen out;
    out.values.resize(n);
    for (std::size_t col = 0; col < n; ++col) out.values[col] = d[order[col]];
    if (!want_vectors) return out;
    out.vectors = ComplexMatrix(n);
    for (std::size_t col = 0; col < n; ++col) {
        const std::size_t src = order[col];
        for (std::size_t r = 0; r < n; ++r) {
            Complex s{};
            for (std::size_t i = 0; i < n; ++i) s += q(r, i) * delta[i] * z[i * n + src];
            out.vectors(r, col) = s;
        }
    }
    return out;
}

/// Singular values in descending order, from the Hermitian dilation
/// [[0, A], [Aᴴ, 0]] whose eigenvalues are ±σᵢ. Absolute accuracy is
/// O(eps·‖A‖), including for the smallest singular value.
inline std::vector<double> singular_values(const ComplexMatrix& a) {
    const std::size_t n = a.dim();
    ComplexMatrix dil(2 * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            dil(i, n + j) = a(i, j);
            dil(n + j, i) = std::conj(a(i, j));
        }
    auto eig = eigh(dil, false);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = std::abs(eig.values[2 * n - 1 - i]);
    std::sort(s.begin(), s.end(), std::greater<>());
    return s;
}

/// Largest singular value, as sqrt(λmax(AᴴA)) (relative accuracy O(eps)).
inline double op_norm(const ComplexMatrix& a) {
    if (a.empty()) return 0.0;
    if (a.dim() == 1) return std::abs(a(0, 0));
    auto eig = eigh(a.adjoint() * a, false);
    return std::sqrt(std::max(0.0, eig.values.back()));
}

inline double min_singular_value(const ComplexMatrix& a) {
    if (a.empty()) return 0.0;
    if (a.dim() == 1) return std::abs(a(0, 0));
    return singular_values(a).back();
}

/// ‖AᴴA − AAᴴ‖ / ‖A‖², or 0 for A = 0.
inline double normality_defect(const ComplexMatrix& a) {
    const double na = op_norm(a);
    if (na == 0.0) return 0.0;
    const ComplexMatrix ah = a.adjoint();
    return op_norm(ah * a - a * ah) / (na * na);
}

/// Diagonalizes a normal matrix A = U·diag(values)·Uᴴ.
///
/// The Hermitian part is diagonalized first; within each cluster of
/// (numerically) equal eigenvalues the compression of the skew part is
/// diagonalized, and each eigenvalue is refined as the Rayleigh quotient uᴴAu.
inline NormalEigen normal_eigen(const ComplexMatrix& a, double tol = kDefaultTol) {
    const std::size_t n = a.dim();
    if (normality_defect(a) > tol) throw NotNormal("matrix is not normal within tolerance");
    NormalEigen out;
    if (n == 0) return out;

    if (hermitian_defect(a) <= tol) {
        auto eig = eigh(a);
        out.values.assign(eig.values.begin(), eig.values.end());
        out.vectors = std::move(eig.vectors);
        return out;
    }

    const Complex i_unit{0.0, 1.0};
    const ComplexMatrix ah = a.adjoint();
    const ComplexMatrix re_part = 0.5 * (a + ah);
    const ComplexMatrix im_part = (a - ah) * (1.0 / (2.0 * i_unit));
    auto first = eigh(re_part);
    const double scale = std::max(1.0, a.max_abs());
    const double cluster_tol = 1e-8 * scale;

    ComplexMatrix u = first.vectors;
    std::size_t begin = 0;
    while (begin < n) {
        std::size_t end = begin + 1;
        while (end < n && first.values[end] - first.values[end - 1] <= cluster_tol) ++end;
        const std::size_t k = end - begin;
        if (k > 1) {
            ComplexMatrix comp(k);
            for (std::size_t r = 0; r < k; ++r)
                for (std::size_t c = 0; c < k; ++c) {
                    Complex s{};
                    for (std::size_t i = 0; i < n; ++i)
                        for (std::size_t j = 0; j < n; ++j)
                            s += std::conj(first.vectors(i, begin + r)) * im_part(i, j) * first.vectors(j, begin + c);
                    comp(r, c) = s;
                }
            auto inner = eigh(comp);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t c = 0; c < k; ++c) {
                    Complex s{};
                    for (std::size_t r = 0; r < k; ++r) s += first.vectors(i, begin + r) * inner.vectors(r, c);
                    u(i, begin + c) = s;
                }
        }
        begin = end;
    }

    out.values.resize(n);
    for (std::size_t c = 0; c < n; ++c) {
        Complex rq{};
        for (std::size_t i = 0; i < n; ++i) {
            Complex row{};
            for (std::size_t j = 0; j < n; ++j) row += a(i, j) * u(j, c);
            rq += std::conj(u(i, c)) * row;
        }
        out.values[c] = rq;
    }
    out.vectors = std::move(u);
    return out;
}

}  // namespace repfam
