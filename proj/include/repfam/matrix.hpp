#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "repfam/error.hpp"

namespace repfam {

using Complex = std::complex<double>;

/// Dense square complex matrix, row-major. Entries are always finite.
class ComplexMatrix {
  public:
    ComplexMatrix() = default;

    explicit ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

    ComplexMatrix(std::size_t dim, std::vector<Complex> entries) : dim_(dim), data_(std::move(entries)) {
        if (data_.size() != dim_ * dim_) {
            throw InvalidArgument("ComplexMatrix: expected " + std::to_string(dim_ * dim_) + " entries, got " +
                                  std::to_string(data_.size()));
        }
        check_finite();
    }

    ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) : dim_(rows.size()) {
        data_.reserve(dim_ * dim_);
        for (const auto& row : rows) {
            if (row.size() != dim_) throw InvalidArgument("ComplexMatrix: matrix must be square");
            data_.insert(data_.end(), row.begin(), row.end());
        }
        check_finite();
    }

    static ComplexMatrix identity(std::size_t dim) {
        ComplexMatrix m(dim);
        for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    static ComplexMatrix diagonal(std::span<const Complex> d) {
        ComplexMatrix m(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    static ComplexMatrix diagonal(std::initializer_list<Complex> d) {
        return diagonal(std::span<const Complex>(d.begin(), d.size()));
    }

    std::size_t dim() const noexcept { return dim_; }
    bool empty() const noexcept { return dim_ == 0; }

    Complex& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }

    std::span<const Complex> data() const noexcept { return data_; }

    ComplexMatrix adjoint() const {
        ComplexMatrix r(dim_);
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j) r(j, i) = std::conj((*this)(i, j));
        return r;
    }

    ComplexMatrix& operator+=(const ComplexMatrix& o) {
        require_same_dim(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    ComplexMatrix& operator-=(const ComplexMatrix& o) {
        require_same_dim(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    ComplexMatrix& operator*=(Complex s) {
        for (auto& x : data_) x *= s;
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
    friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
    friend ComplexMatrix operator-(ComplexMatrix a) { return a *= -1.0; }

    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
        a.require_same_dim(b);
        const std::size_t n = a.dim_;
        ComplexMatrix r(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) {
                const Complex aik = a(i, k);
                if (aik == Complex{}) continue;
                for (std::size_t j = 0; j < n; ++j) r(i, j) += aik * b(k, j);
            }
        return r;
    }

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

    /// Adds `s` to the diagonal.
    ComplexMatrix shifted(Complex s) const {
        ComplexMatrix r = *this;
        for (std::size_t i = 0; i < dim_; ++i) r(i, i) += s;
        return r;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const auto& x : data_) s += std::norm(x);
        return std::sqrt(s);
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& x : data_) m = std::max(m, std::abs(x));
        return m;
    }

    /// Principal submatrix on the index range [begin, end).
    ComplexMatrix block(std::size_t begin, std::size_t end) const {
        ComplexMatrix r(end - begin);
        for (std::size_t i = begin; i < end; ++i)
            for (std::size_t j = begin; j < end; ++j) r(i - begin, j - begin) = (*this)(i, j);
        return r;
    }

  private:
    void check_finite() const {
        for (const auto& x : data_)
            if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
                throw InvalidArgument("ComplexMatrix: non-finite entry");
    }
    void require_same_dim(const ComplexMatrix& o) const {
        if (o.dim_ != dim_) throw InvalidArgument("ComplexMatrix: dimension mismatch");
    }

    std::size_t dim_ = 0;
    std::vector<Complex> data_;
};

/// max |A - Aᴴ| entrywise, relative to max(1, max|A|).
inline double hermitian_defect(const ComplexMatrix& a) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = i; j < a.dim(); ++j) d = std::max(d, std::abs(a(i, j) - std::conj(a(j, i))));
    return d / std::max(1.0, a.max_abs());
}

inline bool is_hermitian(const ComplexMatrix& a, double tol = 1e-10) { return hermitian_defect(a) <= tol; }

}  // namespace repfam
