#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "qfalab/errors.hpp"

namespace qfalab {

using cplx = std::complex<double>;

namespace detail {

template <class T>
struct is_complex : std::false_type {};
template <class U>
struct is_complex<std::complex<U>> : std::true_type {};

template <class T>
inline T conj_if_complex(T x) {
    if constexpr (is_complex<T>::value)
        return std::conj(x);
    else
        return x;
}

}  // namespace detail

/// Dense row-major matrix over double or std::complex<double>. Dimensions in
/// this project stay small (automata live in at most a few dozen dimensions),
/// so everything is plain O(n^3) arithmetic with value semantics.
template <class T>
class DenseMatrix {
  public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols, T{}) {}

    DenseMatrix(std::initializer_list<std::initializer_list<T>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        a_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_) throw InvalidParameterError("ragged matrix initializer");
            a_.insert(a_.end(), row.begin(), row.end());
        }
    }

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    const std::vector<T>& data() const { return a_; }
    std::vector<T>& data() { return a_; }

    DenseMatrix adjoint() const {
        DenseMatrix m(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) m(j, i) = detail::conj_if_complex(a_[i * cols_ + j]);
        return m;
    }

    friend DenseMatrix operator*(const DenseMatrix& x, const DenseMatrix& y) {
        if (x.cols_ != y.rows_) throw InvalidParameterError("matrix product shape mismatch");
        DenseMatrix z(x.rows_, y.cols_);
        for (std::size_t i = 0; i < x.rows_; ++i)
            for (std::size_t k = 0; k < x.cols_; ++k) {
                const T xik = x(i, k);
                for (std::size_t j = 0; j < y.cols_; ++j) z(i, j) += xik * y(k, j);
            }
        return z;
    }

    friend std::vector<T> operator*(const DenseMatrix& m, const std::vector<T>& v) {
        if (m.cols_ != v.size()) throw InvalidParameterError("matrix-vector shape mismatch");
        std::vector<T> w(m.rows_, T{});
        for (std::size_t i = 0; i < m.rows_; ++i) {
            T acc{};
            for (std::size_t j = 0; j < m.cols_; ++j) acc += m(i, j) * v[j];
            w[i] = acc;
        }
        return w;
    }

    /// Matrix power by repeated squaring (n >= 0, square matrices only).
    DenseMatrix pow(unsigned long long n) const {
        if (rows_ != cols_) throw InvalidParameterError("pow requires a square matrix");
        DenseMatrix result = identity(rows_);
        DenseMatrix base = *this;
        while (n > 0) {
            if (n & 1ull) result = result * base;
            base = base * base;
            n >>= 1;
        }
        return result;
    }

    double max_abs() const {
        double m = 0.0;
        for (const T& x : a_) m = std::max(m, std::abs(x));
        return m;
    }

    friend double max_abs_diff(const DenseMatrix& x, const DenseMatrix& y) {
        if (x.rows_ != y.rows_ || x.cols_ != y.cols_)
            throw InvalidParameterError("matrix difference shape mismatch");
        double m = 0.0;
        for (std::size_t i = 0; i < x.a_.size(); ++i) m = std::max(m, std::abs(x.a_[i] - y.a_[i]));
        return m;
    }

    /// max |U^dag U - I|, the unitarity defect.
    double unitarity_defect() const {
        if (rows_ != cols_) return 1.0;
        return max_abs_diff(adjoint() * (*this), identity(rows_));
    }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<T> a_;
};

using CMatrix = DenseMatrix<cplx>;
using RMatrix = DenseMatrix<double>;
using CVector = std::vector<cplx>;
using RVector = std::vector<double>;

template <class T>
inline T vdot(const std::vector<T>& x, const std::vector<T>& y) {
    if (x.size() != y.size()) throw InvalidParameterError("dot-product size mismatch");
    T acc{};
    for (std::size_t i = 0; i < x.size(); ++i) acc += detail::conj_if_complex(x[i]) * y[i];
    return acc;
}

template <class T>
inline double norm2(const std::vector<T>& x) {
    double acc = 0.0;
    for (const T& v : x) acc += std::norm(cplx(v));
    return std::sqrt(acc);
}

template <class T>
inline double max_abs_diff(const std::vector<T>& x, const std::vector<T>& y) {
    if (x.size() != y.size()) throw InvalidParameterError("vector difference size mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
    return m;
}

/// Unit basis vector e_i.
inline CVector basis_vector(std::size_t dim, std::size_t i) {
    CVector v(dim, cplx{});
    v[i] = cplx{1.0, 0.0};
    return v;
}

/// Completes a set of orthonormal leading columns to a full unitary by
/// Gram-Schmidt over the standard basis in index order. The completion is
/// deterministic, which keeps serialized machines reproducible.
inline CMatrix complete_unitary(const std::vector<CVector>& leading, std::size_t dim) {
    std::vector<CVector> cols = leading;
    for (std::size_t e = 0; e < dim && cols.size() < dim; ++e) {
        CVector v = basis_vector(dim, e);
        for (const CVector& c : cols) {
            const cplx proj = vdot(c, v);
            for (std::size_t i = 0; i < dim; ++i) v[i] -= proj * c[i];
        }
        const double n = norm2(v);
        if (n > 0.5 / std::sqrt(double(dim))) {
            for (cplx& x : v) x /= n;
            cols.push_back(std::move(v));
        }
    }
    if (cols.size() != dim) throw InvalidParameterError("unitary completion failed");
    CMatrix u(dim, dim);
    for (std::size_t j = 0; j < dim; ++j)
        for (std::size_t i = 0; i < dim; ++i) u(i, j) = cols[j][i];
    return u;
}

inline bool is_prime(long long n) {
    if (n < 2) return false;
    for (long long f = 2; f * f <= n; ++f)
        if (n % f == 0) return false;
    return true;
}

}  // namespace qfalab
