#pragma once

#include "opers/poly.hpp"
#include "opers/scalar.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace opers {

// Small dense row-major matrix over the scalar type.
template <class S>
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, S(0)) {}
    DenseMatrix(std::initializer_list<std::initializer_list<S>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        for (const auto& r : rows) {
            if (r.size() != cols_) throw invalid_input("ragged matrix literal");
            a_.insert(a_.end(), r.begin(), r.end());
        }
    }

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = S(1);
        return m;
    }
    static DenseMatrix diagonal(const std::vector<S>& d) {
        DenseMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }
    // u v^T
    static DenseMatrix outer(const std::vector<S>& u, const std::vector<S>& v) {
        DenseMatrix m(u.size(), v.size());
        for (std::size_t i = 0; i < u.size(); ++i)
            for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * v[j];
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }
    S& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const S& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    std::vector<S> diag() const {
        std::vector<S> d;
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) d.push_back((*this)(i, i));
        return d;
    }
    S trace() const {
        S t(0);
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }
    double frobenius() const {
        double s = 0;
        for (const auto& x : a_) s += std::norm(to_complex(x));
        return std::sqrt(s);
    }
    double max_abs() const {
        double m = 0;
        for (const auto& x : a_) m = std::max(m, magnitude(x));
        return m;
    }

    DenseMatrix& operator+=(const DenseMatrix& o) {
        check_same(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    DenseMatrix& operator-=(const DenseMatrix& o) {
        check_same(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }
    DenseMatrix& operator*=(const S& s) {
        for (auto& x : a_) x *= s;
        return *this;
    }
    friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
    friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
    friend DenseMatrix operator*(DenseMatrix a, const S& s) { return a *= s; }
    friend DenseMatrix operator*(const S& s, DenseMatrix a) { return a *= s; }
    friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
        if (a.cols_ != b.rows_) throw invalid_input("matrix product dimension mismatch");
        DenseMatrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const S& aik = a(i, k);
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }
    friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
    }

    DenseMatrix transpose() const {
        DenseMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

private:
    void check_same(const DenseMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw invalid_input("matrix dimension mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<S> a_;
};

template <class S>
DenseMatrix<S> commutator(const DenseMatrix<S>& a, const DenseMatrix<S>& b) {
    return a * b - b * a;
}

// Determinant: Bareiss fraction-free elimination in exact mode, partial-pivot
// LU in floating mode.
template <class S>
S determinant(DenseMatrix<S> m) {
    if (!m.square()) throw invalid_input("determinant of a non-square matrix");
    const std::size_t n = m.rows();
    if (n == 0) return S(1);
    S sign(1);
    if constexpr (is_exact_v<S>) {
        S prev(1);
        for (std::size_t k = 0; k + 1 < n; ++k) {
            if (is_zero(m(k, k))) {
                std::size_t p = k + 1;
                while (p < n && is_zero(m(p, k))) ++p;
                if (p == n) return S(0);
                for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
                sign = -sign;
            }
            for (std::size_t i = k + 1; i < n; ++i)
                for (std::size_t j = k + 1; j < n; ++j) m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
            prev = m(k, k);
        }
        return sign * m(n - 1, n - 1);
    } else {
        S det(1);
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t p = k;
            for (std::size_t i = k + 1; i < n; ++i)
                if (std::abs(m(i, k)) > std::abs(m(p, k))) p = i;
            if (m(p, k) == 0.0) return S(0);
            if (p != k) {
                for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
                sign = -sign;
            }
            det *= m(k, k);
            for (std::size_t i = k + 1; i < n; ++i) {
                S f = m(i, k) / m(k, k);
                for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
            }
        }
        return sign * det;
    }
}

// Gauss-Jordan inverse with partial pivoting (exact pivoting on nonzero in
// exact mode).
template <class S>
DenseMatrix<S> inverse(DenseMatrix<S> m) {
    if (!m.square()) throw invalid_input("inverse of a non-square matrix");
    const std::size_t n = m.rows();
    DenseMatrix<S> inv = DenseMatrix<S>::identity(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if constexpr (is_exact_v<S>) {
                if (is_zero(m(p, k)) && !is_zero(m(i, k))) p = i;
            } else {
                if (std::abs(m(i, k)) > std::abs(m(p, k))) p = i;
            }
        }
        if (is_zero(m(p, k))) throw invalid_input("matrix is singular");
        for (std::size_t j = 0; j < n; ++j) {
            std::swap(m(k, j), m(p, j));
            std::swap(inv(k, j), inv(p, j));
        }
        const S piv = m(k, k);
        for (std::size_t j = 0; j < n; ++j) {
            m(k, j) /= piv;
            inv(k, j) /= piv;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k || is_zero(m(i, k))) continue;
            const S f = m(i, k);
            for (std::size_t j = 0; j < n; ++j) {
                m(i, j) -= f * m(k, j);
                inv(i, j) -= f * inv(k, j);
            }
        }
    }
    return inv;
}

// det(z I - A) via Faddeev-LeVerrier; monic of degree n. Division-light and
// exact over the rationals, but it loses several digits in floating point.
template <class S>
Poly<S> char_poly_leverrier(const DenseMatrix<S>& a) {
    if (!a.square()) throw invalid_input("characteristic polynomial of a non-square matrix");
    const std::size_t n = a.rows();
    std::vector<S> c(n + 1, S(0));
    c[n] = S(1);
    DenseMatrix<S> mk(n, n);  // M_0 = 0
    for (std::size_t k = 1; k <= n; ++k) {
        DenseMatrix<S> am = a * mk;
        for (std::size_t i = 0; i < n; ++i) am(i, i) += c[n - k + 1];
        mk = std::move(am);
        c[n - k] = -(a * mk).trace() / S(static_cast<long long>(k));
    }
    return Poly<S>(std::move(c));
}

inline Eigen::MatrixXcd to_eigen(const DenseMatrix<Complex>& m) {
    Eigen::MatrixXcd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
    return e;
}

inline DenseMatrix<Complex> from_eigen(const Eigen::MatrixXcd& e) {
    DenseMatrix<Complex> m(e.rows(), e.cols());
    for (Eigen::Index i = 0; i < e.rows(); ++i)
        for (Eigen::Index j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
    return m;
}

// det(z I - A) from an upper Hessenberg form H = Q* A Q through the La Budde
// recurrence p_k = (z - h_kk) p_{k-1} - sum_{i<k} h_ik (h_{i+1,i} ... h_{k,k-1}) p_{i-1}.
inline Poly<Complex> char_poly_hessenberg(const DenseMatrix<Complex>& a) {
    if (!a.square()) throw invalid_input("characteristic polynomial of a non-square matrix");
    const std::size_t n = a.rows();
    if (n == 0) return Poly<Complex>::one();
    const Eigen::MatrixXcd h = Eigen::HessenbergDecomposition<Eigen::MatrixXcd>(to_eigen(a)).matrixH();
    auto H = [&](std::size_t i, std::size_t j) { return h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)); };
    std::vector<Poly<Complex>> p{Poly<Complex>::one()};
    for (std::size_t k = 0; k < n; ++k) {
        Poly<Complex> next = Poly<Complex>::linear(H(k, k)) * p[k];
        Complex sub(1);
        for (std::size_t i = k; i-- > 0;) {
            sub *= H(i + 1, i);
            next = next - Poly<Complex>::constant(H(i, k) * sub) * p[i];
        }
        p.push_back(std::move(next));
    }
    return p[n];
}

// Exact scalars use Faddeev-LeVerrier; floating scalars use the Hessenberg route.
template <class S>
Poly<S> char_poly(const DenseMatrix<S>& a) {
    if constexpr (is_exact_v<S>) {
        return char_poly_leverrier(a);
    } else {
        return char_poly_hessenberg(a);
    }
}

template <class S>
DenseMatrix<Complex> to_complex_matrix(const DenseMatrix<S>& m) {
    DenseMatrix<Complex> c(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) c(i, j) = to_complex(m(i, j));
    return c;
}

template <class S>
std::vector<Complex> eigenvalues(const DenseMatrix<S>& m) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(to_eigen(to_complex_matrix(m)), false);
    const auto& v = es.eigenvalues();
    return std::vector<Complex>(v.data(), v.data() + v.size());
}

struct EigenDecomposition {
    std::vector<Complex> values;
    DenseMatrix<Complex> vectors;  // columns are eigenvectors
};

template <class S>
EigenDecomposition eigen_decompose(const DenseMatrix<S>& m) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(to_eigen(to_complex_matrix(m)), true);
    const auto& v = es.eigenvalues();
    return {std::vector<Complex>(v.data(), v.data() + v.size()), from_eigen(es.eigenvectors())};
}

}  // namespace opers
