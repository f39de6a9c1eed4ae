#pragma once

#include "opers/corner.hpp"
#include "opers/scalar.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

namespace opers {

inline constexpr double kTrimTolerance = 1e-12;

// Dense univariate polynomial, coefficients in ascending degree. Every
// constructor and operation trims trailing zeros; in floating mode a trailing
// coefficient counts as zero when it is below kTrimTolerance * max|c|.
template <class S>
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<S> c) : c_(std::move(c)) { trim(); }
    Poly(std::initializer_list<S> c) : c_(c) { trim(); }

    static Poly constant(const S& c) { return Poly(std::vector<S>{c}); }
    static Poly one() { return constant(S(1)); }
    // z - root
    static Poly linear(const S& root) { return Poly(std::vector<S>{-root, S(1)}); }
    static Poly monomial(const S& c, std::size_t k) {
        std::vector<S> v(k + 1, S(0));
        v[k] = c;
        return Poly(std::move(v));
    }
    static Poly from_roots(const std::vector<S>& roots) {
        Poly p = one();
        for (const auto& r : roots) p = p * linear(r);
        return p;
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<S>& coeffs() const { return c_; }
    S coeff(std::size_t k) const { return k < c_.size() ? c_[k] : S(0); }
    S leading() const { return c_.empty() ? S(0) : c_.back(); }

    S operator()(const S& z) const {
        S acc(0);
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
        return acc;
    }

    double max_abs_coeff() const {
        double m = 0;
        for (const auto& c : c_) m = std::max(m, magnitude(c));
        return m;
    }

    Poly monic() const {
        if (is_zero()) throw invalid_input("zero polynomial has no monic normalization");
        return *this / leading();
    }

    Poly derivative() const {
        std::vector<S> d;
        for (std::size_t k = 1; k < c_.size(); ++k) d.push_back(c_[k] * S(static_cast<long long>(k)));
        return Poly(std::move(d));
    }

    // p(q z)
    Poly scaled_argument(const S& q) const {
        std::vector<S> v(c_);
        S f(1);
        for (auto& c : v) {
            c *= f;
            f *= q;
        }
        return Poly(std::move(v));
    }

    // p(z + eps), by binomial reindexing of the coefficients.
    Poly shifted_argument(const S& eps) const {
        const std::size_t n = c_.size();
        std::vector<S> out(n, S(0));
        // Pascal-row binomials; row k is rebuilt in place.
        std::vector<S> binom(n, S(0));
        for (std::size_t k = 0; k < n; ++k) {
            binom[k] = S(1);
            for (std::size_t j = k - 1; j >= 1 && j < k; --j) binom[j] = binom[j] + binom[j - 1];
            // c_k (z + eps)^k = sum_j binom(k, j) eps^(k-j) z^j
            S e(1);
            for (std::size_t j = k + 1; j-- > 0;) {
                out[j] += c_[k] * binom[j] * e;
                e *= eps;
            }
        }
        return Poly(std::move(out));
    }

    Poly& operator+=(const Poly& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), S(0));
        for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
        trim();
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), S(0));
        for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
        trim();
        return *this;
    }
    Poly& operator*=(const S& s) {
        for (auto& c : c_) c *= s;
        trim();
        return *this;
    }
    Poly& operator/=(const S& s) {
        for (auto& c : c_) c /= s;
        trim();
        return *this;
    }

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator-(Poly a) {
        for (auto& c : a.c_) c = -c;
        return a;
    }
    friend Poly operator*(Poly a, const S& s) { return a *= s; }
    friend Poly operator*(const S& s, Poly a) { return a *= s; }
    friend Poly operator/(Poly a, const S& s) { return a /= s; }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<S> v(a.c_.size() + b.c_.size() - 1, S(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
        return Poly(std::move(v));
    }
    friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }

private:
    void trim() {
        if constexpr (is_exact_v<S>) {
            while (!c_.empty() && opers::is_zero(c_.back())) c_.pop_back();
        } else {
            double m = 0;
            for (const auto& c : c_) m = std::max(m, std::abs(c));
            while (!c_.empty() && (std::abs(c_.back()) <= kTrimTolerance * m || c_.back() == 0.0)) c_.pop_back();
        }
    }

    std::vector<S> c_;
};

template <class S>
struct DivMod {
    Poly<S> quotient;
    Poly<S> remainder;
};

template <class S>
DivMod<S> divmod(const Poly<S>& a, const Poly<S>& b) {
    if (b.is_zero()) throw invalid_input("polynomial division by zero");
    std::vector<S> r = a.coeffs();
    const int db = b.degree();
    if (a.degree() < db) return {Poly<S>{}, a};
    std::vector<S> q(a.degree() - db + 1, S(0));
    const S lead = b.leading();
    for (int k = a.degree() - db; k >= 0; --k) {
        S f = r[k + db] / lead;
        q[k] = f;
        for (int j = 0; j <= db; ++j) r[k + j] -= f * b.coeffs()[j];
    }
    r.resize(db);
    return {Poly<S>(std::move(q)), Poly<S>(std::move(r))};
}

// Quotient a / b, requiring the remainder to vanish: exactly in exact mode,
// relative to max|a| within tol in floating mode.
template <class S>
Poly<S> exact_quotient(const Poly<S>& a, const Poly<S>& b, double tol = 1e-9) {
    auto [q, r] = divmod(a, b);
    if constexpr (is_exact_v<S>) {
        if (!r.is_zero()) throw invalid_input("polynomial division is not exact");
    } else {
        if (r.max_abs_coeff() > tol * std::max(1.0, a.max_abs_coeff()))
            throw invalid_input("polynomial division is not exact (remainder above tolerance)");
    }
    return q;
}

// Maximum coefficientwise |a - b|.
template <class S>
double max_coeff_diff(const Poly<S>& a, const Poly<S>& b) {
    std::size_t n = std::max(a.coeffs().size(), b.coeffs().size());
    double m = 0;
    for (std::size_t k = 0; k < n; ++k) m = std::max(m, magnitude(S(a.coeff(k) - b.coeff(k))));
    return m;
}

// The corner's shift p(qz) or p(z + eps).
template <class S>
Poly<S> shift(const Poly<S>& p, const Corner<S>& corner) {
    switch (corner.kind) {
        case CornerKind::QMult: return p.scaled_argument(corner.parameter);
        case CornerKind::EpsAdd: return p.shifted_argument(corner.parameter);
        default: throw invalid_input("shift is undefined for differential corners");
    }
}

// Inverse shift p(z/q) or p(z - eps).
template <class S>
Poly<S> unshift(const Poly<S>& p, const Corner<S>& corner) {
    switch (corner.kind) {
        case CornerKind::QMult: return p.scaled_argument(S(1) / corner.parameter);
        case CornerKind::EpsAdd: return p.shifted_argument(-corner.parameter);
        default: throw invalid_input("shift is undefined for differential corners");
    }
}

// Pointwise versions of the shift acting on an argument.
template <class S>
S shift_point(const S& z, const Corner<S>& corner, int n = 1) {
    switch (corner.kind) {
        case CornerKind::QMult:
            return n >= 0 ? z * power(corner.parameter, n) : z / power(corner.parameter, -n);
        case CornerKind::EpsAdd: return z + S(static_cast<long long>(n)) * corner.parameter;
        default: throw invalid_input("shift is undefined for differential corners");
    }
}

// nabla p with nabla = d/dz + gamma (rational) or z d/dz + gamma (trigonometric).
template <class S>
Poly<S> twisted_derivative(const Poly<S>& p, const S& gamma, const Corner<S>& corner) {
    switch (corner.kind) {
        case CornerKind::RatDiff: return p.derivative() + p * gamma;
        case CornerKind::TrigDiff: {
            std::vector<S> v(p.coeffs());
            for (std::size_t k = 0; k < v.size(); ++k) v[k] *= S(static_cast<long long>(k)) + gamma;
            return Poly<S>(std::move(v));
        }
        default: throw invalid_input("twisted derivative is undefined for shift corners");
    }
}

// e_0..e_n of the values, by the usual product recurrence.
template <class S>
std::vector<S> elem_sym_all(const std::vector<S>& values) {
    std::vector<S> e(values.size() + 1, S(0));
    e[0] = S(1);
    for (std::size_t i = 0; i < values.size(); ++i)
        for (std::size_t k = i + 1; k >= 1; --k) e[k] += values[i] * e[k - 1];
    return e;
}

template <class S>
S elem_sym(const std::vector<S>& values, std::size_t k) {
    if (k > values.size()) throw invalid_input("elem_sym: k exceeds the number of values");
    return elem_sym_all(values)[k];
}

// e_k of the values with entry j (0-based) removed.
template <class S>
S partial_sym(const std::vector<S>& values, std::size_t k, std::size_t j) {
    if (j >= values.size()) throw invalid_input("partial_sym: omitted index out of range");
    std::vector<S> rest;
    rest.reserve(values.size() - 1);
    for (std::size_t i = 0; i < values.size(); ++i)
        if (i != j) rest.push_back(values[i]);
    return elem_sym(rest, k);
}

namespace detail {

inline std::vector<Complex> companion_roots(const std::vector<Complex>& c) {
    const int n = static_cast<int>(c.size()) - 1;
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[i] / c[n];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    std::vector<Complex> out(es.eigenvalues().data(), es.eigenvalues().data() + n);
    return out;
}

// A few Newton steps, each kept only if it lowers |p|.
inline Complex polish_root(const Poly<Complex>& p, const Poly<Complex>& dp, Complex z) {
    double best = std::abs(p(z));
    for (int it = 0; it < 8 && best > 0; ++it) {
        Complex d = dp(z);
        if (d == 0.0) break;
        Complex next = z - p(z) / d;
        double val = std::abs(p(next));
        if (!(val < best)) break;
        z = next;
        best = val;
    }
    return z;
}

}  // namespace detail

// All roots with multiplicity. Floating mode: companion-matrix eigenvalues,
// Newton-polished. Exact mode: closed form through degree 2 when the square
// root is rational, floating fallback otherwise.
template <class S>
std::vector<S> roots(const Poly<S>& p) {
    if (p.is_zero()) throw invalid_input("roots of the zero polynomial are undefined");
    if (p.degree() == 0) return {};
    if (p.degree() == 1) return {-p.coeff(0) / p.coeff(1)};
    if constexpr (is_exact_v<S>) {
        if (p.degree() == 2) {
            const S a = p.coeff(2), b = p.coeff(1), c = p.coeff(0);
            if (auto sq = exact_sqrt(b * b - S(4) * a * c)) {
                return {(-b - *sq) / (S(2) * a), (-b + *sq) / (S(2) * a)};
            }
        }
        std::vector<Complex> cc;
        for (const auto& c : p.coeffs()) cc.push_back(to_complex(c));
        std::vector<S> out;
        for (const auto& z : roots(Poly<Complex>(cc))) out.push_back(from_complex<S>(z));
        return out;
    } else {
        auto zs = detail::companion_roots(p.coeffs());
        const Poly<Complex> dp = p.derivative();
        for (auto& z : zs) z = detail::polish_root(p, dp, z);
        return zs;
    }
}

}  // namespace opers
