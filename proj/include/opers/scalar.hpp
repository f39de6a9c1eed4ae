#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace opers {

// Raised when an input violates a documented precondition. The message names
// the violated invariant so callers (the CLI in particular) can surface it.
struct invalid_input : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

using Complex = std::complex<double>;
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Complex number with rational real and imaginary parts. Arithmetic is closed
// and never rounds.
class ExactComplex {
public:
    ExactComplex() = default;
    template <class I, std::enable_if_t<std::is_integral_v<I>, int> = 0>
    ExactComplex(I re) : re_(static_cast<long long>(re)) {}
    ExactComplex(Rational re) : re_(std::move(re)) {}
    ExactComplex(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}

    const Rational& real() const { return re_; }
    const Rational& imag() const { return im_; }

    ExactComplex& operator+=(const ExactComplex& o) {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    ExactComplex& operator-=(const ExactComplex& o) {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    ExactComplex& operator*=(const ExactComplex& o) {
        Rational re = re_ * o.re_ - im_ * o.im_;
        Rational im = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(re);
        im_ = std::move(im);
        return *this;
    }
    ExactComplex& operator/=(const ExactComplex& o) {
        Rational n = o.re_ * o.re_ + o.im_ * o.im_;
        if (n == 0) throw std::domain_error("exact division by zero");
        Rational re = (re_ * o.re_ + im_ * o.im_) / n;
        Rational im = (im_ * o.re_ - re_ * o.im_) / n;
        re_ = std::move(re);
        im_ = std::move(im);
        return *this;
    }

    friend ExactComplex operator+(ExactComplex a, const ExactComplex& b) { return a += b; }
    friend ExactComplex operator-(ExactComplex a, const ExactComplex& b) { return a -= b; }
    friend ExactComplex operator*(ExactComplex a, const ExactComplex& b) { return a *= b; }
    friend ExactComplex operator/(ExactComplex a, const ExactComplex& b) { return a /= b; }
    friend ExactComplex operator-(const ExactComplex& a) { return ExactComplex(-a.re_, -a.im_); }
    friend bool operator==(const ExactComplex& a, const ExactComplex& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const ExactComplex& a, const ExactComplex& b) { return !(a == b); }

    friend std::ostream& operator<<(std::ostream& os, const ExactComplex& z) {
        os << z.re_;
        if (z.im_ != 0) os << (z.im_ > 0 ? "+" : "-") << abs(z.im_) << "i";
        return os;
    }

private:
    Rational re_{0};
    Rational im_{0};
};

template <class S>
inline constexpr bool is_exact_v = std::is_same_v<S, ExactComplex>;

inline Complex to_complex(const Complex& z) { return z; }
inline Complex to_complex(const ExactComplex& z) {
    return {z.real().convert_to<double>(), z.imag().convert_to<double>()};
}

template <class S>
S from_complex(const Complex& z) {
    if constexpr (is_exact_v<S>) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw invalid_input("non-finite value cannot enter exact arithmetic");
        return ExactComplex(Rational(z.real()), Rational(z.imag()));
    } else {
        return z;
    }
}

template <class S>
S from_rational(const Rational& re, const Rational& im = 0) {
    if constexpr (is_exact_v<S>) {
        return ExactComplex(re, im);
    } else {
        return Complex(re.convert_to<double>(), im.convert_to<double>());
    }
}

template <class S>
double magnitude(const S& z) {
    return std::abs(to_complex(z));
}

inline bool is_zero(const Complex& z) { return z == 0.0; }
inline bool is_zero(const ExactComplex& z) { return z.real() == 0 && z.imag() == 0; }

// |a - b| <= tol * max(1, |a|, |b|); exact values compare exactly.
template <class S>
bool nearly_equal(const S& a, const S& b, double tol) {
    if constexpr (is_exact_v<S>) {
        return a == b;
    } else {
        double scale = std::max({1.0, std::abs(a), std::abs(b)});
        return std::abs(a - b) <= tol * scale;
    }
}

template <class S>
S power(S base, unsigned k) {
    S result(1);
    while (k) {
        if (k & 1u) result *= base;
        base *= base;
        k >>= 1u;
    }
    return result;
}

namespace detail {

inline std::optional<BigInt> exact_isqrt(const BigInt& n) {
    if (n < 0) return std::nullopt;
    BigInt r = boost::multiprecision::sqrt(n);
    if (r * r != n) return std::nullopt;
    return r;
}

inline std::optional<Rational> exact_sqrt(const Rational& x) {
    if (x < 0) return std::nullopt;
    auto n = exact_isqrt(boost::multiprecision::numerator(x));
    auto d = exact_isqrt(boost::multiprecision::denominator(x));
    if (!n || !d) return std::nullopt;
    return Rational(*n, *d);
}

}  // namespace detail

// Square root within Q(i), when one exists.
inline std::optional<ExactComplex> exact_sqrt(const ExactComplex& z) {
    const Rational& a = z.real();
    const Rational& b = z.imag();
    auto m = detail::exact_sqrt(a * a + b * b);
    if (!m) return std::nullopt;
    auto x = detail::exact_sqrt((*m + a) / 2);
    auto y = detail::exact_sqrt((*m - a) / 2);
    if (!x || !y) return std::nullopt;
    return ExactComplex(*x, b < 0 ? Rational(-*y) : *y);
}

inline std::string to_string(const Rational& r) {
    return r.str();
}

}  // namespace opers
