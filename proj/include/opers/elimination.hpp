#pragma once

// Small-N elimination for the multilinear energy relations, used to certify
// that a numerical solve found every isolated solution.
//
// N = 1: one linear equation.
// N = 2: F_k = A_k(x) + B_k(x) y; the resultant A_1 B_2 - A_2 B_1 is a
//        quadratic in x and y follows by back-substitution.
// N = 3: F_k = G_k(x, y) + H_k(x, y) w; eliminating w pairwise gives two
//        polynomials of degree <= 2 in y, whose Sylvester resultant is a
//        polynomial in x. Each of its roots is back-solved as an N = 2
//        problem in (y, w), so spurious roots drop out.

#include "opers/energy.hpp"
#include "opers/poly.hpp"
#include "opers/wronskian.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace opers {

struct EliminationResult {
    bool conclusive = false;
    std::string method;
    std::string note;
    Poly<Complex> eliminant;  // univariate polynomial in p_1 (empty for N = 1)
    std::vector<std::vector<Complex>> solutions;
};

// Exact solutions when every root is a Gaussian rational; exact_roots = false
// otherwise (solutions are then rounded from floating roots).
struct ExactSolveResult {
    bool conclusive = false;
    bool exact_roots = true;
    std::string note;
    std::vector<std::vector<ExactComplex>> solutions;
};

namespace detail {

// Monic gcd by Euclid; exact for exact scalars.
template <class S>
Poly<S> poly_gcd(Poly<S> a, Poly<S> b) {
    while (!b.is_zero()) {
        Poly<S> r = divmod(a, b).remainder;
        a = std::move(b);
        b = std::move(r);
    }
    return a.is_zero() ? a : a.monic();
}

// Arithmetic modulo a prime P = 1 (mod 4), where i maps to a square root of -1.
struct ModPrime {
    std::uint64_t p = 0, i = 0;

    std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
        return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
    }
    std::uint64_t pow(std::uint64_t a, std::uint64_t e) const {
        std::uint64_t r = 1;
        for (; e; e >>= 1, a = mul(a, a))
            if (e & 1) r = mul(r, a);
        return r;
    }
    std::uint64_t inv(std::uint64_t a) const { return pow(a, p - 2); }
    std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return a >= b ? a - b : a + p - b; }

    // nullopt when a denominator vanishes mod p
    std::optional<std::uint64_t> reduce(const Rational& x) const {
        using boost::multiprecision::cpp_int;
        const cpp_int pm(p);
        cpp_int n = boost::multiprecision::numerator(x) % pm;
        if (n < 0) n += pm;
        const auto d = static_cast<std::uint64_t>(cpp_int(boost::multiprecision::denominator(x) % pm));
        if (d == 0) return std::nullopt;
        return mul(static_cast<std::uint64_t>(n), inv(d));
    }
    std::optional<std::uint64_t> reduce(const ExactComplex& z) const {
        auto re = reduce(z.real()), im = reduce(z.imag());
        if (!re || !im) return std::nullopt;
        return (*re + mul(i, *im)) % p;
    }
};

inline const std::vector<ModPrime>& squarefree_primes() {
    static const std::vector<ModPrime> primes = [] {
        std::vector<ModPrime> out;
        auto is_prime = [](std::uint64_t n) {
            for (std::uint64_t d = 2; d * d <= n; ++d)
                if (n % d == 0) return false;
            return true;
        };
        for (std::uint64_t n = (std::uint64_t{1} << 31) - 3; out.size() < 3; n -= 4) {
            if (n % 4 != 1 || !is_prime(n)) continue;
            ModPrime m{n, 0};
            // a quadratic non-residue g gives i = g^((p-1)/4)
            for (std::uint64_t g = 2;; ++g)
                if (m.pow(g, (n - 1) / 2) == n - 1) {
                    m.i = m.pow(g, (n - 1) / 4);
                    break;
                }
            out.push_back(m);
        }
        return out;
    }();
    return primes;
}

// Degree of gcd(a, b) over Z/p, a and b given low-to-high.
inline int gcd_degree_mod(std::vector<std::uint64_t> a, std::vector<std::uint64_t> b, const ModPrime& m) {
    auto trim = [](std::vector<std::uint64_t>& v) {
        while (!v.empty() && v.back() == 0) v.pop_back();
    };
    trim(a);
    trim(b);
    while (!b.empty()) {
        const std::uint64_t lead_inv = m.inv(b.back());
        while (a.size() >= b.size()) {
            const std::uint64_t f = m.mul(a.back(), lead_inv);
            const std::size_t shift = a.size() - b.size();
            for (std::size_t k = 0; k < b.size(); ++k) a[shift + k] = m.sub(a[shift + k], m.mul(f, b[k]));
            trim(a);
            if (a.empty()) break;
        }
        std::swap(a, b);
    }
    return static_cast<int>(a.size()) - 1;
}

// True when p is provably squarefree: gcd(p, p') is constant modulo a prime
// that keeps the degree of p.
inline bool squarefree_by_reduction(const Poly<ExactComplex>& p) {
    for (const auto& m : squarefree_primes()) {
        std::vector<std::uint64_t> a, da;
        bool ok = true;
        for (std::size_t k = 0; k < p.coeffs().size() && ok; ++k) {
            auto r = m.reduce(p.coeffs()[k]);
            ok = r.has_value();
            if (ok) a.push_back(*r);
        }
        if (!ok || a.back() == 0) continue;
        for (std::size_t k = 1; k < a.size(); ++k) da.push_back(m.mul(a[k], k % m.p));
        if (gcd_degree_mod(a, da, m) == 0) return true;
    }
    return false;
}

template <class S>
Poly<S> squarefree_part(const Poly<S>& p) {
    if (p.degree() <= 1) return p.is_zero() ? p : p.monic();
    // Euclid over the rationals swells coefficients badly on data converted
    // from doubles, so the generic squarefree case is settled modulo primes.
    if constexpr (is_exact_v<S>)
        if (squarefree_by_reduction(p)) return p.monic();
    return exact_quotient(p, poly_gcd(p, p.derivative())).monic();
}

// A multilinear polynomial in two variables (x, y): c[0] + c[1] x + c[2] y + c[3] x y.
template <class S>
using Bilinear = std::array<S, 4>;

// F restricted to variables (i, j) with the rest fixed at `fixed`.
template <class S>
Bilinear<S> restrict2(const std::vector<S>& coeff, std::size_t n, std::size_t i, std::size_t j,
                      const std::vector<S>& fixed) {
    Bilinear<S> out{S(0), S(0), S(0), S(0)};
    for (std::size_t mask = 0; mask < coeff.size(); ++mask) {
        S term = coeff[mask];
        if (is_zero(term)) continue;
        for (std::size_t b = 0; b < n; ++b)
            if (b != i && b != j && (mask & (std::size_t{1} << b))) term *= fixed[b];
        const bool hi = mask & (std::size_t{1} << i), hj = mask & (std::size_t{1} << j);
        out[(hi ? 1 : 0) + (hj ? 2 : 0)] += term;
    }
    return out;
}

// Solutions (x, y) of a pair of bilinear equations; nullopt when the pair does
// not cut out finitely many points.
template <class S>
std::optional<std::vector<std::pair<S, S>>> solve_bilinear_pair(const Bilinear<S>& f, const Bilinear<S>& g) {
    // F = A(x) + B(x) y
    const Poly<S> A{f[0], f[1]}, B{f[2], f[3]}, C{g[0], g[1]}, D{g[2], g[3]};
    const Poly<S> res = A * D - C * B;
    if (res.is_zero()) return std::nullopt;
    std::vector<std::pair<S, S>> out;
    if (res.degree() == 0) return out;
    const Poly<S> sf = squarefree_part(res);
    for (const S& x : roots(sf)) {
        const S b = B(x), d = D(x);
        const double sb = magnitude(b), sd = magnitude(d);
        const bool no_y = std::max(sb, sd) == 0.0 ||
                          (!is_exact_v<S> && std::max(sb, sd) < 1e-13 * (1.0 + sf.max_abs_coeff()));
        if (no_y) {
            // both equations lose y here: either y is free or x is spurious
            const S ax = A(x), cx = C(x);
            if (is_exact_v<S> ? (is_zero(ax) && is_zero(cx))
                              : std::max(magnitude(ax), magnitude(cx)) < 1e-11 * (1.0 + sf.max_abs_coeff()))
                return std::nullopt;
            continue;
        }
        out.emplace_back(x, sb >= sd ? S(-A(x) / b) : S(-C(x) / d));
    }
    return out;
}

// Newton polish on the floating relation; returns the final relative residual.
inline double polish(const EnergyRelation<Complex>& rel, std::vector<Complex>& p, int iters = 8) {
    for (int it = 0; it < iters; ++it) {
        const auto f = rel.residual(p);
        const Eigen::MatrixXcd j = to_eigen(rel.jacobian(p));
        Eigen::VectorXcd rhs(static_cast<Eigen::Index>(p.size()));
        for (std::size_t k = 0; k < p.size(); ++k) rhs(static_cast<Eigen::Index>(k)) = f[k];
        const Eigen::VectorXcd step = j.fullPivLu().solve(rhs);
        if (!step.allFinite()) break;
        for (std::size_t k = 0; k < p.size(); ++k) p[k] -= step(static_cast<Eigen::Index>(k));
        if (step.norm() < 1e-15 * (1.0 + Eigen::Map<Eigen::VectorXcd>(p.data(), p.size()).norm())) break;
    }
    return rel.relative_residual(p);
}

inline EnergyRelation<Complex> to_floating(const EnergyRelation<ExactComplex>& rel) {
    EnergyRelation<Complex> out;
    out.corner = {rel.corner.kind, to_complex(rel.corner.parameter)};
    for (const auto& x : rel.twist) out.twist.push_back(to_complex(x));
    for (const auto& x : rel.a) out.a.push_back(to_complex(x));
    for (const auto& x : rel.targets) out.targets.push_back(to_complex(x));
    for (const auto& row : rel.coeff) {
        std::vector<Complex> r;
        for (const auto& x : row) r.push_back(to_complex(x));
        out.coeff.push_back(std::move(r));
    }
    return out;
}

// coeff of F_k with the constant target folded in.
template <class S>
std::vector<std::vector<S>> shifted_tables(const EnergyRelation<S>& rel) {
    auto t = rel.coeff;
    for (std::size_t k = 0; k < rel.size(); ++k) t[k][0] -= rel.targets[k];
    return t;
}

}  // namespace detail

// Exact elimination for N <= 2.
inline ExactSolveResult solve_exact_small(const EnergyRelation<ExactComplex>& rel) {
    using X = ExactComplex;
    ExactSolveResult out;
    const auto t = detail::shifted_tables(rel);
    if (rel.size() == 1) {
        if (is_zero(t[0][1])) {
            out.note = "H_1 does not depend on p_1";
            return out;
        }
        out.conclusive = true;
        out.solutions.push_back({-t[0][0] / t[0][1]});
        return out;
    }
    if (rel.size() != 2) throw invalid_input("exact elimination supports N <= 2");
    const std::vector<X> none(2, X(0));
    auto f = detail::restrict2(t[0], 2, 0, 1, none);
    auto g = detail::restrict2(t[1], 2, 0, 1, none);
    auto sols = detail::solve_bilinear_pair(f, g);
    if (!sols) {
        out.note = "the energy relations do not cut out finitely many points";
        return out;
    }
    out.conclusive = true;
    for (auto& [x, y] : *sols) {
        std::vector<X> p{x, y};
        const auto r = rel.residual(p);
        if (!std::all_of(r.begin(), r.end(), [](const X& v) { return is_zero(v); })) out.exact_roots = false;
        out.solutions.push_back(std::move(p));
    }
    if (!out.exact_roots) out.note = "eliminant has irrational roots; solutions rounded from floating roots";
    return out;
}

// Elimination oracle for N <= 3 on the exact relation, with floating roots.
inline EliminationResult elimination_oracle(const EnergyRelation<ExactComplex>& rel) {
    using X = ExactComplex;
    EliminationResult out;
    const std::size_t n = rel.size();
    const auto frel = detail::to_floating(rel);
    auto accept = [&](std::vector<Complex> p) {
        if (detail::polish(frel, p) > 1e-9) return;
        for (const auto& q : out.solutions) {
            double d = 0, s = 1;
            for (std::size_t i = 0; i < n; ++i) {
                d = std::max(d, std::abs(p[i] - q[i]));
                s = std::max(s, std::abs(q[i]));
            }
            if (d < 1e-7 * s) return;
        }
        out.solutions.push_back(std::move(p));
    };

    if (n <= 2) {
        auto ex = solve_exact_small(rel);
        out.conclusive = ex.conclusive;
        out.note = ex.note;
        out.method = n == 1 ? "linear" : "quadratic resultant";
        for (const auto& s : ex.solutions) {
            std::vector<Complex> p;
            for (const auto& x : s) p.push_back(to_complex(x));
            accept(p);
        }
        return out;
    }
    if (n != 3) throw invalid_input("elimination oracle supports N <= 3");
    out.method = "Sylvester resultant";

    const auto t = detail::shifted_tables(rel);
    // F_k = G_k + H_k w as polynomials in y with Poly(x) coefficients: index = power of y.
    using Col = std::vector<Poly<X>>;
    auto split = [&](const std::vector<X>& c, bool with_w) {
        Col out_col(2);
        for (std::size_t ym = 0; ym < 2; ++ym) {
            const std::size_t base = (ym ? 2u : 0u) | (with_w ? 4u : 0u);
            out_col[ym] = Poly<X>{c[base], c[base | 1u]};
        }
        return out_col;
    };
    auto mul = [](const Col& a, const Col& b) {
        Col r(a.size() + b.size() - 1);
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = r[i + j] + a[i] * b[j];
        return r;
    };
    auto sub = [](Col a, const Col& b) {
        if (a.size() < b.size()) a.resize(b.size());
        for (std::size_t i = 0; i < b.size(); ++i) a[i] = a[i] - b[i];
        while (!a.empty() && a.back().is_zero()) a.pop_back();
        return a;
    };
    std::vector<Col> G, H;
    for (std::size_t k = 0; k < 3; ++k) {
        G.push_back(split(t[k], false));
        H.push_back(split(t[k], true));
    }
    auto pair_res = [&](std::size_t i, std::size_t j) { return sub(mul(G[i], H[j]), mul(G[j], H[i])); };
    auto sylvester = [](const Col& a, const Col& b) -> Poly<X> {
        const std::size_t da = a.size() - 1, db = b.size() - 1;
        const std::size_t m = da + db;
        if (m == 0) return Poly<X>::one();
        PolyMatrix<X> s(m);
        for (std::size_t r = 0; r < db; ++r)
            for (std::size_t k = 0; k <= da; ++k) s(r, r + k) = a[da - k];
        for (std::size_t r = 0; r < da; ++r)
            for (std::size_t k = 0; k <= db; ++k) s(db + r, r + k) = b[db - k];
        return det_poly(s);
    };

    const std::vector<Col> rs{pair_res(0, 1), pair_res(0, 2), pair_res(1, 2)};
    Poly<X> eliminant;
    for (std::size_t i = 0; i < 3 && eliminant.is_zero(); ++i)
        for (std::size_t j = i + 1; j < 3 && eliminant.is_zero(); ++j)
            if (!rs[i].empty() && !rs[j].empty()) eliminant = sylvester(rs[i], rs[j]);
    if (eliminant.is_zero()) {
        out.note = "every pairwise resultant vanishes identically";
        return out;
    }
    const Poly<X> sf = detail::squarefree_part(eliminant);
    std::vector<Complex> ec;
    for (const auto& c : sf.coeffs()) ec.push_back(to_complex(c));
    out.eliminant = Poly<Complex>(ec);
    if (sf.degree() <= 0) {
        out.conclusive = true;
        return out;
    }

    const auto ft = detail::shifted_tables(frel);
    out.conclusive = true;
    for (const Complex& x : roots(out.eliminant)) {
        const std::vector<Complex> fixed{x, 0.0, 0.0};
        std::vector<detail::Bilinear<Complex>> b;
        for (std::size_t k = 0; k < 3; ++k) b.push_back(detail::restrict2(ft[k], 3, 1, 2, fixed));
        bool solved = false;
        for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) {
            auto sols = detail::solve_bilinear_pair(b[i], b[j]);
            if (!sols) continue;
            solved = true;
            for (auto [y, w] : *sols) accept({x, y, w});
            break;
        }
        if (!solved) {
            out.conclusive = false;
            out.note = "a root of the eliminant carries a positive-dimensional fibre";
        }
    }
    return out;
}

}  // namespace opers
