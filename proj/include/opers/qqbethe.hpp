#pragma once

#include "opers/poly.hpp"
#include "opers/wronskian.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace opers {

// Which index placement of the QQ-system is evaluated.
//   realized: for shift corners
//       xi_{i+1} Q+(z) Q-(sz) - xi_i Q+(sz) Q-(z) = c Lambda_i(z) Q_{i-1}(sz) Q_{i+1}(z)
//     and for differential corners
//       Q+ dQ- - Q- dQ+ + (gamma_{i+1} - gamma_i) Q+ Q- = c Lambda_i Q_{i-1} Q_{i+1}
//     with d = d/dz or z d/dz. This is what the minors satisfy.
//   printed: Q+ and Q- exchanged on the left for shift corners; the twist
//     difference reversed for the trigonometric corner; rational unchanged.
enum class QQOrientation { realized, printed };

// Constant term of the trigonometric Gaudin equations.
//   printed:         (gamma_{i+1} - gamma_i) / s
//   euler_wronskian: (gamma_{i+1} - gamma_i - 1) / s, the form implied by the
//                    z d/dz Wronskian qq-system.
enum class TrigBetheForm { printed, euler_wronskian };

inline const char* to_string(QQOrientation o) { return o == QQOrientation::realized ? "realized" : "printed"; }
inline const char* to_string(TrigBetheForm f) {
    return f == TrigBetheForm::printed ? "printed" : "euler_wronskian";
}

enum class QSign { plus, minus };

template <class S>
struct ExtractedQ {
    Poly<S> poly;  // monic
    S scale;       // leading coefficient removed by the normalization
};

// Rows {1..j} (plus) or {1..j-1, j+1} (minus), 1-based node j; the minor is
// divided by det V and by F (F = 1 for canonical frames), then made monic.
template <class S>
ExtractedQ<S> extract_Q(const Frame<S>& frame, std::size_t j, QSign sign, const Poly<S>& f = Poly<S>::one()) {
    if (j == 0 || j > frame.rank()) throw invalid_input("extract_Q: node out of range");
    std::vector<std::size_t> rows = first_rows(j);
    if (sign == QSign::minus) {
        if (j >= frame.rank()) throw invalid_input("extract_Q: minus polynomial needs node j < rank");
        rows.back() = j;
    }
    Poly<S> q = exact_quotient(normalized_minor(frame, rows), f);
    if (q.is_zero()) throw invalid_input("extract_Q: minor vanishes identically (degenerate frame)");
    S lead = q.leading();
    return {q / lead, lead};
}

// Type-A Cartan matrix.
struct CartanMatrix {
    std::size_t rank = 0;
    int operator()(std::size_t i, std::size_t j) const {
        if (i == j) return 2;
        if (i + 1 == j || j + 1 == i) return -1;
        return 0;
    }
};

// Q-data of a rank-r frame; index k holds node k+1. Boundary Q_0 = Q_{r+1} = 1
// is implicit.
template <class S>
struct QQData {
    std::size_t rank = 0;
    std::vector<Poly<S>> q_plus;
    std::vector<Poly<S>> q_minus;
    std::vector<Poly<S>> lambda;
    std::vector<S> plus_scale;
    std::vector<S> minus_scale;
    std::vector<S> lambda_scale;

    // Q_m for m = 0..r+1 (boundary entries are 1).
    Poly<S> plus_or_one(std::ptrdiff_t node) const {
        if (node <= 0 || node > static_cast<std::ptrdiff_t>(rank)) return Poly<S>::one();
        return q_plus[node - 1];
    }
};

// Q-data straight from the minors: Q_i^+ = M_{1..i}, Q_i^- = M_{1..i-1,i+1},
// intermediate Lambda_i = 1 and Lambda_r = the normalized full determinant.
template <class S>
QQData<S> qq_from_frame(const Frame<S>& frame) {
    const std::size_t n = frame.rank();
    if (n < 2) throw invalid_input("qq-data needs rank N >= 2");
    QQData<S> d;
    d.rank = n - 1;
    for (std::size_t j = 1; j <= d.rank; ++j) {
        auto p = extract_Q(frame, j, QSign::plus);
        auto m = extract_Q(frame, j, QSign::minus);
        d.q_plus.push_back(p.poly);
        d.plus_scale.push_back(p.scale);
        d.q_minus.push_back(m.poly);
        d.minus_scale.push_back(m.scale);
        d.lambda.push_back(Poly<S>::one());
        d.lambda_scale.push_back(S(1));
    }
    auto top = extract_Q(frame, n, QSign::plus);
    d.lambda.back() = top.poly;
    d.lambda_scale.back() = top.scale;
    return d;
}

template <class S>
struct QQResidual {
    std::vector<Poly<S>> residual;  // LHS - c RHS per node
    std::vector<S> prefactor;       // c per node
    std::vector<double> relative;   // max|residual| / max|LHS| per node
    double max_relative = 0;
};

template <class S>
std::pair<Poly<S>, Poly<S>> qq_sides(const QQData<S>& d, std::size_t k, const std::vector<S>& twist,
                                     const Corner<S>& corner, QQOrientation o) {
    const Poly<S>& qp = d.q_plus[k];
    const Poly<S>& qm = d.q_minus[k];
    const S& a = twist[k];
    const S& b = twist[k + 1];
    const auto node = static_cast<std::ptrdiff_t>(k) + 1;
    Poly<S> prev = d.plus_or_one(node - 1);
    Poly<S> next = d.plus_or_one(node + 1);
    Poly<S> lhs, rhs;
    if (corner.is_shift()) {
        if (o == QQOrientation::realized) lhs = qp * shift(qm, corner) * b - shift(qp, corner) * qm * a;
        else lhs = shift(qp, corner) * qm * b - qp * shift(qm, corner) * a;
        rhs = d.lambda[k] * shift(prev, corner) * next;
    } else {
        auto dz = [&](const Poly<S>& p) {
            return corner.kind == CornerKind::RatDiff ? p.derivative() : twisted_derivative(p, S(0), corner);
        };
        S delta = (corner.kind == CornerKind::TrigDiff && o == QQOrientation::printed) ? S(a - b) : S(b - a);
        lhs = qp * dz(qm) - qm * dz(qp) + qp * qm * delta;
        rhs = d.lambda[k] * prev * next;
    }
    return {lhs, rhs};
}

// Per node, LHS - c RHS with c = lc(LHS)/lc(RHS). When the degrees disagree
// (or LHS vanishes) no constant can match and LHS - RHS is returned.
template <class S>
QQResidual<S> qq_residual(const QQData<S>& d, const std::vector<S>& twist, const Corner<S>& corner,
                          QQOrientation o = QQOrientation::realized) {
    if (twist.size() != d.rank + 1) throw invalid_input("qq_residual: twist length must be rank + 1");
    if (d.q_plus.size() != d.rank || d.q_minus.size() != d.rank || d.lambda.size() != d.rank)
        throw invalid_input("qq_residual: per-node lists must have length rank");
    QQResidual<S> out;
    for (std::size_t k = 0; k < d.rank; ++k) {
        auto [lhs, rhs] = qq_sides(d, k, twist, corner, o);
        S c(1);
        Poly<S> res;
        if (!lhs.is_zero() && !rhs.is_zero() && lhs.degree() == rhs.degree()) {
            c = lhs.leading() / rhs.leading();
            res = lhs - rhs * c;
        } else {
            c = S(0);
            res = lhs - rhs;
        }
        double rel = res.max_abs_coeff() / std::max(lhs.max_abs_coeff(), rhs.max_abs_coeff() * magnitude(c));
        if (res.is_zero()) rel = 0;
        out.residual.push_back(res);
        out.prefactor.push_back(c);
        out.relative.push_back(rel);
        out.max_relative = std::max(out.max_relative, rel);
    }
    return out;
}

// Fixes the orientation by computation: generic exact frames at ranks 2 and 3
// must give exact QQ solutions. Returns nullopt if neither placement does.
inline std::optional<QQOrientation> pin_qq_orientation(CornerKind kind) {
    using X = ExactComplex;
    const std::vector<std::vector<X>> twists{{X(Rational(3, 2)), X(Rational(-2, 3), Rational(1))},
                                             {X(2), X(Rational(1, 5)), X(Rational(-3, 4), Rational(1, 2))}};
    const std::vector<std::vector<X>> moms{{X(Rational(5, 7)), X(-3)}, {X(1), X(Rational(-2, 3)), X(4, 1)}};
    Corner<X> corner{kind, X(Rational(7, 3))};
    for (auto o : {QQOrientation::realized, QQOrientation::printed}) {
        bool ok = true;
        for (std::size_t t = 0; t < twists.size(); ++t) {
            auto frame = Frame<X>::canonical(corner, twists[t], moms[t]);
            auto res = qq_residual(qq_from_frame(frame), frame.twist, corner, o);
            for (const auto& p : res.residual) ok = ok && p.is_zero();
        }
        if (ok) return o;
    }
    return std::nullopt;
}

// Residual of the dd-system in the rational corner:
//   W_2^{gamma_i, gamma_{i+1}}(d_i^+, d_i^-) - (gamma_{i+1} - gamma_i) d_{i-1}^+ d_{i+1}^+
// d_plus has r entries (then d_{r+1}^+ = 1) or r+1 entries; d_0^+ = 1.
template <class S>
std::vector<Poly<S>> dd_residual(const std::vector<Poly<S>>& d_plus, const std::vector<Poly<S>>& d_minus,
                                 const std::vector<S>& gamma) {
    const std::size_t r = d_minus.size();
    if (gamma.size() != r + 1) throw invalid_input("dd_residual: twist length must be rank + 1");
    if (d_plus.size() != r && d_plus.size() != r + 1)
        throw invalid_input("dd_residual: d_plus must have r or r+1 entries");
    auto dp = [&](std::size_t m) { return (m == 0 || m > d_plus.size()) ? Poly<S>::one() : d_plus[m - 1]; };
    std::vector<Poly<S>> out;
    for (std::size_t i = 1; i <= r; ++i) {
        const Poly<S>& f = d_plus[i - 1];
        const Poly<S>& g = d_minus[i - 1];
        S delta = gamma[i] - gamma[i - 1];
        Poly<S> w2 = f * g.derivative() - g * f.derivative() + f * g * delta;
        out.push_back(w2 - dp(i - 1) * dp(i + 1) * delta);
    }
    return out;
}

struct NondegeneracyReport {
    bool ok = true;
    int window = 0;
    std::vector<std::string> violations;
};

namespace detail {

template <class S>
std::string describe(const S& z) {
    Complex c = to_complex(z);
    return "(" + std::to_string(c.real()) + (c.imag() < 0 ? "" : "+") + std::to_string(c.imag()) + "i)";
}

// Smallest |n| <= window with shift^n(u) == v, if any.
template <class S>
std::optional<int> orbit_hit(const S& u, const S& v, const Corner<S>& corner, int window, double tol) {
    if (!corner.is_shift()) {
        if (nearly_equal(u, v, tol)) return 0;
        return std::nullopt;
    }
    for (int a = 0; a <= window; ++a)
        for (int n : {a, -a}) {
            if (nearly_equal(shift_point(u, corner, n), v, tol)) return n;
            if (a == 0) break;
        }
    return std::nullopt;
}

}  // namespace detail

template <class S>
int default_window(const QQData<S>& d) {
    int m = 0;
    for (const auto& p : d.q_plus) m = std::max(m, p.degree());
    for (const auto& p : d.lambda) m = std::max(m, p.degree());
    return 2 * m;
}

// Corner-distinctness of Q^+ roots from neighbouring Q^+ roots and from the
// node's singularities, repeated roots within a node, and q-orbit collisions
// of the twist (shift corners). window < 0 selects the default.
template <class S>
NondegeneracyReport nondegenerate(const QQData<S>& d, const std::vector<S>& twist, const Corner<S>& corner,
                                  int window = -1, double tol = 1e-8) {
    NondegeneracyReport rep;
    rep.window = window < 0 ? default_window(d) : window;
    auto flag = [&](std::string msg) {
        rep.ok = false;
        rep.violations.push_back(std::move(msg));
    };
    std::vector<std::vector<S>> rts;
    for (const auto& p : d.q_plus) rts.push_back(p.degree() > 0 ? roots(p) : std::vector<S>{});

    for (std::size_t k = 0; k < d.rank; ++k) {
        const auto node = std::to_string(k + 1);
        for (std::size_t a = 0; a < rts[k].size(); ++a)
            for (std::size_t b = a + 1; b < rts[k].size(); ++b)
                if (nearly_equal(rts[k][a], rts[k][b], tol))
                    flag("node " + node + ": repeated Bethe root " + detail::describe(rts[k][a]));
        if (k + 1 < d.rank) {
            for (const auto& u : rts[k])
                for (const auto& v : rts[k + 1])
                    if (auto n = detail::orbit_hit(u, v, corner, rep.window, tol))
                        flag("nodes " + node + "," + std::to_string(k + 2) + ": root " + detail::describe(u) +
                             " meets neighbour root " + detail::describe(v) + " at shift " + std::to_string(*n));
        }
        if (d.lambda[k].degree() > 0) {
            for (const auto& a : roots(d.lambda[k]))
                for (const auto& u : rts[k])
                    if (auto n = detail::orbit_hit(u, a, corner, rep.window, tol))
                        flag("node " + node + ": Bethe root " + detail::describe(u) + " meets singularity " +
                             detail::describe(a) + " at shift " + std::to_string(*n));
        }
    }
    if (corner.kind == CornerKind::QMult) {
        for (int n = 1; n <= rep.window; ++n)
            if (nearly_equal(power(corner.parameter, n), S(1), tol)) {
                flag("q is a root of unity of order " + std::to_string(n));
                break;
            }
    }
    for (std::size_t i = 0; i < twist.size(); ++i)
        for (std::size_t j = i + 1; j < twist.size(); ++j) {
            Corner<S> probe = corner;
            if (corner.kind != CornerKind::QMult) probe = Corner<S>::rational();
            if (auto n = detail::orbit_hit(twist[i], twist[j], probe, rep.window, tol))
                flag("twist entries " + std::to_string(i + 1) + "," + std::to_string(j + 1) + " collide at shift " +
                     std::to_string(*n));
        }
    return rep;
}

template <class S>
struct BetheEntry {
    std::size_t node = 0;  // 1-based
    S root{0};
    S value{0};          // cleared-denominator residual
    double scale = 0;    // largest cleared term
    double relative = 0; // |value| / scale (0 when value is exactly 0)
    bool computed = true;
    std::string note;
};

struct BetheOptions {
    QQOrientation orientation = QQOrientation::realized;
    TrigBetheForm trig_form = TrigBetheForm::printed;
    double repeat_tol = 1e-8;
};

// Bethe residual per root of every Q_i^+. Shift corners: the two-point
// evaluation of the QQ relation, cross-multiplied. Differential corners: the
// Gaudin equation times all of its denominators.
template <class S>
std::vector<BetheEntry<S>> bethe_residual(const QQData<S>& d, const std::vector<S>& twist, const Corner<S>& corner,
                                          const BetheOptions& opt = {}) {
    if (twist.size() != d.rank + 1) throw invalid_input("bethe_residual: twist length must be rank + 1");
    std::vector<std::vector<S>> rts;
    for (const auto& p : d.q_plus) rts.push_back(p.degree() > 0 ? roots(p) : std::vector<S>{});
    const CartanMatrix cartan{d.rank};
    std::vector<BetheEntry<S>> out;

    for (std::size_t k = 0; k < d.rank; ++k) {
        const auto node = static_cast<std::ptrdiff_t>(k) + 1;
        bool repeated = false;
        for (std::size_t a = 0; a < rts[k].size(); ++a)
            for (std::size_t b = a + 1; b < rts[k].size(); ++b)
                repeated = repeated || nearly_equal(rts[k][a], rts[k][b], opt.repeat_tol);
        std::vector<S> lam_roots = d.lambda[k].degree() > 0 ? roots(d.lambda[k]) : std::vector<S>{};

        for (std::size_t a = 0; a < rts[k].size(); ++a) {
            BetheEntry<S> e;
            e.node = k + 1;
            e.root = rts[k][a];
            if (repeated) {
                e.computed = false;
                e.note = "repeated Bethe roots within the node; residual not computed";
                out.push_back(e);
                continue;
            }
            const S& s = e.root;
            std::vector<S> terms;
            if (corner.is_shift()) {
                const Poly<S>& qp = d.q_plus[k];
                const Poly<S>& lam = d.lambda[k];
                Poly<S> prev = d.plus_or_one(node - 1), next = d.plus_or_one(node + 1);
                const S up = shift_point(s, corner, 1), down = shift_point(s, corner, -1);
                if (opt.orientation == QQOrientation::realized) {
                    terms.push_back(twist[k] * qp(up) * lam(down) * prev(s) * next(down));
                    terms.push_back(twist[k + 1] * qp(down) * lam(s) * prev(up) * next(s));
                } else {
                    terms.push_back(twist[k] * qp(up) * lam(down) * next(s) * prev(down));
                    terms.push_back(twist[k + 1] * qp(down) * lam(s) * next(up) * prev(s));
                }
            } else {
                // Denominator factors: other roots weighted by the Cartan entry,
                // the singularities, and s itself for the trigonometric corner.
                struct Factor {
                    S pole;
                    S weight;
                };
                std::vector<Factor> factors;
                for (std::size_t j = 0; j < d.rank; ++j) {
                    const int aij = cartan(k, j);
                    if (aij == 0) continue;
                    for (std::size_t b = 0; b < rts[j].size(); ++b) {
                        if (j == k && b == a) continue;
                        factors.push_back({rts[j][b], S(static_cast<long long>(-aij))});
                    }
                }
                for (const auto& lr : lam_roots) factors.push_back({lr, S(1)});
                S delta = twist[k + 1] - twist[k];
                if (corner.kind == CornerKind::TrigDiff) {
                    if (opt.trig_form == TrigBetheForm::euler_wronskian) delta -= S(1);
                    factors.push_back({S(0), delta});
                } else {
                    // constant term: delta times every denominator
                    S t = delta;
                    for (const auto& f : factors) t *= s - f.pole;
                    terms.push_back(t);
                }
                for (std::size_t f = 0; f < factors.size(); ++f) {
                    S t = factors[f].weight;
                    for (std::size_t g = 0; g < factors.size(); ++g)
                        if (g != f) t *= s - factors[g].pole;
                    terms.push_back(t);
                }
            }
            S value(0);
            double scale = 0;
            for (const auto& t : terms) {
                value += t;
                scale = std::max(scale, magnitude(t));
            }
            e.value = value;
            e.scale = scale;
            e.relative = is_zero(value) ? 0.0 : magnitude(value) / std::max(scale, 1e-300);
            out.push_back(e);
        }
    }
    return out;
}

}  // namespace opers
