#pragma once

#include "opers/corner.hpp"
#include "opers/lax.hpp"
#include "opers/matrix.hpp"
#include "opers/wronskian.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace opers {

// Which rank-one relation a point satisfies:
//   q:        q M T - T M = u v^T
//   eps:      [M, T] + eps T = u v^T
//   rational: [M, T] + 1 = u v^T
enum class CMLevel { q, eps, rational };

inline const char* to_string(CMLevel l) {
    switch (l) {
        case CMLevel::q: return "q";
        case CMLevel::eps: return "eps";
        case CMLevel::rational: return "rational";
    }
    return "?";
}

template <class S>
struct CMPoint {
    CMLevel level = CMLevel::q;
    DenseMatrix<S> M;
    DenseMatrix<S> T;
    std::vector<S> u;
    std::vector<S> v;
    S deformation{0};  // q or eps; unused at the rational level
};

template <class S>
DenseMatrix<S> rank_one_lhs(const CMPoint<S>& pt) {
    const std::size_t n = pt.M.rows();
    if (!pt.M.square() || pt.T.rows() != n || pt.T.cols() != n || pt.u.size() != n || pt.v.size() != n)
        throw invalid_input("CM point has inconsistent dimensions");
    switch (pt.level) {
        case CMLevel::q: return pt.M * pt.T * pt.deformation - pt.T * pt.M;
        case CMLevel::eps: return commutator(pt.M, pt.T) + pt.T * pt.deformation;
        case CMLevel::rational: return commutator(pt.M, pt.T) + DenseMatrix<S>::identity(n);
    }
    throw invalid_input("unknown CM level");
}

// ||LHS - u v^T||_F / max(||LHS||_F, ||u v^T||_F); zero when both sides vanish.
template <class S>
double rank_one_residual(const CMPoint<S>& pt) {
    const DenseMatrix<S> lhs = rank_one_lhs(pt);
    const DenseMatrix<S> dyad = DenseMatrix<S>::outer(pt.u, pt.v);
    const double scale = std::max(lhs.frobenius(), dyad.frobenius());
    if (scale == 0.0) return 0.0;
    return (lhs - dyad).frobenius() / scale;
}

// q-level point with M = diag(xi), v = 1 and T_ij = u_i / (q xi_i - xi_j). The
// diagonal u_i is fixed so that spec(T) = spec(lax_trs(q, xi, p)):
//   u_i = -q^{1-N} p_i prod_k (xi_i - q xi_k) / prod_{k != i}(xi_i - xi_k).
template <class S>
CMPoint<S> build_T_from_diag(const std::vector<S>& xi, const std::vector<S>& p, const S& q) {
    detail::check_lax_input(xi, p);
    if (is_zero(q)) throw invalid_input("build_T_from_diag requires q != 0");
    const std::size_t n = xi.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (nearly_equal(q * xi[i], xi[j], kTwistTolerance))
                throw invalid_input("q xi_" + std::to_string(i + 1) + " = xi_" + std::to_string(j + 1) +
                                    ": pole in the q-level relation");
    const auto c = detail::vandermonde_weights(xi);
    S qpow(1);
    for (std::size_t k = 1; k < n; ++k) qpow /= q;
    CMPoint<S> pt{CMLevel::q, DenseMatrix<S>::diagonal(xi), DenseMatrix<S>(n, n), std::vector<S>(n),
                  std::vector<S>(n, S(1)), q};
    for (std::size_t i = 0; i < n; ++i) {
        S num = -qpow * p[i];
        for (std::size_t k = 0; k < n; ++k) num *= xi[i] - q * xi[k];
        pt.u[i] = num / c[i];
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) pt.T(i, j) = pt.u[i] / (q * xi[i] - xi[j]);
    return pt;
}

// (q, M, T, u, v) -> (1/q, T, M, -u/q, v); the dyad rescaling keeps the relation exact.
template <class S>
CMPoint<S> mirror_map(const CMPoint<S>& pt) {
    if (pt.level != CMLevel::q) throw invalid_input("mirror_map acts on q-level points");
    if (is_zero(pt.deformation)) throw invalid_input("mirror_map requires q != 0");
    const S qinv = S(1) / pt.deformation;
    std::vector<S> u;
    for (const auto& x : pt.u) u.push_back(-qinv * x);
    return {CMLevel::q, pt.T, pt.M, std::move(u), pt.v, qinv};
}

// The two diagonalization frames of [M, T] + eps T = u v^T.
enum class EpsMode { tCM, rRS };

// tCM mode: T = diag(zeta), M is the tCM Lax matrix in the gauge v = 1, u_i = eps zeta_i
// (off-diagonal m_ij = -eps zeta_i / (zeta_i - zeta_j), isospectral to lax_tcm).
// rRS mode: M = diag(gamma), T_ij = u_i v_j / (gamma_i - gamma_j + eps) with
// u_i v_i = eps p_i prod_{k != i}(gamma_i - gamma_k - eps) / c_i, T isospectral to lax_rrs.
template <class S>
CMPoint<S> epsilon_level(EpsMode mode, const S& eps, const std::vector<S>& twist, const std::vector<S>& p) {
    detail::check_lax_input(twist, p);
    const std::size_t n = twist.size();
    const auto c = detail::vandermonde_weights(twist);
    CMPoint<S> pt{CMLevel::eps, DenseMatrix<S>(n, n), DenseMatrix<S>(n, n), std::vector<S>(n),
                  std::vector<S>(n, S(1)), eps};
    if (mode == EpsMode::tCM) {
        const auto& z = twist;
        pt.T = DenseMatrix<S>::diagonal(z);
        pt.M = lax_tcm(eps, z, p).matrix;  // diagonal is shared with the printed form
        for (std::size_t i = 0; i < n; ++i) {
            pt.u[i] = eps * z[i];
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) pt.M(i, j) = -eps * z[i] / (z[i] - z[j]);
        }
        return pt;
    }

    const auto& g = twist;
    if (is_zero(eps)) throw invalid_input("rRS-mode epsilon level requires eps != 0");
    pt.M = DenseMatrix<S>::diagonal(g);
    bool resonant = false;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && nearly_equal(g[i] - g[j] + eps, S(0), kTwistTolerance)) resonant = true;
    // shifted_c_j = prod_{k != j}(gamma_j - gamma_k - eps)
    std::vector<S> shifted_c(n, S(1));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
            if (k != j) shifted_c[j] *= g[j] - g[k] - eps;
    if (!resonant) {
        for (std::size_t i = 0; i < n; ++i) pt.u[i] = eps * p[i] * shifted_c[i] / c[i];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) pt.T(i, j) = pt.u[i] / (g[i] - g[j] + eps);
        return pt;
    }
    // Resonant twist: v_j = shifted_c_j cancels every pole, so
    // T_ij = -eps p_i / c_i * prod_{k != i, j}(gamma_j - gamma_k - eps) off the diagonal.
    for (std::size_t i = 0; i < n; ++i) {
        pt.u[i] = eps * p[i] / c[i];
        pt.v[i] = shifted_c[i];
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) {
                pt.T(i, i) = pt.u[i] * pt.v[i] / eps;
                continue;
            }
            S prod(1);
            for (std::size_t k = 0; k < n; ++k)
                if (k != i && k != j) prod *= g[j] - g[k] - eps;
            pt.T(i, j) = -pt.u[i] * prod;
        }
    return pt;
}

// m = diag(gamma), t_ij = 1/(gamma_i - gamma_j), t_ii = p_i - sum_{j != i} 1/(gamma_i - gamma_j),
// u = v = 1. t is a diagonal conjugate of lax_rcm(gamma, p).
template <class S>
CMPoint<S> rational_level(const std::vector<S>& gamma, const std::vector<S>& p) {
    detail::check_lax_input(gamma, p);
    const std::size_t n = gamma.size();
    CMPoint<S> pt{CMLevel::rational, DenseMatrix<S>::diagonal(gamma), DenseMatrix<S>(n, n),
                  std::vector<S>(n, S(1)), std::vector<S>(n, S(1)), S(0)};
    for (std::size_t i = 0; i < n; ++i) {
        S sum(0);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) {
                pt.T(i, j) = S(1) / (gamma[i] - gamma[j]);
                sum += pt.T(i, j);
            }
        pt.T(i, i) = p[i] - sum;
    }
    return pt;
}

// (m, t) -> (t, -m) preserves [m, t] + 1 and the dyad.
template <class S>
CMPoint<S> rational_mirror(const CMPoint<S>& pt) {
    if (pt.level != CMLevel::rational) throw invalid_input("rational_mirror acts on rational-level points");
    return {CMLevel::rational, pt.T, pt.M * S(-1), pt.u, pt.v, S(0)};
}

// Conjugates the whole point into the eigenframe of M (which = M) or of T.
// The relation is conjugation invariant with u -> P^{-1} u, v -> P^T v.
enum class CMSlot { M, T };

inline CMPoint<Complex> diagonalize_frame(const CMPoint<Complex>& pt, CMSlot which) {
    const auto ed = eigen_decompose(which == CMSlot::M ? pt.M : pt.T);
    const DenseMatrix<Complex>& P = ed.vectors;
    const DenseMatrix<Complex> Pinv = inverse(P);
    CMPoint<Complex> out = pt;
    out.M = Pinv * pt.M * P;
    out.T = Pinv * pt.T * P;
    const std::size_t n = pt.u.size();
    for (std::size_t i = 0; i < n; ++i) {
        Complex su(0), sv(0);
        for (std::size_t k = 0; k < n; ++k) {
            su += Pinv(i, k) * pt.u[k];
            sv += P(k, i) * pt.v[k];
        }
        out.u[i] = su;
        out.v[i] = sv;
    }
    // clean the diagonalized slot
    DenseMatrix<Complex>& d = which == CMSlot::M ? out.M : out.T;
    d = DenseMatrix<Complex>::diagonal(ed.values);
    return out;
}

// ---------------------------------------------------------------------------
// Degeneration limits across the duality diamond, measured on Hamiltonians.
//
//   QMult -> EpsAdd:   tRS(q = e^{R eps}, xi = zeta, e^{R p}),  (L - 1)/R  ->  tCM(eps, zeta, p)
//   QMult -> TrigDiff: tRS(q = e^{R eps}, xi = e^{R gamma}, p)            ->  rRS(eps, gamma, p)
//   TrigDiff -> RatDiff: rRS(eps = R, gamma, e^{R p}), (L - 1)/R          ->  rCM(gamma, p)
//   EpsAdd -> RatDiff: tCM(eps = R, zeta = e^{R gamma}, p)                ->  rCM(gamma, p)

struct LimitData {
    Complex parameter{1.0};        // eps of the target (ignored for rCM targets)
    std::vector<Complex> twist;    // target twist (zeta or gamma)
    std::vector<Complex> momenta;  // target momenta
};

struct LimitReport {
    CornerKind source = CornerKind::QMult;
    CornerKind target = CornerKind::EpsAdd;
    std::vector<double> R;
    std::vector<double> deviation;
    std::vector<double> order;  // between consecutive R values
    double min_order = 0.0;
    bool roundoff_dominated = false;
    std::vector<std::string> notes;
};

namespace detail {

inline double hamiltonian_deviation(const DenseMatrix<Complex>& a, const DenseMatrix<Complex>& b) {
    const auto ha = hamiltonians(a), hb = hamiltonians(b);
    double worst = 0.0;
    for (std::size_t k = 0; k < ha.size(); ++k)
        worst = std::max(worst, std::abs(ha[k] - hb[k]) / std::max(1.0, std::abs(hb[k])));
    return worst;
}

inline std::vector<Complex> exp_scaled(const std::vector<Complex>& x, double R) {
    std::vector<Complex> out;
    for (auto v : x) out.push_back(std::exp(R * v));
    return out;
}

// (L - 1)/R with the identity subtracted entrywise.
inline DenseMatrix<Complex> linear_part(DenseMatrix<Complex> L, double R) {
    for (std::size_t i = 0; i < L.rows(); ++i) L(i, i) -= 1.0;
    return L * Complex(1.0 / R);
}

}  // namespace detail

inline bool limit_supported(CornerKind source, CornerKind target) {
    return (source == CornerKind::QMult && (target == CornerKind::EpsAdd || target == CornerKind::TrigDiff)) ||
           (target == CornerKind::RatDiff && (source == CornerKind::TrigDiff || source == CornerKind::EpsAdd));
}

inline LimitReport limit_check(CornerKind source, CornerKind target, const LimitData& data,
                               const std::vector<double>& R_sequence = {1e-3, 1e-4}) {
    if (!limit_supported(source, target))
        throw invalid_input("no degeneration limit from " + std::string(corner_name(source)) + " to " +
                            std::string(corner_name(target)));
    if (R_sequence.size() < 2) throw invalid_input("limit_check needs at least two R values");
    for (std::size_t i = 0; i < R_sequence.size(); ++i) {
        if (R_sequence[i] == 0.0 || !std::isfinite(R_sequence[i])) throw invalid_input("R must be finite and nonzero");
        for (std::size_t j = 0; j < i; ++j)
            if (R_sequence[i] == R_sequence[j]) throw invalid_input("R values must be distinct");
    }
    const auto& tw = data.twist;
    const auto& p = data.momenta;
    const Complex eps = data.parameter;

    DenseMatrix<Complex> reference;
    switch (target) {
        case CornerKind::EpsAdd: reference = lax_tcm(eps, tw, p).matrix; break;
        case CornerKind::TrigDiff: reference = lax_rrs(eps, tw, p).matrix; break;
        default: reference = lax_rcm(tw, p).matrix; break;
    }

    LimitReport rep{source, target, R_sequence, {}, {}, 0.0, false, {}};
    constexpr double kUnit = std::numeric_limits<double>::epsilon();
    for (double R : R_sequence) {
        DenseMatrix<Complex> scaled;
        double roundoff = kUnit;  // expected absolute floor of the scaled Hamiltonians
        if (source == CornerKind::QMult && target == CornerKind::EpsAdd) {
            scaled = detail::linear_part(lax_trs(std::exp(R * eps), tw, detail::exp_scaled(p, R)).matrix, R);
            roundoff = kUnit / std::abs(R);
        } else if (source == CornerKind::QMult) {
            scaled = lax_trs(std::exp(R * eps), detail::exp_scaled(tw, R), p).matrix;
            roundoff = kUnit / std::abs(R);  // xi_i / q - xi_m cancels to O(R)
        } else if (source == CornerKind::TrigDiff) {
            scaled = detail::linear_part(lax_rrs(Complex(R), tw, detail::exp_scaled(p, R)).matrix, R);
            roundoff = kUnit / std::abs(R);
        } else {
            scaled = lax_tcm(Complex(R), detail::exp_scaled(tw, R), p).matrix;
            roundoff = kUnit / std::abs(R);
        }
        const double dev = detail::hamiltonian_deviation(scaled, reference);
        rep.deviation.push_back(dev);
        if (dev < 1e3 * roundoff * std::max(1.0, reference.max_abs())) {
            rep.roundoff_dominated = true;
            rep.notes.push_back("deviation at R = " + std::to_string(R) + " is at the roundoff floor");
        }
    }
    for (std::size_t i = 0; i + 1 < rep.R.size(); ++i) {
        const double o = std::log(rep.deviation[i] / rep.deviation[i + 1]) /
                         std::log(std::abs(rep.R[i]) / std::abs(rep.R[i + 1]));
        rep.order.push_back(o);
    }
    rep.min_order = rep.order.empty() ? 0.0 : rep.order.front();
    for (double o : rep.order) rep.min_order = std::min(rep.min_order, o);
    return rep;
}

}  // namespace opers
