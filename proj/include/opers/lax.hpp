#pragma once

#include "opers/corner.hpp"
#include "opers/matrix.hpp"
#include "opers/wronskian.hpp"

#include <string>
#include <vector>

namespace opers {

enum class LaxTag { tRS, tCM, rRS, rCM };

inline const char* to_string(LaxTag t) {
    switch (t) {
        case LaxTag::tRS: return "tRS";
        case LaxTag::tCM: return "tCM";
        case LaxTag::rRS: return "rRS";
        case LaxTag::rCM: return "rCM";
    }
    return "?";
}

// Two entrywise forms of the rRS matrix; they differ by diagonal conjugation.
//   standard: denominator prod_{k != i}(gamma_i - gamma_k)
//   variant:  denominator prod_{l != j}(gamma_j - gamma_l)
enum class RrsForm { standard, variant };

template <class S>
struct LaxModel {
    LaxTag tag = LaxTag::tRS;
    DenseMatrix<S> matrix;
    S parameter{0};  // q, eps, or unused
    std::vector<S> twist;
    std::vector<S> momenta;
    std::vector<std::string> warnings;
};

namespace detail {

template <class S>
void check_lax_input(const std::vector<S>& twist, const std::vector<S>& p) {
    if (twist.empty()) throw invalid_input("Lax matrix needs N >= 1");
    if (twist.size() != p.size()) throw invalid_input("twist and momenta lengths differ");
    require_distinct(twist, "twist");
}

// c_i = prod_{k != i}(x_i - x_k)
template <class S>
std::vector<S> vandermonde_weights(const std::vector<S>& x) {
    std::vector<S> c(x.size(), S(1));
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t k = 0; k < x.size(); ++k)
            if (k != i) c[i] *= x[i] - x[k];
    return c;
}

}  // namespace detail

// T_ij = p_i prod_{m != j}(xi_i / q - xi_m) / prod_{l != j}(xi_j - xi_l)
template <class S>
LaxModel<S> lax_trs(const S& q, const std::vector<S>& xi, const std::vector<S>& p) {
    detail::check_lax_input(xi, p);
    if (is_zero(q)) throw invalid_input("tRS Lax matrix requires q != 0");
    const std::size_t n = xi.size();
    const auto c = detail::vandermonde_weights(xi);
    LaxModel<S> L{LaxTag::tRS, DenseMatrix<S>(n, n), q, xi, p, {}};
    for (std::size_t i = 0; i < n; ++i) {
        const S shifted = xi[i] / q;
        for (std::size_t j = 0; j < n; ++j) {
            S num = p[i];
            for (std::size_t m = 0; m < n; ++m)
                if (m != j) num *= shifted - xi[m];
            L.matrix(i, j) = num / c[j];
        }
        for (std::size_t j = 0; j < n; ++j)
            if (j != i && nearly_equal(shifted, xi[j], kTwistTolerance))
                L.warnings.push_back("q^-1 xi_" + std::to_string(i + 1) + " = xi_" + std::to_string(j + 1) +
                                     " (degenerate twist/q configuration)");
    }
    return L;
}

// m_ii = p_i - eps xi_i sum_{k != i} 1/(xi_i - xi_k)
// m_ij = eps xi_i / (xi_i - xi_j) * c_i / c_j
template <class S>
LaxModel<S> lax_tcm(const S& eps, const std::vector<S>& xi, const std::vector<S>& p) {
    detail::check_lax_input(xi, p);
    const std::size_t n = xi.size();
    const auto c = detail::vandermonde_weights(xi);
    LaxModel<S> L{LaxTag::tCM, DenseMatrix<S>(n, n), eps, xi, p, {}};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) {
                S sum(0);
                for (std::size_t k = 0; k < n; ++k)
                    if (k != i) sum += S(1) / (xi[i] - xi[k]);
                L.matrix(i, i) = p[i] - eps * xi[i] * sum;
            } else {
                L.matrix(i, j) = eps * xi[i] / (xi[i] - xi[j]) * c[i] / c[j];
            }
        }
    return L;
}

// T_ij = p_i prod_{k != j}(gamma_i - gamma_k - eps) / denominator (see RrsForm)
template <class S>
LaxModel<S> lax_rrs(const S& eps, const std::vector<S>& gamma, const std::vector<S>& p,
                    RrsForm form = RrsForm::standard) {
    detail::check_lax_input(gamma, p);
    const std::size_t n = gamma.size();
    const auto c = detail::vandermonde_weights(gamma);
    LaxModel<S> L{LaxTag::rRS, DenseMatrix<S>(n, n), eps, gamma, p, {}};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            S num = p[i];
            for (std::size_t k = 0; k < n; ++k)
                if (k != j) num *= gamma[i] - gamma[k] - eps;
            L.matrix(i, j) = num / (form == RrsForm::standard ? c[i] : c[j]);
        }
    return L;
}

// t_ii = p_i - sum_{j != i} 1/(gamma_i - gamma_j);  t_ij = c_i / ((gamma_i - gamma_j) c_j)
template <class S>
LaxModel<S> lax_rcm(const std::vector<S>& gamma, const std::vector<S>& p) {
    detail::check_lax_input(gamma, p);
    const std::size_t n = gamma.size();
    const auto c = detail::vandermonde_weights(gamma);
    LaxModel<S> L{LaxTag::rCM, DenseMatrix<S>(n, n), S(0), gamma, p, {}};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) {
                S sum(0);
                for (std::size_t k = 0; k < n; ++k)
                    if (k != i) sum += S(1) / (gamma[i] - gamma[k]);
                L.matrix(i, i) = p[i] - sum;
            } else {
                L.matrix(i, j) = c[i] / ((gamma[i] - gamma[j]) * c[j]);
            }
        }
    return L;
}

// The Lax matrix paired with a corner's twisted Wronskian: tRS(q), tCM(eps),
// rRS with eps = 1 for the trigonometric corner, rCM for the rational one.
template <class S>
LaxModel<S> lax_for_corner(const Corner<S>& corner, const std::vector<S>& twist, const std::vector<S>& p) {
    switch (corner.kind) {
        case CornerKind::QMult: return lax_trs(corner.parameter, twist, p);
        case CornerKind::EpsAdd: return lax_tcm(corner.parameter, twist, p);
        case CornerKind::TrigDiff: return lax_rrs(S(1), twist, p);
        case CornerKind::RatDiff: return lax_rcm(twist, p);
    }
    throw invalid_input("unknown corner");
}

// H_k = e_k(spectrum), k = 1..N, from the Faddeev-LeVerrier characteristic
// polynomial det(z - L) = sum_k (-1)^k H_k z^{N-k}.
template <class S>
std::vector<S> hamiltonians(const DenseMatrix<S>& m) {
    const Poly<S> cp = char_poly(m);
    const std::size_t n = m.rows();
    std::vector<S> h;
    for (std::size_t k = 1; k <= n; ++k) {
        S c = cp.coeff(n - k);
        h.push_back((k % 2) ? S(-c) : c);
    }
    return h;
}

template <class S>
std::vector<S> hamiltonians(const LaxModel<S>& L) {
    return hamiltonians(L.matrix);
}

// Cross-check route: e_k of the numerically computed eigenvalues.
template <class S>
std::vector<Complex> hamiltonians_from_spectrum(const DenseMatrix<S>& m) {
    auto e = elem_sym_all(eigenvalues(m));
    return std::vector<Complex>(e.begin() + 1, e.end());
}

// Coefficients (z^0..z^{N-1}) of the monic polynomial with e_k(a) = h_k.
template <class S>
Poly<S> poly_from_hamiltonians(const std::vector<S>& h) {
    const std::size_t n = h.size();
    std::vector<S> c(n + 1, S(0));
    c[n] = S(1);
    for (std::size_t k = 1; k <= n; ++k) c[n - k] = (k % 2) ? S(-h[k - 1]) : h[k - 1];
    return Poly<S>(std::move(c));
}

}  // namespace opers
