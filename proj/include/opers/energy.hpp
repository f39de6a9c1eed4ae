#pragma once

#include "opers/corner.hpp"
#include "opers/lax.hpp"
#include "opers/matrix.hpp"
#include "opers/poly.hpp"
#include "opers/wronskian.hpp"

#include <cstdint>
#include <vector>

namespace opers {

// Coefficients z^0..z^{N-1} of the monic normalized full determinant minus Lambda.
template <class S>
std::vector<S> relation_residual(const Frame<S>& frame, const Poly<S>& lambda) {
    if (!frame.is_canonical()) throw invalid_input("relation_residual needs a canonical frame");
    const std::size_t n = frame.rank();
    if (lambda.degree() != static_cast<int>(n)) throw invalid_input("Lambda must have degree N");
    if (!nearly_equal(lambda.leading(), S(1), 1e-12)) throw invalid_input("Lambda must be monic");
    const Poly<S> w = full_determinant(frame);
    std::vector<S> out;
    for (std::size_t k = 0; k < n; ++k) out.push_back(w.coeff(k) - lambda.coeff(k));
    return out;
}

// The N equations H_k(p) - e_k(a) = 0. Every H_k is affine in each single p_i,
// so it is stored as a multilinear table: coeff[k][mask] multiplies the product
// of p_i over the bits of mask.
template <class S>
struct EnergyRelation {
    Corner<S> corner = Corner<S>::rational();
    std::vector<S> twist;
    std::vector<S> a;        // singularity roots
    std::vector<S> targets;  // e_1(a) .. e_N(a)
    std::vector<std::vector<S>> coeff;

    std::size_t size() const { return twist.size(); }

    // Products of p over every mask, built incrementally from the lowest bit.
    std::vector<S> monomials(const std::vector<S>& p) const {
        const std::size_t n = size();
        if (p.size() != n) throw invalid_input("momentum vector has the wrong length");
        std::vector<S> m(std::size_t{1} << n, S(1));
        for (std::size_t mask = 1; mask < m.size(); ++mask) {
            const std::size_t low = static_cast<std::size_t>(__builtin_ctzll(mask));
            m[mask] = m[mask & (mask - 1)] * p[low];
        }
        return m;
    }

    std::vector<S> hamiltonians(const std::vector<S>& p) const {
        const auto m = monomials(p);
        std::vector<S> h(size(), S(0));
        for (std::size_t k = 0; k < size(); ++k)
            for (std::size_t mask = 0; mask < m.size(); ++mask) h[k] += coeff[k][mask] * m[mask];
        return h;
    }

    std::vector<S> residual(const std::vector<S>& p) const {
        auto h = hamiltonians(p);
        for (std::size_t k = 0; k < size(); ++k) h[k] -= targets[k];
        return h;
    }

    // J(k, i) = dH_k / dp_i = sum over masks containing i of coeff * prod_{j in mask, j != i} p_j.
    DenseMatrix<S> jacobian(const std::vector<S>& p) const {
        const std::size_t n = size();
        const auto m = monomials(p);
        DenseMatrix<S> j(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t bit = std::size_t{1} << i;
            for (std::size_t mask = 0; mask < m.size(); ++mask) {
                if (!(mask & bit)) continue;
                const S& mono = m[mask & ~bit];
                for (std::size_t k = 0; k < n; ++k) j(k, i) += coeff[k][mask] * mono;
            }
        }
        return j;
    }

    // max_k |F_k| / (sum_mask |coeff * monomial| + |e_k(a)|)
    double relative_residual(const std::vector<S>& p) const {
        const auto m = monomials(p);
        double worst = 0.0;
        for (std::size_t k = 0; k < size(); ++k) {
            S f = -targets[k];
            double scale = magnitude(targets[k]);
            for (std::size_t mask = 0; mask < m.size(); ++mask) {
                const S term = coeff[k][mask] * m[mask];
                f += term;
                scale += magnitude(term);
            }
            if (!is_zero(f)) worst = std::max(worst, magnitude(f) / std::max(scale, 1e-300));
        }
        return worst;
    }
};

// Builds the table by evaluating the Lax Hamiltonians on the vertices of
// {0,1}^N and applying Moebius inversion over subsets.
template <class S>
EnergyRelation<S> energy_relation(const Corner<S>& corner, const std::vector<S>& twist, const std::vector<S>& a) {
    const std::size_t n = twist.size();
    if (n == 0) throw invalid_input("energy relation needs N >= 1");
    if (a.size() != n) throw invalid_input("need N singularity roots");
    if (n > 12) throw invalid_input("energy relation supports N <= 12");
    require_distinct(twist, "twist");
    EnergyRelation<S> rel;
    rel.corner = corner;
    rel.twist = twist;
    rel.a = a;
    const auto e = elem_sym_all(a);
    rel.targets.assign(e.begin() + 1, e.end());

    const std::size_t masks = std::size_t{1} << n;
    std::vector<std::vector<S>> values(masks);
    for (std::size_t mask = 0; mask < masks; ++mask) {
        std::vector<S> p(n, S(0));
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (std::size_t{1} << i)) p[i] = S(1);
        values[mask] = opers::hamiltonians(lax_for_corner(corner, twist, p));
    }
    rel.coeff.assign(n, std::vector<S>(masks, S(0)));
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<S> f(masks);
        for (std::size_t mask = 0; mask < masks; ++mask) f[mask] = values[mask][k];
        // in-place subset Moebius transform
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t mask = 0; mask < masks; ++mask)
                if (mask & (std::size_t{1} << i)) f[mask] -= f[mask ^ (std::size_t{1} << i)];
        rel.coeff[k] = std::move(f);
    }
    return rel;
}

// Exact copy of a floating relation's inputs (binary fractions are exact rationals).
inline EnergyRelation<ExactComplex> exact_energy_relation(const Corner<Complex>& corner,
                                                          const std::vector<Complex>& twist,
                                                          const std::vector<Complex>& a) {
    Corner<ExactComplex> c{corner.kind, from_complex<ExactComplex>(corner.parameter)};
    std::vector<ExactComplex> tw, ax;
    for (auto x : twist) tw.push_back(from_complex<ExactComplex>(x));
    for (auto x : a) ax.push_back(from_complex<ExactComplex>(x));
    return energy_relation(c, tw, ax);
}

}  // namespace opers
