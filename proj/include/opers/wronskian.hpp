#pragma once

#include "opers/corner.hpp"
#include "opers/matrix.hpp"
#include "opers/poly.hpp"

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <vector>

namespace opers {

inline constexpr double kTwistTolerance = 1e-10;

template <class S>
void require_distinct(const std::vector<S>& values, const char* what) {
    for (std::size_t i = 0; i < values.size(); ++i)
        for (std::size_t j = i + 1; j < values.size(); ++j)
            if (nearly_equal(values[i], values[j], kTwistTolerance))
                throw invalid_input(std::string(what) + " entries must be pairwise distinct (entries " +
                                    std::to_string(i) + " and " + std::to_string(j) + " collide)");
}

// A Miura frame: ordered twist eigenvalues with matching sections.
template <class S>
struct Frame {
    Corner<S> corner;
    std::vector<S> twist;
    std::vector<Poly<S>> sections;

    Frame(Corner<S> c, std::vector<S> tw, std::vector<Poly<S>> secs)
        : corner(std::move(c)), twist(std::move(tw)), sections(std::move(secs)) {
        if (twist.size() != sections.size()) throw invalid_input("frame needs one section per twist entry");
        if (twist.empty()) throw invalid_input("frame rank must be at least 1");
        require_distinct(twist, "twist");
    }

    // Sections s_i = z - p_i.
    static Frame canonical(Corner<S> c, std::vector<S> tw, const std::vector<S>& momenta) {
        if (momenta.size() != tw.size()) throw invalid_input("momenta and twist lengths differ");
        std::vector<Poly<S>> secs;
        for (const auto& p : momenta) secs.push_back(Poly<S>::linear(p));
        return Frame(std::move(c), std::move(tw), std::move(secs));
    }

    std::size_t rank() const { return twist.size(); }

    bool is_canonical() const {
        return std::all_of(sections.begin(), sections.end(),
                           [](const Poly<S>& s) { return s.degree() == 1 && s.leading() == S(1); });
    }

    std::vector<S> momenta() const {
        if (!is_canonical()) throw invalid_input("momenta are defined for canonical frames only");
        std::vector<S> p;
        for (const auto& s : sections) p.push_back(-s.coeff(0));
        return p;
    }

    // Entry i of the result is entry perm[i] of this frame.
    Frame permuted(const std::vector<std::size_t>& perm) const {
        std::vector<S> tw;
        std::vector<Poly<S>> secs;
        for (auto k : perm) {
            tw.push_back(twist.at(k));
            secs.push_back(sections.at(k));
        }
        return Frame(corner, std::move(tw), std::move(secs));
    }
};

// Square array of polynomials; row_labels records which frame rows it holds.
template <class S>
struct PolyMatrix {
    std::size_t n = 0;
    std::vector<Poly<S>> entries;  // row-major
    std::vector<std::size_t> row_labels;

    PolyMatrix() = default;
    explicit PolyMatrix(std::size_t size) : n(size), entries(size * size) {
        row_labels.resize(size);
        std::iota(row_labels.begin(), row_labels.end(), std::size_t{0});
    }
    Poly<S>& operator()(std::size_t i, std::size_t j) { return entries[i * n + j]; }
    const Poly<S>& operator()(std::size_t i, std::size_t j) const { return entries[i * n + j]; }

    static PolyMatrix from_constant(const DenseMatrix<S>& m) {
        if (!m.square()) throw invalid_input("PolyMatrix must be square");
        PolyMatrix p(m.rows());
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j) p(i, j) = Poly<S>::constant(m(i, j));
        return p;
    }
};

// One application of the corner's step operator with the given twist weight:
// w p(qz), w p(z + eps), p' + w p, or z p' + w p.
template <class S>
Poly<S> step(const Poly<S>& p, const S& weight, const Corner<S>& corner) {
    if (corner.is_shift()) return shift(p, corner) * weight;
    return twisted_derivative(p, weight, corner);
}

// Rows are the selected frame indices; column k holds step^k(s_i).
template <class S>
PolyMatrix<S> minor_matrix(const Frame<S>& frame, const std::vector<std::size_t>& rows) {
    const std::size_t j = rows.size();
    if (j == 0 || j > frame.rank()) throw invalid_input("row subset size must be between 1 and the rank");
    PolyMatrix<S> m(j);
    for (std::size_t t = 0; t < j; ++t) {
        const std::size_t i = rows[t];
        if (i >= frame.rank()) throw invalid_input("row index out of range");
        for (std::size_t u = 0; u < t; ++u)
            if (rows[u] == i) throw invalid_input("row subset contains a repeated index");
        m.row_labels[t] = i;
        Poly<S> cur = frame.sections[i];
        for (std::size_t k = 0; k < j; ++k) {
            m(t, k) = cur;
            if (k + 1 < j) cur = step(cur, frame.twist[i], frame.corner);
        }
    }
    return m;
}

inline std::vector<std::size_t> first_rows(std::size_t j) {
    std::vector<std::size_t> r(j);
    std::iota(r.begin(), r.end(), std::size_t{0});
    return r;
}

// Base b_t with Vandermonde entry (t, k) = b_t^k.
template <class S>
S vandermonde_base(const S& twist, const Corner<S>& corner) {
    switch (corner.kind) {
        case CornerKind::QMult: return corner.parameter * twist;
        case CornerKind::TrigDiff: return S(1) + twist;
        default: return twist;
    }
}

template <class S>
DenseMatrix<S> vandermonde(const std::vector<S>& twist, const Corner<S>& corner) {
    if (twist.empty()) throw invalid_input("vandermonde of an empty twist subset");
    const std::size_t n = twist.size();
    DenseMatrix<S> v(n, n);
    for (std::size_t t = 0; t < n; ++t) {
        const S b = vandermonde_base(twist[t], corner);
        S x(1);
        for (std::size_t k = 0; k < n; ++k) {
            v(t, k) = x;
            x *= b;
        }
    }
    return v;
}

// Closed-form inverse through partial elementary symmetric functions:
// (V^-1)_{k,j} = (-1)^(n-1-k) S_{n-1-k,j}(b) / prod_{l != j}(b_j - b_l), 0-based.
template <class S>
DenseMatrix<S> vandermonde_inverse(const std::vector<S>& twist, const Corner<S>& corner) {
    if (twist.empty()) throw invalid_input("vandermonde of an empty twist subset");
    const std::size_t n = twist.size();
    std::vector<S> b;
    for (const auto& x : twist) b.push_back(vandermonde_base(x, corner));
    require_distinct(b, "vandermonde base");
    DenseMatrix<S> inv(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        S denom(1);
        for (std::size_t l = 0; l < n; ++l)
            if (l != j) denom *= b[j] - b[l];
        for (std::size_t k = 0; k < n; ++k) {
            S s = partial_sym(b, n - 1 - k, j);
            if ((n - 1 - k) % 2) s = -s;
            inv(k, j) = s / denom;
        }
    }
    return inv;
}

namespace detail {

template <class S>
Poly<S> laplace_det(const PolyMatrix<S>& m, std::vector<std::size_t>& cols, std::size_t row) {
    const std::size_t left = cols.size();
    if (left == 1) return m(row, cols[0]);
    Poly<S> acc;
    for (std::size_t c = 0; c < left; ++c) {
        if (m(row, cols[c]).is_zero()) continue;
        std::size_t col = cols[c];
        cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(c));
        Poly<S> minor = laplace_det(m, cols, row + 1);
        cols.insert(cols.begin() + static_cast<std::ptrdiff_t>(c), col);
        Poly<S> term = m(row, col) * minor;
        if (c % 2) acc -= term;
        else acc += term;
    }
    return acc;
}

// Fraction-free (Bareiss) elimination over polynomials.
template <class S>
Poly<S> bareiss_det(PolyMatrix<S> m) {
    const std::size_t n = m.n;
    S sign(1);
    Poly<S> prev = Poly<S>::one();
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m(k, k).is_zero()) {
            std::size_t p = k + 1;
            while (p < n && m(p, k).is_zero()) ++p;
            if (p == n) return {};
            for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                Poly<S> num = m(i, j) * m(k, k) - m(i, k) * m(k, j);
                m(i, j) = divmod(num, prev).quotient;
            }
        prev = m(k, k);
    }
    return m(n - 1, n - 1) * sign;
}

}  // namespace detail

// Cofactor expansion up to 4x4, fraction-free elimination beyond.
template <class S>
Poly<S> det_poly(const PolyMatrix<S>& m) {
    if (m.entries.size() != m.n * m.n) throw invalid_input("det_poly requires a square PolyMatrix");
    if (m.n == 0) return Poly<S>::one();
    if (m.n <= 4 || (!is_exact_v<S> && m.n <= 6)) {
        std::vector<std::size_t> cols = first_rows(m.n);
        return detail::laplace_det(m, cols, 0);
    }
    return detail::bareiss_det(m);
}

template <class S>
std::vector<S> twist_subset(const Frame<S>& frame, const std::vector<std::size_t>& rows) {
    std::vector<S> t;
    for (auto i : rows) t.push_back(frame.twist.at(i));
    return t;
}

// det M_rows / det V_rows.
template <class S>
Poly<S> normalized_minor(const Frame<S>& frame, const std::vector<std::size_t>& rows) {
    const S dv = determinant(vandermonde(twist_subset(frame, rows), frame.corner));
    if (is_zero(dv)) throw invalid_input("vandermonde determinant vanishes (twist collision in the corner)");
    return det_poly(minor_matrix(frame, rows)) / dv;
}

// The full twisted Wronskian divided by det V; monic for canonical frames.
template <class S>
Poly<S> full_determinant(const Frame<S>& frame) {
    return normalized_minor(frame, first_rows(frame.rank()));
}

// Twisted Wronskian of arbitrary polynomials with the given twist weights.
template <class S>
Poly<S> twisted_wronskian(const std::vector<Poly<S>>& polys, const std::vector<S>& twist, const Corner<S>& corner) {
    PolyMatrix<S> m(polys.size());
    for (std::size_t t = 0; t < polys.size(); ++t) {
        Poly<S> cur = polys[t];
        for (std::size_t k = 0; k < polys.size(); ++k) {
            m(t, k) = cur;
            if (k + 1 < polys.size()) cur = step(cur, twist.at(t), corner);
        }
    }
    return det_poly(m);
}

// Max coefficient deviation between W_k and P_1(z) P_2(sz) ... P_k(s^{k-1} z),
// P_i = Lambda_r ... Lambda_{r-i+1}. `lambdas` holds (Lambda_0, Lambda_1, ...,
// Lambda_r): Lambda_1..Lambda_r are the intermediate singularities and
// Lambda_0 is the top singularity, a plain unshifted factor of W_{r+1}. The
// shift is the identity in the differential corners.
template <class S>
double wk_factorization_residual(const std::vector<Poly<S>>& w, const std::vector<Poly<S>>& lambdas,
                                 const Corner<S>& corner) {
    if (lambdas.empty() || w.size() != lambdas.size())
        throw invalid_input("wk_factorization_residual: need r+1 determinants and r+1 singularity polynomials");
    const std::size_t r = lambdas.size() - 1;
    auto shifted = [&](Poly<S> p, std::size_t times) {
        if (corner.is_shift())
            for (std::size_t t = 0; t < times; ++t) p = shift(p, corner);
        return p;
    };
    double worst = 0;
    Poly<S> prod = Poly<S>::one();
    for (std::size_t k = 1; k <= r + 1; ++k) {
        Poly<S> pk = Poly<S>::one();
        for (std::size_t m = r + 1 - k; m <= r; ++m)
            if (m >= 1) pk = pk * lambdas[m];
        prod = prod * shifted(pk, k - 1);
        Poly<S> expected = k == r + 1 ? prod * lambdas[0] : prod;
        worst = std::max(worst, max_coeff_diff(w[k - 1], expected));
    }
    return worst;
}

}  // namespace opers
