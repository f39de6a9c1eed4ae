#pragma once

#include "opers/cmspace.hpp"
#include "opers/elimination.hpp"
#include "opers/energy.hpp"
#include "opers/lax.hpp"
#include "opers/qqbethe.hpp"
#include "opers/wronskian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace opers {

struct SolveConfig {
    std::uint64_t seed = 20240611;
    int starts = 0;                // random Newton starts; 0 selects max(8, 4 N!)
    double tol = 1e-9;             // relative residual accepted as a solution
    int max_iter = 80;             // Newton iterations per start
    double dedupe_radius = 1e-6;   // scaled by (1 + |p|)
    bool homotopy = true;          // gamma-trick continuation from e_k(p) = e_k(a)
    int homotopy_runs = 2;         // independent gammas
    bool certify = true;           // elimination oracle for N <= 3
    bool frame_sweep = false;      // also solve every other twist ordering
};

struct MomentumSolution {
    std::vector<Complex> p;
    double residual = 0;           // relative Hamiltonian residual
    double relation_residual = 0;  // determinant route, relative to max|Lambda coeff|
    bool degenerate = false;
    std::vector<std::string> flags;
    std::vector<std::vector<Complex>> bethe_roots;  // roots of Q_i^+ per node
    std::string origin;                             // "homotopy", "newton" or "elimination"
};

struct SolverStats {
    std::size_t starts = 0;
    std::size_t homotopy_paths = 0;
    std::size_t paths_converged = 0;
    std::size_t newton_converged = 0;
    std::size_t iterations = 0;
    double dedupe_radius = 0;
    double best_residual = std::numeric_limits<double>::infinity();
};

struct Certification {
    bool attempted = false;
    bool conclusive = false;
    bool complete = false;  // numerical and oracle solution sets coincide
    std::string method;
    std::size_t oracle_count = 0;
    std::size_t recovered = 0;  // oracle solutions the numerical search missed
    std::string note;
};

struct FrameSolutions {
    std::vector<std::size_t> perm;  // twist'[i] = twist[perm[i]]
    std::vector<MomentumSolution> solutions;
};

struct SolveReport {
    Corner<Complex> corner = Corner<Complex>::rational();
    std::vector<Complex> twist;
    std::vector<Complex> a;
    std::vector<MomentumSolution> solutions;
    SolverStats stats;
    Certification certification;
    std::vector<FrameSolutions> frames;
    std::vector<std::string> warnings;
};

namespace detail {

inline double vec_norm(const std::vector<Complex>& v) {
    double s = 0;
    for (auto z : v) s = std::max(s, std::abs(z));
    return s;
}

inline bool same_point(const std::vector<Complex>& a, const std::vector<Complex>& b, double radius) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d <= radius * (1.0 + std::max(vec_norm(a), vec_norm(b)));
}

inline Eigen::VectorXcd to_vec(const std::vector<Complex>& v) {
    return Eigen::Map<const Eigen::VectorXcd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<Complex> from_vec(const Eigen::VectorXcd& v) { return {v.data(), v.data() + v.size()}; }

struct NewtonResult {
    bool converged = false;
    std::size_t iterations = 0;
    double residual = 0;
};

// Damped Newton on F; two extra steps after reaching tol to polish.
inline NewtonResult newton(const EnergyRelation<Complex>& rel, std::vector<Complex>& p, int max_iter, double tol) {
    NewtonResult out;
    auto norm_f = [&](const std::vector<Complex>& x) { return to_vec(rel.residual(x)).norm(); };
    int extra = 2;
    for (int it = 0; it < max_iter; ++it) {
        ++out.iterations;
        const auto f = rel.residual(p);
        const double nf = to_vec(f).norm();
        if (rel.relative_residual(p) < tol && extra-- <= 0) break;
        const Eigen::VectorXcd step = to_eigen(rel.jacobian(p)).partialPivLu().solve(to_vec(f));
        if (!step.allFinite()) break;
        double lambda = 1.0;
        std::vector<Complex> trial = p;
        for (int bt = 0; bt < 12; ++bt) {
            for (std::size_t i = 0; i < p.size(); ++i) trial[i] = p[i] - lambda * step(static_cast<Eigen::Index>(i));
            if (norm_f(trial) <= nf || nf == 0.0) break;
            lambda *= 0.5;
        }
        p = trial;
        if (vec_norm(p) > 1e12) break;
        if (step.norm() * lambda < 1e-15 * (1.0 + vec_norm(p))) break;
    }
    out.residual = rel.relative_residual(p);
    out.converged = std::isfinite(out.residual) && out.residual < tol;
    return out;
}

// H(p, t) = (1 - t) gamma G(p) + t F(p) with G_k = e_k(p) - e_k(a).
struct Homotopy {
    const EnergyRelation<Complex>& rel;
    Complex gamma;

    Eigen::VectorXcd G(const std::vector<Complex>& p) const {
        const auto e = elem_sym_all(p);
        Eigen::VectorXcd g(static_cast<Eigen::Index>(p.size()));
        for (std::size_t k = 0; k < p.size(); ++k) g(static_cast<Eigen::Index>(k)) = e[k + 1] - rel.targets[k];
        return g;
    }
    Eigen::MatrixXcd JG(const std::vector<Complex>& p) const {
        const auto n = static_cast<Eigen::Index>(p.size());
        Eigen::MatrixXcd j(n, n);
        for (std::size_t i = 0; i < p.size(); ++i)
            for (std::size_t k = 0; k < p.size(); ++k)
                j(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = partial_sym(p, k, i);
        return j;
    }
    Eigen::VectorXcd H(const std::vector<Complex>& p, double t) const {
        return (1.0 - t) * gamma * G(p) + t * to_vec(rel.residual(p));
    }
    Eigen::MatrixXcd J(const std::vector<Complex>& p, double t) const {
        return (1.0 - t) * gamma * JG(p) + t * to_eigen(rel.jacobian(p));
    }
    // dp/dt = -J^{-1} dH/dt
    Eigen::VectorXcd velocity(const std::vector<Complex>& p, double t) const {
        const Eigen::VectorXcd ht = to_vec(rel.residual(p)) - gamma * G(p);
        return -J(p, t).partialPivLu().solve(ht);
    }
};

// Tracks one path from t = 0 to t = 1 (RK4 predictor, Newton corrector).
inline bool track(const Homotopy& hom, std::vector<Complex>& p) {
    double t = 0.0, h = 0.02;
    int streak = 0;
    auto add = [](const std::vector<Complex>& x, const Eigen::VectorXcd& d, double s) {
        std::vector<Complex> y = x;
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += s * d(static_cast<Eigen::Index>(i));
        return y;
    };
    for (int guard = 0; guard < 20000 && t < 1.0; ++guard) {
        h = std::min(h, 1.0 - t);
        const auto k1 = hom.velocity(p, t);
        const auto k2 = hom.velocity(add(p, k1, h / 2), t + h / 2);
        const auto k3 = hom.velocity(add(p, k2, h / 2), t + h / 2);
        const auto k4 = hom.velocity(add(p, k3, h), t + h);
        std::vector<Complex> q = add(p, (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0, h);
        bool ok = k1.allFinite() && k2.allFinite() && k3.allFinite() && k4.allFinite();
        const double tn = t + h;
        if (ok) {
            ok = false;
            for (int it = 0; it < 4; ++it) {
                const Eigen::VectorXcd d = hom.J(q, tn).partialPivLu().solve(hom.H(q, tn));
                if (!d.allFinite()) break;
                q = add(q, d, -1.0);
                if (d.norm() < 1e-9 * (1.0 + vec_norm(q))) {
                    ok = true;
                    break;
                }
            }
        }
        if (ok && vec_norm(q) < 10.0 * (1.0 + vec_norm(p)) + 1.0) {
            p = std::move(q);
            t = tn;
            if (++streak >= 3) {
                h = std::min(2.0 * h, 0.1);
                streak = 0;
            }
            if (vec_norm(p) > 1e8) return false;  // diverging path
        } else {
            h *= 0.5;
            streak = 0;
            if (h < 1e-10) return false;
        }
    }
    return t >= 1.0;
}

inline std::vector<std::vector<Complex>> permutations_of(const std::vector<Complex>& a) {
    std::vector<std::size_t> idx(a.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::vector<std::vector<Complex>> out;
    do {
        std::vector<Complex> p;
        for (auto i : idx) p.push_back(a[i]);
        out.push_back(std::move(p));
    } while (std::next_permutation(idx.begin(), idx.end()));
    return out;
}

inline std::size_t factorial(std::size_t n) { return n <= 1 ? 1 : n * factorial(n - 1); }

inline bool canonical_less(const std::vector<Complex>& x, const std::vector<Complex>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double tol = 1e-7 * (1.0 + std::abs(x[i]) + std::abs(y[i]));
        if (std::abs(x[i].real() - y[i].real()) > tol) return x[i].real() < y[i].real();
        if (std::abs(x[i].imag() - y[i].imag()) > tol) return x[i].imag() < y[i].imag();
    }
    return false;
}

inline void annotate(MomentumSolution& s, const EnergyRelation<Complex>& rel) {
    s.residual = rel.relative_residual(s.p);
    const Poly<Complex> lambda = Poly<Complex>::from_roots(rel.a);
    auto frame = Frame<Complex>::canonical(rel.corner, rel.twist, s.p);
    const auto rr = relation_residual(frame, lambda);
    double worst = 0;
    for (auto z : rr) worst = std::max(worst, std::abs(z));
    s.relation_residual = worst / std::max(1.0, lambda.max_abs_coeff());
    if (rel.size() < 2) return;
    try {
        const auto d = qq_from_frame(frame);
        for (const auto& q : d.q_plus) s.bethe_roots.push_back(q.degree() > 0 ? roots(q) : std::vector<Complex>{});
        const auto nd = nondegenerate(d, rel.twist, rel.corner);
        s.degenerate = !nd.ok;
        s.flags = nd.violations;
    } catch (const invalid_input& e) {
        s.degenerate = true;
        s.flags.push_back(std::string("Q extraction failed: ") + e.what());
    }
}

// Core solve for one twist ordering.
inline std::vector<MomentumSolution> solve_frame(const EnergyRelation<Complex>& rel, const SolveConfig& cfg,
                                                 SolverStats& stats, std::mt19937_64& gen) {
    const std::size_t n = rel.size();
    std::vector<MomentumSolution> found;
    auto offer = [&](std::vector<Complex> p, const char* origin) {
        for (const auto& s : found)
            if (same_point(s.p, p, cfg.dedupe_radius)) return;
        MomentumSolution s;
        s.p = std::move(p);
        s.origin = origin;
        found.push_back(std::move(s));
    };

    if (cfg.homotopy) {
        const auto starts = permutations_of(rel.a);
        std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
        for (int run = 0; run < cfg.homotopy_runs; ++run) {
            const Homotopy hom{rel, std::polar(1.0, angle(gen))};
            for (const auto& s0 : starts) {
                ++stats.homotopy_paths;
                std::vector<Complex> p = s0;
                if (!track(hom, p)) continue;
                auto nr = newton(rel, p, cfg.max_iter, cfg.tol);
                stats.iterations += nr.iterations;
                stats.best_residual = std::min(stats.best_residual, nr.residual);
                if (nr.converged) {
                    ++stats.paths_converged;
                    offer(p, "homotopy");
                }
            }
        }
    }

    double scale = 1.0;
    for (auto z : rel.a) scale = std::max(scale, std::abs(z));
    const std::size_t starts = cfg.starts > 0 ? static_cast<std::size_t>(cfg.starts)
                                              : std::max<std::size_t>(8, 4 * factorial(n));
    std::uniform_real_distribution<double> logmag(std::log(0.1), std::log(10.0));
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (std::size_t s = 0; s < starts; ++s) {
        ++stats.starts;
        std::vector<Complex> p(n);
        for (auto& z : p) z = std::polar(scale * std::exp(logmag(gen)), angle(gen));
        auto nr = newton(rel, p, cfg.max_iter, cfg.tol);
        stats.iterations += nr.iterations;
        stats.best_residual = std::min(stats.best_residual, nr.residual);
        if (nr.converged) {
            ++stats.newton_converged;
            offer(p, "newton");
        }
    }
    return found;
}

}  // namespace detail

// Distinct roots of a monic Lambda (floating).
inline std::vector<Complex> singularity_roots(const Poly<Complex>& lambda) {
    if (lambda.degree() < 1) throw invalid_input("Lambda must have positive degree");
    if (std::abs(lambda.leading() - 1.0) > 1e-12) throw invalid_input("Lambda must be monic");
    return roots(lambda);
}

inline SolveReport solve_momenta(const Corner<Complex>& corner, const std::vector<Complex>& twist,
                                 const std::vector<Complex>& a, const SolveConfig& cfg = {}) {
    const std::size_t n = twist.size();
    if (n == 0) throw invalid_input("solve_momenta needs N >= 1");
    if (a.size() != n) throw invalid_input("Lambda must have degree N (one root per twist entry)");
    require_distinct(twist, "twist");
    require_distinct(a, "singularity roots");
    if (corner.kind == CornerKind::QMult)
        for (auto x : twist)
            if (std::abs(x) < kTwistTolerance) throw invalid_input("multiplicative twist entries must be nonzero");

    SolveReport rep;
    rep.corner = corner;
    rep.twist = twist;
    rep.a = a;
    rep.stats.dedupe_radius = cfg.dedupe_radius;
    std::mt19937_64 gen(cfg.seed);

    const auto rel = energy_relation(corner, twist, a);
    rep.solutions = detail::solve_frame(rel, cfg, rep.stats, gen);

    if (cfg.certify && n <= 3) {
        rep.certification.attempted = true;
        try {
            const auto oracle = elimination_oracle(exact_energy_relation(corner, twist, a));
            rep.certification.method = oracle.method;
            rep.certification.conclusive = oracle.conclusive;
            rep.certification.note = oracle.note;
            rep.certification.oracle_count = oracle.solutions.size();
            std::size_t matched = 0;
            for (const auto& o : oracle.solutions) {
                bool hit = false;
                for (const auto& s : rep.solutions) hit = hit || detail::same_point(s.p, o, 1e-6);
                if (hit) {
                    ++matched;
                } else {
                    MomentumSolution s;
                    s.p = o;
                    s.origin = "elimination";
                    rep.solutions.push_back(std::move(s));
                    ++rep.certification.recovered;
                }
            }
            rep.certification.complete = oracle.conclusive && rep.certification.recovered == 0 &&
                                         matched == rep.solutions.size();
        } catch (const std::exception& e) {
            rep.certification.note = e.what();
        }
    }

    for (auto& s : rep.solutions) detail::annotate(s, rel);
    std::sort(rep.solutions.begin(), rep.solutions.end(),
              [](const MomentumSolution& x, const MomentumSolution& y) { return detail::canonical_less(x.p, y.p); });
    if (rep.solutions.empty())
        rep.warnings.push_back("no solution found; best relative residual " + std::to_string(rep.stats.best_residual));

    if (cfg.frame_sweep && n > 1) {
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        while (std::next_permutation(perm.begin(), perm.end())) {
            std::vector<Complex> tw;
            for (auto i : perm) tw.push_back(twist[i]);
            const auto r = energy_relation(corner, tw, a);
            FrameSolutions fs{perm, detail::solve_frame(r, cfg, rep.stats, gen)};
            for (auto& s : fs.solutions) detail::annotate(s, r);
            std::sort(fs.solutions.begin(), fs.solutions.end(), [](const auto& x, const auto& y) {
                return detail::canonical_less(x.p, y.p);
            });
            rep.frames.push_back(std::move(fs));
        }
    }
    return rep;
}

inline SolveReport solve_momenta(const Corner<Complex>& corner, const std::vector<Complex>& twist,
                                 const Poly<Complex>& lambda, const SolveConfig& cfg = {}) {
    return solve_momenta(corner, twist, singularity_roots(lambda), cfg);
}

// Exact solution set for N <= 2 (exact_roots reports whether it stayed rational).
inline ExactSolveResult solve_momenta_exact(const Corner<ExactComplex>& corner, const std::vector<ExactComplex>& twist,
                                            const std::vector<ExactComplex>& a) {
    if (a.size() != twist.size()) throw invalid_input("Lambda must have degree N (one root per twist entry)");
    require_distinct(a, "singularity roots");
    auto res = solve_exact_small(energy_relation(corner, twist, a));
    std::sort(res.solutions.begin(), res.solutions.end(), [](const auto& x, const auto& y) {
        std::vector<Complex> cx, cy;
        for (const auto& v : x) cx.push_back(to_complex(v));
        for (const auto& v : y) cy.push_back(to_complex(v));
        return detail::canonical_less(cx, cy);
    });
    return res;
}

// ---------------------------------------------------------------------------
// Quantum/classical check

struct QCEntry {
    std::vector<Complex> p;
    double hamiltonian_residual = 0;
    double qq_residual = 0;
    double bethe_max = 0;
    std::size_t bethe_count = 0;
    bool degenerate = false;
    bool passed = false;
    std::vector<std::string> notes;
};

struct QCRecord {
    std::vector<QCEntry> entries;
    std::size_t nondegenerate = 0;
    std::size_t degenerate = 0;
    bool all_passed = true;
    QQOrientation orientation = QQOrientation::realized;
    TrigBetheForm trig_form = TrigBetheForm::euler_wronskian;
    double tol = 1e-8;
};

inline QCRecord quantum_classical_check(const SolveReport& rep, double tol = 1e-8) {
    QCRecord rec;
    rec.tol = tol;
    const std::size_t n = rep.twist.size();
    const auto target = elem_sym_all(rep.a);
    BetheOptions opt;
    opt.orientation = rec.orientation;
    opt.trig_form = rec.trig_form;
    for (const auto& sol : rep.solutions) {
        QCEntry e;
        e.p = sol.p;
        const auto h = hamiltonians(lax_for_corner(rep.corner, rep.twist, sol.p));
        for (std::size_t k = 0; k < n; ++k)
            e.hamiltonian_residual = std::max(e.hamiltonian_residual,
                                              std::abs(h[k] - target[k + 1]) / std::max(1.0, std::abs(target[k + 1])));
        bool ok = e.hamiltonian_residual < tol;
        if (n >= 2) {
            try {
                const auto frame = Frame<Complex>::canonical(rep.corner, rep.twist, sol.p);
                const auto d = qq_from_frame(frame);
                e.qq_residual = qq_residual(d, rep.twist, rep.corner, rec.orientation).max_relative;
                ok = ok && e.qq_residual < tol;
                const auto nd = nondegenerate(d, rep.twist, rep.corner);
                e.degenerate = !nd.ok;
                e.notes = nd.violations;
                if (!e.degenerate) {
                    for (const auto& b : bethe_residual(d, rep.twist, rep.corner, opt)) {
                        ++e.bethe_count;
                        e.bethe_max = std::max(e.bethe_max, b.computed ? b.relative : 1.0);
                    }
                    ok = ok && e.bethe_max < tol;
                }
            } catch (const invalid_input& ex) {
                e.degenerate = true;
                e.notes.push_back(std::string("QQ data unavailable: ") + ex.what());
            }
        } else {
            e.notes.push_back("N = 1: no QQ or Bethe content");
        }
        e.passed = ok;
        (e.degenerate ? rec.degenerate : rec.nondegenerate)++;
        rec.all_passed = rec.all_passed && ok;
        rec.entries.push_back(std::move(e));
    }
    return rec;
}

// ---------------------------------------------------------------------------
// Mirror self-duality

struct MirrorPair {
    std::size_t primal = 0;
    std::size_t dual = 0;
    std::vector<Complex> predicted;  // dual momenta read off the mirrored CM point
    double mismatch = 0;
    double rank_one = 0;
};

struct MirrorRecord {
    CornerKind corner = CornerKind::QMult;
    std::size_t primal_count = 0;
    std::size_t dual_count = 0;
    std::vector<MirrorPair> pairs;
    double max_mismatch = 0;
    double max_rank_one = 0;
    bool bijection = false;
    bool dual_resonant = false;  // q^{-1} a_i = a_j: the dual Lax chart degenerates
    bool passed = false;
    std::vector<std::string> notes;
    SolveReport primal;
    SolveReport dual;
};

namespace detail {

// Permutation sigma with values[i] ~ targets[sigma[i]], greedy on distance.
inline std::vector<std::size_t> match_values(const std::vector<Complex>& values, const std::vector<Complex>& targets) {
    const std::size_t n = values.size();
    std::vector<std::size_t> sigma(n, n);
    std::vector<bool> used(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j)
            if (!used[j] && std::abs(values[i] - targets[j]) < best) {
                best = std::abs(values[i] - targets[j]);
                sigma[i] = j;
            }
        used[sigma[i]] = true;
    }
    return sigma;
}

// Dual momenta from a point whose M is diagonal, indexed like `targets`.
inline std::vector<Complex> read_dual_momenta(const CMPoint<Complex>& pt, const std::vector<Complex>& targets) {
    const std::size_t n = targets.size();
    const auto m = pt.M.diag();
    const auto sigma = match_values(m, targets);
    std::vector<Complex> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        Complex value;
        if (pt.level == CMLevel::q) {
            // T_ii = p_i q^{1-N} prod_{k != i}(m_i - q m_k) / prod_{k != i}(m_i - m_k)
            const Complex q = pt.deformation;
            Complex num(1), den(1);
            for (std::size_t k = 0; k < n; ++k)
                if (k != i) {
                    num *= m[i] - q * m[k];
                    den *= m[i] - m[k];
                }
            if (std::abs(num) < 1e-12 * (1.0 + std::abs(den)))
                throw invalid_input("dual twist is resonant (q' a_i = a_j): momentum " + std::to_string(i + 1) +
                                    " is not readable from the diagonal");
            value = pt.T(i, i) * std::pow(q, static_cast<double>(n) - 1.0) * den / num;
        } else {
            // t_ii = p_i - sum_{k != i} 1/(m_i - m_k)
            value = pt.T(i, i);
            for (std::size_t k = 0; k < n; ++k)
                if (k != i) value += 1.0 / (m[i] - m[k]);
        }
        out[sigma[i]] = value;
    }
    return out;
}

}  // namespace detail

// Primal (q, xi, a) against dual (1/q, a, xi); rational level: (gamma, a)
// against (a, -gamma) through (m, t) -> (t, -m).
inline MirrorRecord mirror_check(const Corner<Complex>& corner, const std::vector<Complex>& twist,
                                 const std::vector<Complex>& a, const SolveConfig& cfg = {}, double tol = 1e-8) {
    if (corner.kind != CornerKind::QMult && corner.kind != CornerKind::RatDiff)
        throw invalid_input("mirror_check supports the q-multiplicative and rational corners");
    MirrorRecord rec;
    rec.corner = corner.kind;
    rec.primal = solve_momenta(corner, twist, a, cfg);
    Corner<Complex> dual_corner = corner;
    std::vector<Complex> dual_sing = twist;
    if (corner.kind == CornerKind::QMult) {
        dual_corner = Corner<Complex>::qmult(1.0 / corner.parameter);
    } else {
        for (auto& x : dual_sing) x = -x;
    }
    if (corner.kind == CornerKind::QMult)
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < a.size(); ++j)
                if (i != j && std::abs(dual_corner.parameter * a[i] - a[j]) < 1e-10 * (1.0 + std::abs(a[j]))) {
                    rec.dual_resonant = true;
                    rec.notes.push_back("dual twist resonant: a_" + std::to_string(j + 1) + " = q^{-1} a_" +
                                        std::to_string(i + 1) + "; some dual points lie outside the Lax chart");
                }
    rec.dual = solve_momenta(dual_corner, a, dual_sing, cfg);
    rec.primal_count = rec.primal.solutions.size();
    rec.dual_count = rec.dual.solutions.size();
    if (rec.primal_count != rec.dual_count)
        rec.notes.push_back("solution counts differ: " + std::to_string(rec.primal_count) + " vs " +
                            std::to_string(rec.dual_count));

    std::vector<bool> used(rec.dual_count, false);
    bool injective = true;
    for (std::size_t i = 0; i < rec.primal_count; ++i) {
        const auto& p = rec.primal.solutions[i].p;
        MirrorPair pair;
        pair.primal = i;
        try {
            CMPoint<Complex> img;
            if (corner.kind == CornerKind::QMult)
                img = mirror_map(build_T_from_diag(twist, p, corner.parameter));
            else
                img = rational_mirror(rational_level(twist, p));
            pair.rank_one = rank_one_residual(img);
            const auto frame = diagonalize_frame(img, CMSlot::M);
            pair.predicted = detail::read_dual_momenta(frame, a);
        } catch (const invalid_input& e) {
            rec.notes.push_back("primal solution " + std::to_string(i) + ": " + e.what());
            injective = false;
            continue;
        }
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < rec.dual_count; ++j) {
            const auto& q = rec.dual.solutions[j].p;
            double d = 0;
            for (std::size_t k = 0; k < q.size(); ++k)
                d = std::max(d, std::abs(q[k] - pair.predicted[k]) / (1.0 + std::abs(q[k])));
            if (d < best) {
                best = d;
                pair.dual = j;
            }
        }
        pair.mismatch = best;
        if (rec.dual_count == 0 || used[pair.dual]) injective = false;
        if (rec.dual_count > 0) used[pair.dual] = true;
        rec.max_mismatch = std::max(rec.max_mismatch, best);
        rec.max_rank_one = std::max(rec.max_rank_one, pair.rank_one);
        rec.pairs.push_back(std::move(pair));
    }
    rec.bijection = injective && rec.primal_count == rec.dual_count && rec.pairs.size() == rec.primal_count;
    rec.passed = rec.bijection && rec.max_mismatch < tol && rec.max_rank_one < tol;
    return rec;
}

// ---------------------------------------------------------------------------
// Bispectral duality at the eps level

struct BispectralRecord {
    std::vector<Complex> rrs_twist, rrs_momenta;  // gamma, p in the rRS frame
    std::vector<Complex> tcm_twist, tcm_momenta;  // zeta, p in the tCM frame
    double rrs_cross = 0;  // |H(rRS) - e(zeta)|
    double tcm_cross = 0;  // |H(tCM) - e(gamma)|
    double rank_one = 0;
    bool degenerate = false;
    bool passed = false;
    std::vector<std::string> notes;
};

inline BispectralRecord bispectral_check(const Complex& eps, EpsMode mode, const std::vector<Complex>& twist,
                                         const std::vector<Complex>& p, double tol = 1e-8) {
    BispectralRecord rec;
    const std::size_t n = twist.size();
    const auto pt = epsilon_level(mode, eps, twist, p);
    rec.rank_one = rank_one_residual(pt);
    // The non-diagonal slot must have simple spectrum to define the other frame.
    const CMSlot other = mode == EpsMode::rRS ? CMSlot::T : CMSlot::M;
    const auto spec = eigenvalues(other == CMSlot::T ? pt.T : pt.M);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(spec[i] - spec[j]) < 1e-6 * (1.0 + std::abs(spec[i]))) {
                rec.degenerate = true;
                rec.notes.push_back("repeated eigenvalue " + detail::describe(spec[i]) +
                                    ": the dual frame is not diagonalizable");
            }
    if (rec.degenerate) return rec;

    const auto dual = diagonalize_frame(pt, other);
    if (mode == EpsMode::rRS) {
        rec.rrs_twist = twist;
        rec.rrs_momenta = p;
        rec.tcm_twist = dual.T.diag();
        for (std::size_t i = 0; i < n; ++i) {
            Complex s(0);
            for (std::size_t k = 0; k < n; ++k)
                if (k != i) s += 1.0 / (rec.tcm_twist[i] - rec.tcm_twist[k]);
            rec.tcm_momenta.push_back(dual.M(i, i) + eps * rec.tcm_twist[i] * s);
        }
    } else {
        rec.tcm_twist = twist;
        rec.tcm_momenta = p;
        rec.rrs_twist = dual.M.diag();
        const auto& g = rec.rrs_twist;
        for (std::size_t i = 0; i < n; ++i) {
            Complex c(1), sc(1);
            for (std::size_t k = 0; k < n; ++k)
                if (k != i) {
                    c *= g[i] - g[k];
                    sc *= g[i] - g[k] - eps;
                }
            if (std::abs(sc) < 1e-12 * (1.0 + std::abs(c))) {
                rec.degenerate = true;
                rec.notes.push_back("resonant rRS twist: momenta cannot be read from the diagonal");
                return rec;
            }
            rec.rrs_momenta.push_back(dual.T(i, i) * c / sc);
        }
    }
    auto cross = [](const std::vector<Complex>& h, const std::vector<Complex>& levels) {
        const auto e = elem_sym_all(levels);
        double worst = 0;
        for (std::size_t k = 0; k < h.size(); ++k)
            worst = std::max(worst, std::abs(h[k] - e[k + 1]) / std::max(1.0, std::abs(e[k + 1])));
        return worst;
    };
    rec.rrs_cross = cross(hamiltonians(lax_rrs(eps, rec.rrs_twist, rec.rrs_momenta)), rec.tcm_twist);
    rec.tcm_cross = cross(hamiltonians(lax_tcm(eps, rec.tcm_twist, rec.tcm_momenta)), rec.rrs_twist);
    rec.passed = rec.rank_one < tol && rec.rrs_cross < tol && rec.tcm_cross < tol;
    return rec;
}

}  // namespace opers
