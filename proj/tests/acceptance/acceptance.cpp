// Acceptance driver: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "support/oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

using namespace opers;
using oracle::Q;
using CVec = std::vector<Complex>;
using XVec = std::vector<ExactComplex>;
using XPoly = oracle::XPoly;
using CPoly = oracle::CPoly;

namespace {

struct Verdict {
    bool passed = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            passed = false;
            detail << " [failed: " << what << "]";
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

constexpr CornerKind kAllCorners[] = {CornerKind::QMult, CornerKind::EpsAdd, CornerKind::TrigDiff,
                                      CornerKind::RatDiff};

Corner<Complex> random_corner(oracle::Rng& rng, CornerKind kind) {
    switch (kind) {
        case CornerKind::QMult: return Corner<Complex>::qmult(std::polar(rng.uniform(0.6, 1.6), rng.uniform(0.3, 2.8)));
        case CornerKind::EpsAdd: return Corner<Complex>::eps_add(rng.complex() + Complex(0.5, 0.2));
        case CornerKind::TrigDiff: return Corner<Complex>::trigonometric();
        case CornerKind::RatDiff: return Corner<Complex>::rational();
    }
    return Corner<Complex>::rational();
}

CVec random_momenta(oracle::Rng& rng, std::size_t n, double scale = 2.0) {
    CVec p;
    for (std::size_t i = 0; i < n; ++i) p.push_back(rng.complex(scale));
    return p;
}

XVec random_exact(oracle::Rng& rng, std::size_t n) {
    XVec p;
    for (std::size_t i = 0; i < n; ++i) p.push_back(rng.rational());
    return p;
}

// Twist for solver runs: separated, and for QMult free of q-collisions q xi_i = xi_j.
struct Dataset {
    Corner<Complex> corner = Corner<Complex>::rational();
    CVec twist, a;
};

Dataset random_dataset(oracle::Rng& rng, CornerKind kind, std::size_t n) {
    Dataset d;
    if (kind == CornerKind::QMult) {
        d.corner = Corner<Complex>::qmult(std::polar(rng.uniform(0.6, 1.6), rng.uniform(-1.0, 1.0)));
        for (;;) {
            d.twist = rng.separated(n, 1.5, 0.4);
            for (auto& x : d.twist) x += 2.0;
            bool clash = false;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    clash = clash || (i != j && std::abs(d.corner.parameter * d.twist[i] - d.twist[j]) < 0.2);
            if (!clash) break;
        }
    } else {
        d.corner = kind == CornerKind::EpsAdd ? Corner<Complex>::eps_add(rng.complex(1.0) + 0.5) : random_corner(rng, kind);
        d.twist = rng.separated(n, 1.5, 0.4);
    }
    d.a = rng.separated(n, 2.0, 0.4);
    return d;
}

bool same_solution_set(const std::vector<CVec>& x, const std::vector<CVec>& y, double tol) {
    if (x.size() != y.size()) return false;
    std::vector<bool> used(y.size(), false);
    for (const auto& u : x) {
        bool hit = false;
        for (std::size_t j = 0; j < y.size() && !hit; ++j) {
            if (used[j]) continue;
            double d = 0;
            for (std::size_t k = 0; k < u.size(); ++k) d = std::max(d, std::abs(u[k] - y[j][k]) / (1 + std::abs(u[k])));
            if (d < tol) hit = used[j] = true;
        }
        if (!hit) return false;
    }
    return true;
}

std::vector<CVec> points(const SolveReport& r) {
    std::vector<CVec> out;
    for (const auto& s : r.solutions) out.push_back(s.p);
    return out;
}

QQData<ExactComplex> sl2_data(const XPoly& qp, const XPoly& lambda) {
    QQData<ExactComplex> d;
    d.rank = 1;
    d.q_plus = {qp};
    d.q_minus = {XPoly::one()};
    d.lambda = {lambda};
    d.plus_scale = d.minus_scale = d.lambda_scale = {Q(1)};
    return d;
}

// ---------------------------------------------------------------------------

void spectral_oracle(Verdict& v) {
    oracle::Rng rng(1001);
    double worst = 0;
    int frames = 0;
    for (auto kind : kAllCorners)
        for (int trial = 0; trial < 50; ++trial) {
            const std::size_t n = 2 + static_cast<std::size_t>(trial % 4);
            auto corner = random_corner(rng, kind);
            auto tw = rng.separated(n, 1.5, 0.25);
            if (kind == CornerKind::QMult)
                for (auto& x : tw) x += 2.0;
            const auto p = random_momenta(rng, n);
            const auto w = full_determinant(Frame<Complex>::canonical(corner, tw, p));
            const auto cp = char_poly(lax_for_corner(corner, tw, p).matrix);
            worst = std::max(worst, oracle::rel_diff(cp, w));
            ++frames;
        }
    v.detail << frames << " frames, N 2..5, worst relative " << worst;
    v.require(worst < 1e-9, "relative 1e-9");
}

void qq_from_minors(Verdict& v) {
    oracle::Rng rng(1002);
    double worst = 0;
    int exact_ok = 0, exact_total = 0, exact_skipped = 0;
    for (auto kind : kAllCorners) {
        for (int trial = 0; trial < 50; ++trial) {
            const std::size_t n = 2 + static_cast<std::size_t>(trial % 4);
            auto corner = random_corner(rng, kind);
            auto tw = rng.separated(n, 2.0, 0.3);
            Frame<Complex> f = Frame<Complex>::canonical(corner, tw, random_momenta(rng, n));
            worst = std::max(worst, qq_residual(qq_from_frame(f), f.twist, f.corner).max_relative);
        }
        Corner<ExactComplex> c{kind, kind == CornerKind::QMult ? Q(3, 2) : Q(2, 3)};
        for (int trial = 0; trial < 50; ++trial) {
            const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
            auto tw = rng.distinct_rationals(n);
            QQData<ExactComplex> d;
            try {
                d = qq_from_frame(Frame<ExactComplex>::canonical(c, tw, random_exact(rng, n)));
            } catch (const invalid_input&) {
                ++exact_skipped;  // an intermediate minor vanished identically
                continue;
            }
            ++exact_total;
            const auto r = qq_residual(d, tw, c);
            if (std::all_of(r.residual.begin(), r.residual.end(), [](const XPoly& p) { return p.is_zero(); }))
                ++exact_ok;
        }
    }
    v.detail << "floating 200 frames worst " << worst << "; exact " << exact_ok << "/" << exact_total
             << " identically zero (" << exact_skipped << " degenerate frames skipped)";
    v.require(worst < 1e-9, "floating < 1e-9");
    v.require(exact_ok == exact_total, "exact residual zero");
    v.require(exact_total >= 180, "enough nondegenerate exact frames");
}

void worked_trs(Verdict& v) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = solve_momenta(Corner<Complex>::qmult(2.0), CVec{1.0, 3.0}, CVec{1.0, 2.0});
    const double float_seconds = seconds_since(t0);
    const auto t1 = std::chrono::steady_clock::now();
    const auto ex = solve_momenta_exact(Corner<ExactComplex>::qmult(Q(2)), {Q(1), Q(3)}, {Q(1), Q(2)});
    const double exact_seconds = seconds_since(t1);

    v.require(same_solution_set(points(rep), {{0.4, 10.0}, {2.0, 2.0}}, 1e-9), "floating set");
    v.require(ex.conclusive && ex.solutions.size() == 2, "exact count");
    if (ex.solutions.size() == 2) {
        v.require(ex.solutions[0] == XVec{Q(2, 5), Q(10)} && ex.solutions[1] == XVec{Q(2), Q(2)}, "exact set");
    }

    // Both sides of the sl(2) XXZ equation at the root, evaluated by hand:
    //   (xi_1/xi_2) Q(q s)/Q(s/q)   and   -Lambda(s)/Lambda(s/q)
    const auto xframe = Frame<ExactComplex>::canonical(Corner<ExactComplex>::qmult(Q(2)), {Q(1), Q(3)}, {Q(2, 5), Q(10)});
    const auto data = qq_from_frame(xframe);
    const XPoly& qp = data.q_plus[0];
    const XPoly lambda = XPoly::from_roots({Q(1), Q(2)});
    const ExactComplex s = roots(qp).at(0);
    const ExactComplex lhs = (Q(1) / Q(3)) * qp(Q(2) * s) / qp(s / Q(2));
    const ExactComplex rhs = -lambda(s) / lambda(s / Q(2));
    v.require(s == Q(2, 5), "exact Bethe root 2/5");
    v.require(lhs == Q(-2, 3) && rhs == Q(-2, 3), "exact sides -2/3");
    const auto bethe = bethe_residual(data, xframe.twist, xframe.corner);
    v.require(bethe.size() == 1 && bethe[0].value == Q(0), "exact cleared residual");

    double float_gap = 1;
    bool flagged = false, clean = false;
    for (const auto& sol : rep.solutions) {
        if (std::abs(sol.p[0] - 0.4) < 1e-6) {
            clean = !sol.degenerate;
            if (!sol.bethe_roots.empty() && sol.bethe_roots[0].size() == 1) {
                const Complex r = sol.bethe_roots[0][0];
                const auto fq = [&](Complex z) { return z - r; };
                const auto fl = [](Complex z) { return (z - 1.0) * (z - 2.0); };
                const Complex l = (1.0 / 3.0) * fq(2.0 * r) / fq(r / 2.0);
                const Complex rr = -fl(r) / fl(r / 2.0);
                float_gap = std::max(std::abs(l + 2.0 / 3.0), std::abs(rr + 2.0 / 3.0));
            }
        }
        if (std::abs(sol.p[0] - 2.0) < 1e-6) flagged = sol.degenerate;
    }
    const auto qc = quantum_classical_check(rep);
    v.require(float_gap < 1e-10, "floating sides -2/3 within 1e-10");
    v.require(clean, "(2/5,10) nondegenerate");
    v.require(flagged, "(2,2) flagged degenerate");
    v.require(qc.all_passed && qc.degenerate == 1 && qc.nondegenerate == 1, "quantum/classical check");
    v.require(float_seconds < 1.0 && exact_seconds < 1.0, "runtime < 1 s");
    v.detail << "{(2/5,10),(2,2)} exact and floating; sides -2/3 (floating gap " << float_gap
             << "); (2,2) degenerate=" << flagged << "; " << float_seconds << " s floating, " << exact_seconds
             << " s exact";
}

void worked_tcm_rrs(Verdict& v) {
    const auto tcm = solve_momenta(Corner<Complex>::eps_add(1.0), CVec{1.0, 3.0}, CVec{1.0, 2.0});
    const auto rrs = solve_momenta(Corner<Complex>::trigonometric(), CVec{0.0, 1.0}, CVec{1.0, 2.0});
    v.require(same_solution_set(points(tcm), {{0.0, 4.0}, {2.0, 2.0}}, 1e-9), "floating tCM set");
    v.require(same_solution_set(points(rrs), {{1.5, 4.0 / 3.0}}, 1e-9), "floating rRS set");
    const auto xt = solve_momenta_exact(Corner<ExactComplex>::eps_add(Q(1)), {Q(1), Q(3)}, {Q(1), Q(2)});
    const auto xr = solve_momenta_exact(Corner<ExactComplex>::trigonometric(), {Q(0), Q(1)}, {Q(1), Q(2)});
    v.require(xt.conclusive && xt.solutions == std::vector<XVec>{{Q(0), Q(4)}, {Q(2), Q(2)}}, "exact tCM set");
    v.require(xr.conclusive && xr.solutions == std::vector<XVec>{{Q(3, 2), Q(4, 3)}}, "exact rRS set");
    v.detail << "tCM " << tcm.solutions.size() << " solutions, rRS " << rrs.solutions.size()
             << " solution; exact sets match";
}

void bilinear_identity(Verdict& v) {
    oracle::Rng rng(1005);
    int exact_bad = 0;
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const CornerKind kind = trial % 2 ? CornerKind::TrigDiff : CornerKind::RatDiff;
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 4);
        auto tw = rng.distinct_rationals(n + 1);
        std::vector<XPoly> s;
        for (std::size_t i = 0; i <= n; ++i) {
            XVec c = random_exact(rng, static_cast<std::size_t>(rng.integer(1, 4)));
            if (is_zero(c.back())) c.back() = Q(1);
            s.push_back(XPoly(c));
        }
        // exact
        {
            Corner<ExactComplex> c{kind, Q(0)};
            auto head = [&](std::size_t k) { return std::vector<XPoly>(s.begin(), s.begin() + k); };
            auto head_tw = [&](std::size_t k) { return XVec(tw.begin(), tw.begin() + k); };
            auto swapped = head(n);
            swapped.back() = s[n];
            auto swapped_tw = head_tw(n);
            swapped_tw.back() = tw[n];
            const XPoly lhs = twisted_wronskian<ExactComplex>(
                {twisted_wronskian(head(n), head_tw(n), c), twisted_wronskian(swapped, swapped_tw, c)}, {tw[n - 1], tw[n]}, c);
            const XPoly rhs = twisted_wronskian(head(n - 1), head_tw(n - 1), c) * twisted_wronskian(s, tw, c);
            if (!(lhs == rhs)) ++exact_bad;
        }
        // floating, same instance
        {
            Corner<Complex> c{kind, Complex(0)};
            std::vector<CPoly> cs;
            for (const auto& p : s) {
                CVec coeffs;
                for (std::size_t k = 0; k <= static_cast<std::size_t>(p.degree()); ++k)
                    coeffs.push_back(to_complex(p.coeff(k)));
                cs.push_back(CPoly(coeffs));
            }
            const auto ctw = oracle::to_complexes(tw);
            auto head = [&](std::size_t k) { return std::vector<CPoly>(cs.begin(), cs.begin() + k); };
            auto head_tw = [&](std::size_t k) { return CVec(ctw.begin(), ctw.begin() + k); };
            auto swapped = head(n);
            swapped.back() = cs[n];
            auto swapped_tw = head_tw(n);
            swapped_tw.back() = ctw[n];
            const CPoly lhs = twisted_wronskian<Complex>(
                {twisted_wronskian(head(n), head_tw(n), c), twisted_wronskian(swapped, swapped_tw, c)}, {ctw[n - 1], ctw[n]}, c);
            const CPoly rhs = twisted_wronskian(head(n - 1), head_tw(n - 1), c) * twisted_wronskian(cs, ctw, c);
            worst = std::max(worst, max_coeff_diff(lhs, rhs) / std::max(1.0, rhs.max_abs_coeff()));
        }
    }
    v.detail << "100 instances (rational and z d/dz), n 1..4, deg <= 3: exact mismatches " << exact_bad
             << ", floating worst " << worst;
    v.require(exact_bad == 0, "exact zero");
    v.require(worst < 1e-9, "floating < 1e-9");
}

void rank_one_suite(Verdict& v) {
    oracle::Rng rng(1006);
    double q_worst = 0, eps_worst = 0, rat_worst = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 5);
        auto tw = rng.separated(n, 1.5, 0.25);
        const auto p = random_momenta(rng, n);
        auto shifted = tw;
        for (auto& x : shifted) x += 2.0;
        const Complex q = std::polar(rng.uniform(0.6, 1.6), rng.uniform(0.3, 2.8));
        const auto qpt = build_T_from_diag(shifted, p, q);
        q_worst = std::max({q_worst, rank_one_residual(qpt), rank_one_residual(mirror_map(qpt))});
        const Complex eps = rng.complex() + Complex(0.5, 0.0);
        eps_worst = std::max({eps_worst, rank_one_residual(epsilon_level(EpsMode::tCM, eps, tw, p)),
                              rank_one_residual(epsilon_level(EpsMode::rRS, eps, tw, p))});
        const auto rpt = rational_level(tw, p);
        rat_worst = std::max({rat_worst, rank_one_residual(rpt), rank_one_residual(rational_mirror(rpt))});
    }
    v.detail << "50 inputs per level, N 1..5: q " << q_worst << ", eps " << eps_worst << ", rational " << rat_worst;
    v.require(std::max({q_worst, eps_worst, rat_worst}) < 1e-10, "normalized residual < 1e-10");
}

void mirror_duality(Verdict& v) {
    oracle::Rng rng(1007);
    int q_pass = 0, r_pass = 0, rat_level_pass = 0;
    double worst = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
        auto d = random_dataset(rng, CornerKind::QMult, n);
        for (auto& x : d.a) x += 3.0;  // the dual twist must avoid 0
        const auto rec = mirror_check(d.corner, d.twist, d.a);
        if (rec.passed && rec.primal_count == rec.dual_count) ++q_pass;
        worst = std::max(worst, rec.max_mismatch);
    }
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
        const auto d = random_dataset(rng, CornerKind::RatDiff, n);
        const auto rec = mirror_check(d.corner, d.twist, d.a);
        if (rec.passed && rec.primal_count == rec.dual_count) ++r_pass;
        worst = std::max(worst, rec.max_mismatch);

        // (m, t) -> (t, -m) keeps [m, t] + 1 rank one, exactly
        auto g = rng.distinct_rationals(n);
        const auto pt = rational_level(g, random_exact(rng, n));
        const auto m = rational_mirror(pt);
        if (rank_one_lhs(m) == DenseMatrix<ExactComplex>::outer(m.u, m.v) && m.M == pt.T && m.T == pt.M * Q(-1))
            ++rat_level_pass;
    }
    v.detail << "tRS " << q_pass << "/20, rCM " << r_pass << "/20, exact rational-level " << rat_level_pass
             << "/20; worst momentum mismatch " << worst;
    v.require(q_pass == 20 && r_pass == 20 && rat_level_pass == 20, "all datasets");
    v.require(worst < 1e-8, "mismatch < 1e-8");
}

void limits(Verdict& v) {
    oracle::Rng rng(1008);
    const std::vector<std::pair<CornerKind, CornerKind>> edges{{CornerKind::QMult, CornerKind::EpsAdd},
                                                               {CornerKind::EpsAdd, CornerKind::RatDiff},
                                                               {CornerKind::TrigDiff, CornerKind::RatDiff}};
    double lowest = 1e300;
    int runs = 0, good = 0;
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
        LimitData d{rng.complex() + Complex(0.8, 0.0), rng.separated(n, 1.0, 0.3), random_momenta(rng, n, 1.0)};
        for (auto [s, t] : edges) {
            const auto rep = limit_check(s, t, d, {1e-3, 1e-4});
            ++runs;
            lowest = std::min(lowest, rep.min_order);
            if (rep.min_order >= 0.9 && !rep.roundoff_dominated) ++good;
        }
    }
    v.detail << "10 datasets x {tRS->tCM, tCM->rCM, rRS->rCM}, R 1e-3 -> 1e-4: " << good << "/" << runs
             << " runs, lowest order " << lowest;
    v.require(good == runs, "order >= 0.9 everywhere");
}

void gaudin_spots(Verdict& v) {
    const auto r = bethe_residual(sl2_data(XPoly::linear(Q(-1)), XPoly::linear(Q(0))), {Q(0), Q(1)},
                                  Corner<ExactComplex>::rational());
    const auto t = bethe_residual(sl2_data(XPoly::linear(Q(1)), XPoly::linear(Q(2))), {Q(0), Q(1)},
                                  Corner<ExactComplex>::trigonometric());
    v.require(r.size() == 1 && r[0].computed && r[0].value == Q(0), "rational s = -1");
    v.require(t.size() == 1 && t[0].computed && t[0].value == Q(0), "trigonometric s = 1");
    // the Gaudin equations themselves, summed by hand
    const ExactComplex rat_lhs = (Q(1) - Q(0)) + Q(1) / (Q(-1) - Q(0));
    const ExactComplex trig_lhs = Q(1) / Q(1) + Q(1) / (Q(1) - Q(2));
    v.require(rat_lhs == Q(0) && trig_lhs == Q(0), "hand sums");
    v.detail << "rational root -1 and trigonometric root 1: cleared residuals exactly 0";
}

void weyl_covariance(Verdict& v) {
    oracle::Rng rng(1010);
    int good = 0, total = 0;
    for (auto kind : kAllCorners)
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
            const auto d = random_dataset(rng, kind, n);
            SolveConfig cfg;
            cfg.frame_sweep = true;
            const auto rep = solve_momenta(d.corner, d.twist, d.a, cfg);
            bool ok = rep.frames.size() + 1 == detail::factorial(n);
            for (const auto& fs : rep.frames) {
                std::vector<CVec> moved, got;
                for (const auto& s : rep.solutions) {
                    CVec p;
                    for (auto i : fs.perm) p.push_back(s.p[i]);
                    moved.push_back(p);
                }
                for (const auto& s : fs.solutions) got.push_back(s.p);
                ok = ok && same_solution_set(got, moved, 1e-8);
            }
            ++total;
            if (ok) ++good;
        }
    v.detail << good << "/" << total << " datasets (20 per corner, N 2..4): every frame's set is the permuted identity set";
    v.require(good == total, "bijection in every frame");
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<void(Verdict&)>>> criteria{
        {"spectral oracle, four corners", spectral_oracle},
        {"QQ-system from minors", qq_from_minors},
        {"worked tRS dataset", worked_trs},
        {"worked tCM and rRS datasets", worked_tcm_rrs},
        {"twisted-Wronskian bilinear identity", bilinear_identity},
        {"rank-one suite", rank_one_suite},
        {"mirror self-duality", mirror_duality},
        {"degeneration limits", limits},
        {"Gaudin Bethe spot checks", gaudin_spots},
        {"Weyl covariance", weyl_covariance},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].second(v);
        } catch (const std::exception& e) {
            v.passed = false;
            v.detail << " [exception: " << e.what() << "]";
        }
        if (!v.passed) ++failures;
        std::printf("criterion %2zu %s  %s: %s (%.2f s)\n", i + 1, v.passed ? "PASS" : "FAIL", criteria[i].first,
                    v.detail.str().c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
