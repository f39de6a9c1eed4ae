#include "support/oracles.hpp"

#include <catch_amalgamated.hpp>

using namespace opers;
using oracle::CPoly;
using oracle::Q;
using oracle::XPoly;

TEST_CASE("eval uses Horner on exact and floating coefficients", "[poly]") {
    XPoly p{Q(2), Q(-3), Q(1)};
    CHECK(p(Q(1)) == Q(0));
    CHECK(XPoly{}(Q(7, 3)) == Q(0));
    CHECK(XPoly::linear(Q(2, 5))(Q(4, 5)) == Q(2, 5));
    CPoly f{Complex(2), Complex(-3), Complex(1)};
    CHECK(std::abs(f(Complex(2))) == 0.0);
}

TEST_CASE("trimming keeps the leading coefficient nonzero", "[poly]") {
    XPoly p{Q(1), Q(2), Q(0), Q(0)};
    CHECK(p.degree() == 1);
    CHECK((p - p).is_zero());
    CHECK((p - p).degree() == -1);
    CPoly f{Complex(1), Complex(1), Complex(1e-14)};
    CHECK(f.degree() == 1);
    CPoly g{Complex(1), Complex(1), Complex(1e-9)};
    CHECK(g.degree() == 2);
}

TEST_CASE("shift rescales or translates the argument", "[poly]") {
    auto q2 = Corner<ExactComplex>::qmult(Q(2));
    auto e1 = Corner<ExactComplex>::eps_add(Q(1));
    CHECK(shift(XPoly{Q(1), Q(0), Q(1)}, q2) == XPoly({Q(1), Q(0), Q(4)}));
    CHECK(shift(XPoly{Q(0), Q(1)}, e1) == XPoly({Q(1), Q(1)}));
    CHECK(shift(XPoly{Q(0), Q(0), Q(1)}, e1) == XPoly({Q(1), Q(2), Q(1)}));
    CHECK_THROWS_AS(shift(XPoly{Q(1)}, Corner<ExactComplex>::rational()), invalid_input);
    CHECK_THROWS_AS(shift(XPoly{Q(1)}, Corner<ExactComplex>::trigonometric()), invalid_input);
}

TEST_CASE("additive shift agrees with pointwise evaluation", "[poly]") {
    oracle::Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Complex> c;
        for (int k = 0; k < 7; ++k) c.push_back(rng.complex());
        CPoly p(c);
        Complex eps = rng.complex(2);
        CPoly s = shift(p, Corner<Complex>::eps_add(eps));
        for (int k = 0; k < 5; ++k) {
            Complex z = rng.complex(2);
            CHECK(std::abs(s(z) - p(z + eps)) < 1e-11 * std::max(1.0, std::abs(p(z + eps))));
        }
    }
}

TEST_CASE("q-shift followed by the inverse q-shift is exact", "[poly]") {
    oracle::Rng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<ExactComplex> c;
        for (int k = 0; k < 5; ++k) c.push_back(rng.rational());
        XPoly p(c);
        ExactComplex q = rng.rational();
        if (is_zero(q)) continue;
        auto qc = Corner<ExactComplex>::qmult(q);
        auto back = Corner<ExactComplex>::qmult(Q(1) / q);
        CHECK(shift(shift(p, qc), back) == p);
        CHECK(unshift(shift(p, qc), qc) == p);
    }
}

TEST_CASE("twisted derivative in both differential corners", "[poly]") {
    auto rat = Corner<ExactComplex>::rational();
    auto trig = Corner<ExactComplex>::trigonometric();
    CHECK(twisted_derivative(XPoly{Q(0), Q(1)}, Q(2), rat) == XPoly({Q(1), Q(2)}));
    CHECK(twisted_derivative(XPoly{Q(-3), Q(1)}, Q(1), trig) == XPoly({Q(-3), Q(2)}));
    CHECK(twisted_derivative(XPoly{Q(5)}, Q(0), rat).is_zero());
    CHECK_THROWS_AS(twisted_derivative(XPoly{Q(1)}, Q(1), Corner<ExactComplex>::qmult(Q(2))), invalid_input);
    // (gamma + z d/dz)^k (z - p) = (1 + gamma)^k z - gamma^k p
    XPoly s{Q(-7, 2), Q(1)};
    XPoly cur = s;
    for (unsigned k = 1; k <= 4; ++k) {
        cur = twisted_derivative(cur, Q(3), trig);
        CHECK(cur == XPoly({-power(Q(3), k) * Q(7, 2), power(Q(4), k)}));
    }
}

TEST_CASE("roots: closed forms, companion matrix, and polishing", "[poly]") {
    auto r = roots(XPoly{Q(2), Q(-3), Q(1)});
    REQUIRE(r.size() == 2);
    CHECK(((r[0] == Q(1) && r[1] == Q(2)) || (r[0] == Q(2) && r[1] == Q(1))));
    CHECK(roots(XPoly::linear(Q(2, 5))) == std::vector<ExactComplex>{Q(2, 5)});
    auto c = roots(CPoly{Complex(-6), Complex(11), Complex(-6), Complex(1)});
    std::sort(c.begin(), c.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
    REQUIRE(c.size() == 3);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(c[k] - Complex(k + 1)) < 1e-12);
    CHECK_THROWS_AS(roots(XPoly{}), invalid_input);
    // exact quadratic with Gaussian-rational roots 1+i and 2
    auto g = roots(XPoly::from_roots({ExactComplex(1, 1), Q(2)}));
    CHECK(XPoly::from_roots(g) == XPoly::from_roots({ExactComplex(1, 1), Q(2)}));
}

TEST_CASE("from_roots inverts roots for well-separated random roots", "[poly]") {
    oracle::Rng rng(13);
    for (int trial = 0; trial < 40; ++trial) {
        const int deg = rng.integer(1, 8);
        auto rts = rng.separated(deg, 2.0, 1e-3 + 0.1);
        CPoly p = CPoly::from_roots(rts);
        CPoly back = CPoly::from_roots(roots(p));
        CHECK(oracle::rel_diff(back, p) < 1e-10);
    }
}

TEST_CASE("elementary and partial symmetric functions", "[poly]") {
    std::vector<ExactComplex> x{Q(1), Q(2), Q(3)};
    CHECK(elem_sym(x, 2) == Q(11));
    CHECK(elem_sym(x, 0) == Q(1));
    CHECK(elem_sym(std::vector<ExactComplex>{Q(1), Q(3)}, 2) == Q(3));
    CHECK_THROWS_AS(elem_sym(x, 4), invalid_input);
    std::vector<ExactComplex> y{Q(1), Q(3)};
    // omitted index is 0-based
    CHECK(partial_sym(y, 1, 0) == Q(3));
    CHECK(partial_sym(y, 0, 1) == Q(1));
    CHECK(partial_sym(x, 2, 1) == Q(3));
    CHECK_THROWS_AS(partial_sym(y, 0, 2), invalid_input);
}

TEST_CASE("symmetric functions match subset enumeration and expand the product", "[poly]") {
    oracle::Rng rng(14);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = rng.integer(0, 6);
        std::vector<ExactComplex> x;
        for (std::size_t i = 0; i < n; ++i) x.push_back(rng.rational());
        XPoly prod = XPoly::from_roots(x);
        for (std::size_t k = 0; k <= n; ++k) {
            CHECK(elem_sym(x, k) == oracle::subset_elem_sym(x, k));
            ExactComplex ek = elem_sym(x, k);
            CHECK(prod.coeff(n - k) == ((k % 2) ? -ek : ek));
        }
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 1; k <= n; ++k) {
                ExactComplex lower = partial_sym(x, k - 1, j);
                ExactComplex upper = k <= n - 1 ? partial_sym(x, k, j) : Q(0);
                CHECK(elem_sym(x, k) == upper + x[j] * lower);
            }
    }
}

TEST_CASE("division and exact quotients", "[poly]") {
    XPoly a = XPoly::from_roots({Q(1), Q(2), Q(3)});
    auto [q, r] = divmod(a, XPoly::linear(Q(2)));
    CHECK(r.is_zero());
    CHECK(q == XPoly::from_roots({Q(1), Q(3)}));
    CHECK_THROWS_AS(exact_quotient(a, XPoly::linear(Q(5))), invalid_input);
    CHECK(XPoly({Q(4), Q(-12), Q(8)}).monic() == XPoly({Q(1, 2), Q(-3, 2), Q(1)}));
}
