#include <cmath>

#include "doctest.h"
#include "ghft/convergence.hpp"
#include "ghft/dirac.hpp"
#include "helpers.hpp"

using namespace ghft;
using ghft::test::cell_source;
using ghft::test::frw;
using ghft::test::minkowski;

TEST_CASE("clifford relations hold exactly") {
    GammaRep g = GammaRep::chiral();
    CliffordReport r = clifford_check(g);
    CHECK(r.all_pass());
    CHECK(r.checks.size() == 16 + 4 + 4 + 1 + 10);
    Mat4 g00 = g.lower[0] * g.lower[0] + g.lower[0] * g.lower[0];
    CHECK(g00 == GaussRat(2) * Mat4::identity());
    Mat4 g11 = g.lower[1] * g.lower[1] + g.lower[1] * g.lower[1];
    CHECK(g11 == GaussRat(-2) * Mat4::identity());
    CHECK(g.lower[0] * g.slash({1, 0, 0, 0}) == Mat4::identity());
}

TEST_CASE("a broken representation is reported") {
    GammaRep g = GammaRep::chiral();
    g.lower[2] = GaussRat(2) * g.lower[2];
    CliffordReport r = clifford_check(g);
    CHECK_FALSE(r.all_pass());
    CHECK(r.failures() > 0);
}

TEST_CASE("pointwise adjunction and charge conjugation") {
    GammaRep g = GammaRep::chiral();
    Xorshift64 rng(3);
    for (int t = 0; t < 20; ++t) {
        Spinor4 s, w;
        for (int c = 0; c < 4; ++c) {
            s[c] = GaussRat(Rational(rng.integer(-9, 9), rng.integer(1, 5)), Rational(rng.integer(-9, 9), 7));
            w[c] = GaussRat(rng.integer(-9, 9), rng.integer(-9, 9));
        }
        CHECK(adjunction(g, adjunction_inverse(g, w)) == w);
        CHECK(adjunction_inverse(g, adjunction(g, s)) == s);
        Spinor4 is;
        for (int c = 0; c < 4; ++c) is[c] = I_unit * s[c];
        Spinor4 a = adjunction(g, s), ai = adjunction(g, is);
        for (int c = 0; c < 4; ++c) CHECK(ai[c] == -(I_unit * a[c]));
        Spinor4 lhs = adjunction(g, charge_conj_s(g, s)), rhs = charge_conj_c(g, adjunction(g, s));
        for (int c = 0; c < 4; ++c) CHECK(lhs[c] == -rhs[c]);
    }
}

TEST_CASE("coframe on minkowski and frw") {
    auto M = minkowski(16, 16, 1.0 / 16, 1.0 / 16);
    CoframeData cm = build_coframe(M);
    CHECK(cm.metric_error() == 0.0);
    for (double g : cm.christoffel) CHECK(g == 0.0);
    for (double r : cm.curvature) CHECK(r == 0.0);

    auto F = frw(32, 16, 1.0 / 32, 1.0 / 16, Profile::cosh_scale(1.3));
    CoframeData cf = build_coframe(F);
    CHECK(cf.metric_error() <= 1e-10);
    CHECK(cf.metricity_error() <= 1e-10);
    // 4d curvature of dt^2 - a^2 dx^2: magnitude 6 (a''/a + a'^2/a^2)
    const double t = F->t(10), r = 1.3, a = r * std::cosh(t / r), ad = std::sinh(t / r), add = std::cosh(t / r) / r;
    CHECK(std::abs(cf.curvature[cf.row(10)]) == doctest::Approx(6.0 * (add / a + ad * ad / (a * a))).epsilon(1e-6));
}

TEST_CASE("constant spinor on minkowski") {
    auto M = minkowski(16, 16, 1.0 / 16, 1.0 / 16);
    CoframeData cf = build_coframe(M);
    Section s(M, 4, ScalarKind::complex);
    for (int k = 0; k < 16; ++k)
        for (int j = 0; j < 16; ++j)
            for (int c = 0; c < 4; ++c) s(k, j, c) = cd(0.5 + c, -0.25 * c);
    for (int mu = 0; mu < 4; ++mu) CHECK(max_abs_rows(spin_covariant_derivative(cf, mu, s), 1, 15) == 0.0);
    CHECK(lichnerowicz_residual(cf, s) == 0.0);
    DiracModel m(M, 1.0);
    CHECK(square_expansion_residual(m, s) == 0.0);
}

TEST_CASE("nabla gamma and leibniz converge") {
    auto err = [](int n) {
        auto F = frw(n, n, 1.0 / n, 2.0 / n, Profile::cosh_scale(1.3));
        CoframeData cf = build_coframe(F);
        Xorshift64 rng(9);
        Section s = smooth_field(F, 4, ScalarKind::complex, rng), w = smooth_field(F, 4, ScalarKind::complex, rng);
        double l = 0.0;
        for (int mu = 0; mu < 2; ++mu) l = std::max(l, leibniz_residual(cf, mu, w, s));
        return std::pair{nabla_gamma_residual(cf), l};
    };
    auto [g1, l1] = err(32);
    auto [g2, l2] = err(64);
    CHECK(std::log2(g1 / g2) >= 1.8);
    CHECK(std::log2(l1 / l2) >= 1.8);
}

TEST_CASE("positive energy spinor at rest") {
    auto M = minkowski(64, 16, 1.0 / 64, 1.0 / 16);
    const double m = 1.0;
    // (gamma^0 E - m) u = 0 with gamma^0 = [[0,1],[1,0]]: u = (1, 0, 1, 0)
    auto res = [&](int n) {
        auto L = minkowski(n, 8, 1.0 / n, 1.0 / 8);
        DiracModel dm(L, m);
        Section s = dm.zero();
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < 8; ++j) {
                cd e = std::exp(cd(0.0, -m * L->t(k)));
                s(k, j, 0) = e;
                s(k, j, 2) = e;
            }
        return max_abs_rows(dm.op().apply(s), 1, n - 1);
    };
    (void)M;
    const double r1 = res(32), r2 = res(64);
    CHECK(r1 < 1e-3);
    CHECK(std::log2(r1 / r2) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("dirac green identities") {
    auto F = frw(96, 96, 1.0 / 96, 1.0 / 96, Profile::cosh_scale(1.3), true);
    for (bool co : {false, true}) {
        DiracModel m(F, 0.8, co);
        Section f = cell_source(F, 4, ScalarKind::complex, 45, 40, 5.0, cd(0.3, -0.9));
        IdentityResiduals r = green_identities(m, f);
        CHECK(r.worst() <= 1e-9);
        CHECK(r.support_violations[0] + r.support_violations[1] == 0);
    }
}

TEST_CASE("adjunction intertwines the spinor and cospinor operators") {
    auto F = frw(40, 32, 1.0 / 40, 1.0 / 32, Profile::cosh_scale(1.3));
    DiracModel sm(F, 0.7), cm(F, 0.7, true);
    Xorshift64 rng(4);
    Section s = smooth_field(F, 4, ScalarKind::complex, rng);
    Section lhs = adjunction(sm.op().apply(s)), rhs = cm.op().apply(adjunction(s));
    CHECK(max_abs_diff(lhs, rhs, 1, 39) <= 1e-10 * lhs.max_abs());
    CHECK(max_abs_diff(adjunction(adjunction_inverse(s)), s, 0, 40) == 0.0);
}

TEST_CASE("hermitian forms") {
    auto F = frw(96, 96, 1.0 / 96, 1.0 / 96, Profile::cosh_scale(1.3), true);
    DiracModel sm(F, 1.0), cm(F, 1.0, true);
    Section f = cell_source(F, 4, ScalarKind::complex, 30, 40, 5.0, cd(1.0, 0.5));
    Section h = cell_source(F, 4, ScalarKind::complex, 40, 44, 5.0, cd(-0.3, 0.8));
    Observable a = make_observable(sm, f), b = make_observable(sm, h);
    cd ab = hermitian_form(a, b), ba = hermitian_form(b, a);
    CHECK(std::abs(ab) > 0.0);
    CHECK(std::abs(std::conj(ab) - ba) <= 1e-10 * std::abs(ab));
    cd aa = hermitian_form(a, a);
    CHECK(std::abs(aa.imag()) <= 1e-10 * std::abs(aa));
    Observable ca = make_observable(cm, adjunction(f)), cb = make_observable(cm, adjunction(h));
    CHECK(std::abs(hermitian_form(ca, cb) - ba) <= 1e-10 * std::abs(ab));

    Observable far = make_observable(sm, cell_source(F, 4, ScalarKind::complex, 31, 88, 5.0));
    CHECK(std::abs(hermitian_form(a, far)) <= 1e-12 * f.max_abs() * far.rep.max_abs());
}
