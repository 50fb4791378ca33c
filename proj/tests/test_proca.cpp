#include <cmath>

#include "doctest.h"
#include "ghft/proca.hpp"
#include "helpers.hpp"

using namespace ghft;
using ghft::test::cell_source;
using ghft::test::frw;
using ghft::test::minkowski;

namespace {

FormField integer_form(const LatticePtr& L, int degree, Xorshift64& rng) {
    FormField f(L, degree);
    for (cd& v : f.data.values()) v = static_cast<double>(rng.integer(-50, 50));
    return f;
}

}  // namespace

TEST_CASE("d d = 0 exactly") {
    auto L = minkowski(16, 16, 0.125, 0.25);
    Xorshift64 rng(2);
    FormField z = integer_form(L, 0, rng);
    CHECK(exterior_d(exterior_d(z)).data.is_zero());
    FormField c(L, 0);
    for (cd& v : c.data.values()) v = 3.0;
    FormField dc = exterior_d(c);
    // rows next to the final boundary see the zero extension
    CHECK(dc.data.restricted_rows(0, 15).is_zero());
    CHECK_THROWS(exterior_d(exterior_d(exterior_d(z))));
}

TEST_CASE("d of an x-independent A_t dt vanishes") {
    auto L = minkowski(12, 12, 0.125, 0.125);
    FormField a(L, 1);
    for (int k = 0; k < 12; ++k)
        for (int j = 0; j < 12; ++j) a.data(k, j, 1) = 1.0 + k * k;
    CHECK(exterior_d(a).data.is_zero());
}

TEST_CASE("star compositions and codifferential") {
    auto F = frw(24, 24, 1.0 / 24, 1.0 / 24, Profile::cosh_scale(1.3));
    Xorshift64 rng(8);
    for (int deg = 0; deg <= 2; ++deg) {
        FormField f = integer_form(F, deg, rng);
        FormField ss = hodge_star(hodge_star(f));
        const double sign = deg == 1 ? 1.0 : -1.0;
        CHECK(max_abs_diff(ss.data, sign * f.data, 0, 24) <= 1e-12 * f.data.max_abs());
        CHECK(max_abs_diff(hodge_star_inverse(hodge_star(f)).data, f.data, 0, 24) <= 1e-12 * f.data.max_abs());
    }
    FormField two = integer_form(F, 2, rng);
    FormField dd = codifferential(codifferential(two));
    CHECK(dd.data.max_abs() <= 1e-12 * two.data.max_abs() / (F->dt * F->dx));
    auto M = minkowski(16, 16, 0.125, 0.125);
    FormField one(M, 1);
    for (cd& v : one.data.values()) v = 2.0;
    CHECK(codifferential(one).data.restricted_rows(1, 15).is_zero());
    CHECK_THROWS(codifferential(FormField(M, 0)));
}

TEST_CASE("pairing equals the wedge integral") {
    auto F = frw(32, 32, 1.0 / 32, 1.0 / 32, Profile::cosh_scale(1.3));
    Xorshift64 rng(12);
    FormField a(F, 1), b(F, 1);
    a.data = cell_source(F, 2, ScalarKind::real, 14, 12, 5.0, 0.7);
    b.data = cell_source(F, 2, ScalarKind::real, 16, 14, 5.0, -1.1);
    const double p = form_pairing(a, b);
    CHECK(std::abs(p) > 0.0);
    CHECK(std::abs(wedge_integral(a, hodge_star(b)) - p) <= 1e-10 * std::abs(p));
    ProcaModel m(F, 1.0);
    CHECK(std::abs(m.pair(a.data, b.data).real() - p) <= 1e-10 * std::abs(p));
}

TEST_CASE("P on closed forms and Q on coclosed forms") {
    auto M = minkowski(16, 16, 0.125, 0.125);
    ProcaModel m(M, 2.5);
    FormField z(M, 0);
    Xorshift64 rng(1);
    for (int k = 0; k < 16; ++k)
        for (int j = 0; j < 16; ++j) z.data(k, j) = rng.uniform(-1, 1);
    FormField closed = exterior_d(z);
    FormField p = proca_apply(m, closed);
    CHECK(max_abs_diff(p.data, 2.5 * closed.data, 2, 14) <= 1e-12 * closed.data.max_abs());
    FormField cst(M, 1);
    for (cd& v : cst.data.values()) v = -1.5;
    CHECK(max_abs_diff(proca_q(m, cst).data, cst.data, 2, 14) == 0.0);
}

TEST_CASE("row-wise operators agree with the form calculus") {
    auto F = frw(40, 32, 1.0 / 40, 1.0 / 32, Profile::cosh_scale(1.3));
    ProcaModel m(F, 0.9);
    Section a = cell_source(F, 2, ScalarKind::real, 20, 16, 6.0, 0.4);
    FormField af = as_one_form(a);
    CHECK(max_abs_diff(m.P().apply(a), proca_apply(m, af).data, 2, 38) <= 1e-10 * m.P().apply(a).max_abs());
    CHECK(max_abs_diff(m.Q().apply(a), proca_q(m, af).data, 2, 38) <= 1e-10 * m.Q().apply(a).max_abs());
    Section pq = m.P().apply(m.Q().apply(a)), qp = m.Q().apply(m.P().apply(a)), r = m.R().apply(a);
    CHECK(max_abs_diff(pq, r, 3, 37) <= 1e-10 * r.max_abs());
    CHECK(max_abs_diff(qp, r, 3, 37) <= 1e-10 * r.max_abs());
}

TEST_CASE("massless proca is rejected") {
    auto M = minkowski(8, 8, 0.125, 0.125);
    CHECK_THROWS_AS(ProcaModel(M, 0.0), PreconditionError);
    CHECK_THROWS_AS(ProcaModel(M, std::nan("")), PreconditionError);
}

TEST_CASE("proca green identities and causality") {
    auto F = frw(96, 96, 1.0 / 96, 1.0 / 96, Profile::cosh_scale(1.3), true);
    ProcaModel m(F, 1.0);
    Section f = cell_source(F, 2, ScalarKind::real, 40, 30, 5.0);
    IdentityResiduals r = green_identities(m, f);
    CHECK(r.worst() <= 1e-9);
    CHECK(r.support_violations[0] + r.support_violations[1] == 0);

    Observable a = make_observable(m, f);
    Observable b = make_observable(m, cell_source(F, 2, ScalarKind::real, 50, 34, 5.0, -0.6));
    Observable c = make_observable(m, cell_source(F, 2, ScalarKind::real, 41, 78, 5.0));
    const double ab = proca_tau(a, b);
    CHECK(std::abs(ab) > 0.0);
    CHECK(std::abs(ab + proca_tau(b, a)) <= 1e-12 * std::abs(ab));
    CHECK(std::abs(proca_tau(a, a)) <= 1e-12 * f.max_abs() * f.max_abs());
    CHECK(std::abs(proca_tau(a, c)) <= 1e-12 * f.max_abs() * c.rep.max_abs());
}

TEST_CASE("gauge split, F Q and Q F give the same E") {
    auto F = frw(96, 96, 1.0 / 96, 1.0 / 96, Profile::cosh_scale(1.3), true);
    ProcaModel m(F, 1.0);
    MarchingSolver fr(std::make_shared<const ProcaOperator>(F, 1.0, ProcaOp::R));
    Section f = cell_source(F, 2, ScalarKind::real, 40, 30, 5.0);
    for (Which w : {Which::retarded, Which::advanced}) {
        Section e = m.green(f, w);
        const double s = e.max_abs();
        CHECK(s > 0.0);
        CHECK(max_abs_diff(e, fr.solve(m.Q().apply(f), w), 1, 94) <= 1e-10 * s);
        CHECK(max_abs_diff(e, m.green_outer(f, w), 1, 94) <= 1e-10 * s);
    }
}

TEST_CASE("sigma equals tau exactly on minkowski") {
    auto M = minkowski(96, 96, 1.0 / 96, 1.0 / 96);
    ProcaModel m(M, 1.0);
    Observable a = make_observable(m, cell_source(M, 2, ScalarKind::real, 20, 40, 6.0));
    Observable b = make_observable(m, cell_source(M, 2, ScalarKind::real, 30, 45, 6.0, -0.8));
    const double tau = proca_tau(a, b);
    const double sigma = proca_sigma_slice(m, m.causal(a.rep), m.causal(b.rep), 70);
    CHECK(std::abs(sigma - tau) <= 1e-10 * std::abs(tau));
}
