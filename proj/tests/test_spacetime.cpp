#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"

using namespace ghft;
using ghft::test::frw;
using ghft::test::minkowski;

TEST_CASE("minkowski lattice is flat") {
    auto L = minkowski(64, 64, 1.0 / 64, 1.0 / 64);
    for (int k = 0; k < L->n_t; k += 7)
        for (int j = 0; j < L->n_x; j += 5) {
            CHECK(L->beta(k, j) == 1.0);
            CHECK(L->h(k, j) == 1.0);
            CHECK(L->R(k, j) == 0.0);
        }
    CHECK(L->courant() == doctest::Approx(1.0));
    CHECK(L->homogeneous());
}

TEST_CASE("de sitter metric samples") {
    SpacetimeSpec s;
    s.family = Family::DeSitter;
    s.radius = 1.0;
    s.n_t = 40;
    s.n_x = 16;
    s.dt = 0.05;
    s.dx = 0.1;
    s.t_origin = -1.0;
    SpacetimeLattice L = build_spacetime(s);
    for (int k = 0; k < L.n_t; k += 3) {
        const double c = std::cosh(L.t(k));
        CHECK(L.h(k, 3) == doctest::Approx(c * c).epsilon(1e-13));
        CHECK(L.beta(k, 3) == 1.0);
        // 2 a'' / a for a = cosh t
        CHECK(L.R(k, 3) == doctest::Approx(2.0).epsilon(1e-12));
    }
}

TEST_CASE("frw curvature from the scale factor") {
    auto L = frw(8, 8, 0.125, 0.125, Profile::polynomial(1.0, 0.0, 0.1));
    // a = 1 + 0.1 t^2, R = 2 a'' / a = 0.4 / a
    CHECK(L->R(0, 0) == doctest::Approx(0.4).epsilon(1e-12));
    const double t = L->t(5), a = 1.0 + 0.1 * t * t;
    CHECK(L->R(5, 2) == doctest::Approx(0.4 / a).epsilon(1e-12));
    CHECK(L->h(5, 2) == doctest::Approx(a * a).epsilon(1e-14));
}

TEST_CASE("non-positive metric samples are rejected") {
    SpacetimeSpec s;
    s.family = Family::FRW;
    s.scale = Profile::polynomial(1.0, -2.0, 0.0);
    s.n_t = 64;
    s.dt = 1.0 / 32;
    CHECK_THROWS_AS(build_spacetime(s), PreconditionError);

    SpacetimeSpec z;
    z.n_t = 0;
    CHECK_THROWS_AS(build_spacetime(z), PreconditionError);
}

TEST_CASE("family names round trip") {
    for (Family f : {Family::Minkowski, Family::Ultrastatic, Family::FRW, Family::DeSitter, Family::Custom})
        CHECK(parse_family(family_name(f)) == f);
    CHECK_THROWS(parse_family("anti-de-sitter"));
}

TEST_CASE("minkowski cone at unit courant number") {
    auto L = minkowski(24, 48, 0.1, 0.1);
    SupportMask seed(L->n_t, L->n_x);
    seed.set(0, 24);
    SupportMask cone = causal_cone(*L, seed, TimeDirection::future);
    for (int k = 0; k < L->n_t; ++k)
        for (int j = 0; j < L->n_x; ++j) CHECK(cone.at(k, j) == (std::abs(j - 24) <= k));
    CHECK_FALSE(cone.wrapped);
}

TEST_CASE("frw cone with a = 2 has half the slope") {
    auto L = frw(20, 64, 0.1, 0.1, Profile::constant(2.0));
    SupportMask seed(L->n_t, L->n_x);
    seed.set(0, 30);
    SupportMask cone = causal_cone(*L, seed, TimeDirection::future);
    for (int k = 0; k < L->n_t; ++k)
        for (int j = 0; j < L->n_x; ++j) {
            const int half = (k + 1) / 2;
            CHECK(cone.at(k, j) == (std::abs(j - 30) <= half));
        }
}

TEST_CASE("past cone mirrors the future cone") {
    auto L = minkowski(16, 32, 0.1, 0.1);
    SupportMask seed(L->n_t, L->n_x);
    seed.set(15, 16);
    SupportMask cone = causal_cone(*L, seed, TimeDirection::past);
    for (int k = 0; k < L->n_t; ++k)
        for (int j = 0; j < L->n_x; ++j) CHECK(cone.at(k, j) == (std::abs(j - 16) <= 15 - k));
}

TEST_CASE("cones contain their seed and grow monotonically") {
    Xorshift64 rng(11);
    auto L = frw(24, 40, 0.05, 0.05, Profile::cosh_scale(1.3));
    for (int trial = 0; trial < 10; ++trial) {
        SupportMask a(L->n_t, L->n_x);
        for (int i = 0; i < 3; ++i) a.set(static_cast<int>(rng.integer(0, 23)), static_cast<int>(rng.integer(0, 39)));
        SupportMask b = a;
        b.set(static_cast<int>(rng.integer(0, 23)), static_cast<int>(rng.integer(0, 39)));
        for (TimeDirection d : {TimeDirection::future, TimeDirection::past}) {
            SupportMask ca = causal_cone(*L, a, d), cb = causal_cone(*L, b, d);
            CHECK(a.subset_of(ca));
            CHECK(ca.subset_of(cb));
            CHECK(causal_cone(*L, a, d, ConeKind::chronological).subset_of(ca));
        }
    }
}

TEST_CASE("support classification") {
    SupportMask m(20, 10);
    CHECK(classify_support(m, 2) == SupportClass::Compact);
    m.set(10, 3);
    CHECK(classify_support(m, 2) == SupportClass::Compact);
    CHECK(has_support_class(m, SupportClass::PastCompact, 2));
    m.set(0, 3);
    CHECK_FALSE(has_support_class(m, SupportClass::Compact, 2));
    CHECK(has_support_class(m, SupportClass::FutureCompact, 2));
    CHECK(m.first_row() == 0);
    CHECK(m.last_row() == 10);
    CHECK(m.count() == 2);
}

TEST_CASE("volume weights") {
    auto M = minkowski(8, 8, 0.25, 0.5);
    for (double w : volume_weights(*M)) CHECK(w == 0.125);
    auto F = frw(8, 8, 0.25, 0.5, Profile::constant(3.0));
    for (double w : volume_weights(*F)) CHECK(w == doctest::Approx(3.0 * 0.125).epsilon(1e-15));

    SpacetimeSpec s;
    s.family = Family::DeSitter;
    s.radius = 1.0;
    s.n_t = 8;
    s.n_x = 8;
    s.dt = 1.0;
    s.dx = 0.5;
    s.t_origin = -1.0;
    SpacetimeLattice D = build_spacetime(s);
    CHECK(volume_weights(D)[D.index(2, 2)] == doctest::Approx(std::cosh(1.0) * 0.5).epsilon(1e-14));
}

TEST_CASE("cauchy slice data") {
    auto M = minkowski(8, 8, 0.25, 0.5);
    CauchySlice c = cauchy_slice(*M, 3);
    for (double v : c.normal_scale) CHECK(v == 1.0);
    for (double v : c.induced_volume) CHECK(v == 0.5);

    SpacetimeSpec s;
    s.family = Family::Custom;
    s.n_t = 8;
    s.n_x = 8;
    s.dt = 0.1;
    s.dx = 0.1;
    s.lapse_fn = [](double, double) { return 4.0; };
    s.metric_fn = [](double, double) { return 1.0; };
    SpacetimeLattice L = build_spacetime(s);
    for (double v : cauchy_slice(L, 2).normal_scale) CHECK(v == 0.5);

    auto F = frw(8, 8, 0.25, 0.5, Profile::constant(2.0));
    for (double v : cauchy_slice(*F, 4).induced_volume) CHECK(v == doctest::Approx(1.0));
    CHECK_THROWS_AS(cauchy_slice(*F, 8), PreconditionError);
}

TEST_CASE("pgm output") {
    SupportMask m(2, 3);
    m.set(1, 2);
    auto path = std::filesystem::temp_directory_path() / "ghft_test_mask.pgm";
    write_pgm(m, path.string());
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    const std::string expect = std::string("P5\n3 2\n255\n") + std::string(5, '\0') + std::string(1, '\xff');
    CHECK(ss.str() == expect);
    std::filesystem::remove(path);
}
