// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "ghft/algebra.hpp"
#include "ghft/convergence.hpp"

using namespace ghft;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

LatticePtr lattice(Family fam, int nt, int nx, double dt, double dx, bool conformal) {
    SpacetimeSpec s;
    s.family = fam;
    s.n_t = nt;
    s.n_x = nx;
    s.dt = dt;
    s.dx = dx;
    if (fam == Family::FRW) s.scale = Profile::cosh_scale(1.3);
    s.conformal = conformal;
    return make_lattice(s);
}

// t in [0, 1], x in [0, 2): conformal FRW has beta = h, so courant number 1 everywhere
LatticePtr unit_courant_frw(int nt, int nx) { return lattice(Family::FRW, nt, nx, 1.0 / nt, 2.0 / nx, true); }
LatticePtr plain_frw(int nt, int nx) { return lattice(Family::FRW, nt, nx, 1.0 / nt, 2.0 / nx, false); }

// bump of radius r cells at (k0, j0) with random amplitudes per component
Section bump_source(const GreenModel& m, int k0, int j0, double r, Xorshift64& rng) {
    const SpacetimeLattice& L = m.lattice();
    Section s = m.zero();
    const bool cplx = s.kind() == ScalarKind::complex;
    std::vector<cd> amp(s.fiber());
    for (cd& a : amp) a = cplx ? cd(rng.uniform(-1, 1), rng.uniform(-1, 1)) : cd(rng.uniform(-1, 1));
    const int ri = static_cast<int>(std::ceil(r));
    for (int k = k0 - ri; k <= k0 + ri; ++k)
        for (int dj = -ri; dj <= ri; ++dj) {
            double b = bump(std::hypot(k - k0, dj) / r);
            if (b > 0.0)
                for (int c = 0; c < s.fiber(); ++c) s(k, L.wrap(j0 + dj), c) = amp[c] * b;
        }
    return s;
}

Section random_source(const GreenModel& m, double r, Xorshift64& rng) {
    const SpacetimeLattice& L = m.lattice();
    const int margin = m.boundary_width() + static_cast<int>(std::ceil(r)) + 2;
    int k0 = static_cast<int>(rng.integer(margin, L.n_t - 1 - margin));
    int j0 = static_cast<int>(rng.integer(0, L.n_x - 1));
    return bump_source(m, k0, j0, r, rng);
}

cd causal_form(const GreenModel& m, const Section& f, const Section& h) { return m.pair(f, m.causal(h)); }

std::vector<std::unique_ptr<GreenModel>> three_models(const LatticePtr& L) {
    std::vector<std::unique_ptr<GreenModel>> v;
    v.push_back(std::make_unique<ScalarModel>(L, 1.0, 0.0));
    v.push_back(std::make_unique<DiracModel>(L, 1.0));
    v.push_back(std::make_unique<ProcaModel>(L, 1.0));
    return v;
}
const char* model_name(int i) { return i == 0 ? "scalar" : i == 1 ? "dirac" : "proca"; }

Outcome c1_clifford() {
    auto t0 = Clock::now();
    CliffordReport r = clifford_check(GammaRep::chiral(), 1);
    const double t = seconds_since(t0);
    const bool complete = r.checks.size() == 16 + 4 + 4 + 1 + 10;
    return {r.all_pass() && complete && t < 1.0,
            fmt("%zu checks, %zu failures, %.3f s", r.checks.size(), r.failures(), t)};
}

Outcome c2_green_identities() {
    auto t0 = Clock::now();
    LatticePtr L = unit_courant_frw(256, 512);
    Xorshift64 rng(2);
    double worst = 0.0;
    std::size_t viol = 0;
    std::string per;
    auto models = three_models(L);
    for (std::size_t i = 0; i < models.size(); ++i) {
        double w = 0.0;
        for (int s = 0; s < 20; ++s) {
            // same source scale as the check suites: radius min(n_t, n_x) / 16 cells
            Section f = random_source(*models[i], std::min(L->n_t, L->n_x) / 16.0, rng);
            IdentityResiduals r = green_identities(*models[i], f);
            w = std::max(w, r.worst());
            viol += r.support_violations[0] + r.support_violations[1];
        }
        worst = std::max(worst, w);
        per += fmt(" %s %.2e", model_name(static_cast<int>(i)), w);
    }
    const double t = seconds_since(t0);
    return {worst <= 1e-9 && viol == 0 && t < 60.0,
            fmt("256x512 worst residual%s, %zu support violations, %.1f s", per.c_str(), viol, t)};
}

Outcome c3_classical_causality() {
    LatticePtr L = unit_courant_frw(128, 256);
    Xorshift64 rng(3);
    double disjoint = 0.0, sym = 0.0;
    int pairs = 0;
    auto models = three_models(L);
    for (auto& mp : models) {
        const GreenModel& m = *mp;
        const double r = 5.0;
        const int margin = m.boundary_width() + 8;
        int found = 0;
        while (found < 20) {
            int k0 = static_cast<int>(rng.integer(margin, L->n_t - 1 - margin));
            int k1 = std::clamp(k0 + static_cast<int>(rng.integer(-4, 4)), margin, L->n_t - 1 - margin);
            int j0 = static_cast<int>(rng.integer(0, L->n_x - 1));
            int j1 = j0 + L->n_x / 2 + static_cast<int>(rng.integer(-8, 8));
            Section f = bump_source(m, k0, j0, r, rng), h = bump_source(m, k1, j1, r, rng);
            if (!causally_disjoint(m, f, h)) continue;
            disjoint = std::max(disjoint, std::abs(causal_form(m, f, h)) / (f.max_abs() * h.max_abs()));
            ++found;
        }
        for (int p = 0; p < 20; ++p) {
            int k0 = static_cast<int>(rng.integer(margin, L->n_t / 2));
            int j0 = static_cast<int>(rng.integer(0, L->n_x - 1));
            Section f = bump_source(m, k0, j0, r, rng);
            Section h = bump_source(m, k0 + static_cast<int>(rng.integer(4, 30)), j0 + static_cast<int>(rng.integer(-3, 3)), r, rng);
            cd fh = causal_form(m, f, h), hf = causal_form(m, h, f);
            // tau(f, h) = -tau(h, f); for Dirac h_s = -i <f, E h> is Hermitian, so <f, E h> = -conj <h, E f>
            double res = m.bosonic() ? std::abs(fh + hf) : std::abs(fh + std::conj(hf));
            sym = std::max(sym, res / std::abs(fh));
        }
        pairs += found;
    }
    return {disjoint <= 1e-12 && sym <= 1e-12,
            fmt("%d disjoint pairs max %.2e (rel |f||h|), antisymmetry/hermiticity max %.2e", pairs, disjoint, sym)};
}

Outcome c4_slice_forms() {
    auto t0 = Clock::now();
    std::vector<double> err[3];
    for (int l = 0; l < 3; ++l) {
        const int nt = 128 << l, nx = 256 << l;
        LatticePtr L = plain_frw(nt, nx);
        const int ks = static_cast<int>(0.7 * nt);
        auto models = three_models(L);
        for (int i = 0; i < 3; ++i) {
            Xorshift64 rng(3);
            Section f = smooth_source(*models[i], 0.2, 0.5, 0.12, rng);
            Section h = smooth_source(*models[i], 0.45, 0.62, 0.1, rng);
            err[i].push_back(slice_form_error(*models[i], f, h, ks));
        }
    }
    bool ok = true;
    std::string per;
    for (int i = 0; i < 3; ++i) {
        const double o1 = std::log2(err[i][0] / err[i][1]), o2 = std::log2(err[i][1] / err[i][2]);
        ok = ok && o1 >= 1.8 && o2 >= 1.8 && err[i][2] <= 1e-3;
        per += fmt(" %s orders %.2f %.2f finest %.1e;", model_name(i), o1, o2, err[i][2]);
    }
    return {ok, fmt("128x256 to 512x1024:%s %.1f s", per.c_str(), seconds_since(t0))};
}

Outcome c5_exact_sequence() {
    LatticePtr L = plain_frw(128, 256);
    Xorshift64 rng(5);
    double seq = 0.0, split = 0.0;
    Partition chi = Partition::middle_third(*L);
    for (auto& mp : three_models(L)) {
        const GreenModel& m = *mp;
        for (int s = 0; s < 20; ++s) {
            Section h = random_source(m, 6.0, rng);
            Section f = m.dynamics().apply(h);
            Section hp = m.green(f, Which::advanced);
            // rows within the stencil reach of the lattice ends see the truncation, as in green_identities
            const int w = m.interior_margin();
            seq = std::max(seq, max_abs_diff(m.dynamics().apply(hp), f, w, L->n_t - w) / f.max_abs());
            Section g = random_source(m, 6.0, rng);
            Section u = split_solve(m, g, chi);
            split = std::max(split, max_abs_diff(m.dynamics().apply(u), g, w, L->n_t - w) / g.max_abs());
        }
    }
    return {seq <= 1e-9 && split <= 1e-10,
            fmt("L E^- (L h) residual %.2e, split_solve residual %.2e (60 sources each)", seq, split)};
}

Outcome c6_time_slice() {
    LatticePtr L = plain_frw(128, 256);
    Xorshift64 rng(6);
    const int k_lo = L->n_t / 3, k_hi = 2 * L->n_t / 3;
    bool ok = true;
    std::string per;
    auto models = three_models(L);
    for (int i = 0; i < 3; ++i) {
        const GreenModel& m = *models[i];
        const int margin = m.boundary_width() + 10;
        std::vector<Observable> obs;
        int j_prev = 0;
        for (int s = 0; s < 20; ++s) {
            // sources before and after the band; 2p + 1 sits above 2p, inside its future cone
            int k0, j0;
            if (s % 2 == 0) {
                k0 = static_cast<int>(rng.integer(margin, k_lo - 8));
                j0 = j_prev = static_cast<int>(rng.integer(0, L->n_x - 1));
            } else {
                k0 = static_cast<int>(rng.integer(k_hi + 8, L->n_t - 1 - margin));
                j0 = j_prev + static_cast<int>(rng.integer(-6, 6));
            }
            obs.push_back(make_observable(m, bump_source(m, k0, j0, 6.0, rng)));
        }
        TimeSliceReport rep = time_slice_isomorphism(obs, k_lo, k_hi);
        double gram = 0.0;
        std::size_t counted = 0;
        for (int p = 0; p < 20; ++p) {
            const Observable& a = obs[p];
            const Observable& b = obs[(p + 1) % 20];
            cd orig = causal_pairing(a, b);
            if (std::abs(orig) < 1e-6 * a.rep.max_abs() * b.rep.max_abs() * L->dt * L->dx) continue;
            cd proj = causal_pairing(time_slice_project(a, k_lo, k_hi), time_slice_project(b, k_lo, k_hi));
            gram = std::max(gram, std::abs(proj - orig) / std::abs(orig));
            ++counted;
        }
        ok = ok && rep.contained == rep.samples && rep.equal == rep.samples && rep.max_e_residual <= 1e-8 &&
             rep.gram_error <= 1e-8 && gram <= 1e-8 && counted >= 10;
        per += fmt(" %s contained %zu/%zu E %.1e gram %.1e (%zu pairs) %.1e;", model_name(i), rep.contained, rep.samples,
                   rep.max_e_residual, gram, counted, rep.gram_error);
    }
    return {ok, per.substr(1)};
}

Outcome c7_lichnerowicz() {
    std::vector<double> lich, sq;
    for (int l = 0; l < 3; ++l) {
        const int n = 64 << l;
        LatticePtr L = plain_frw(n, n);
        DiracModel m(L, 1.0);
        Xorshift64 rng(7);
        double a = 0.0, b = 0.0;
        for (int s = 0; s < 20; ++s) {
            Section f = smooth_field(L, 4, ScalarKind::complex, rng);
            a = std::max(a, lichnerowicz_residual(m.coframe(), f));
            b = std::max(b, square_expansion_residual(m, f));
        }
        lich.push_back(a);
        sq.push_back(b);
    }
    auto in_band = [](double o) { return o >= 1.8 && o <= 2.2; };
    double o[4] = {std::log2(lich[0] / lich[1]), std::log2(lich[1] / lich[2]), std::log2(sq[0] / sq[1]),
                   std::log2(sq[1] / sq[2])};
    LatticePtr M = lattice(Family::Minkowski, 32, 32, 1.0 / 32, 1.0 / 32, false);
    DiracModel mm(M, 1.0);
    Xorshift64 rng(17);
    double flat = 0.0;
    for (int s = 0; s < 20; ++s) {
        Section c = mm.zero();
        cd v[4];
        for (cd& z : v) z = cd(rng.uniform(-1, 1), rng.uniform(-1, 1));
        for (int k = 0; k < 32; ++k)
            for (int j = 0; j < 32; ++j)
                for (int q = 0; q < 4; ++q) c(k, j, q) = v[q];
        flat = std::max({flat, lichnerowicz_residual(mm.coframe(), c), square_expansion_residual(mm, c)});
    }
    bool ok = in_band(o[0]) && in_band(o[1]) && in_band(o[2]) && in_band(o[3]) && flat == 0.0;
    return {ok, fmt("orders lichnerowicz %.2f %.2f, square expansion %.2f %.2f; minkowski constant spinors %.1e", o[0],
                    o[1], o[2], o[3], flat)};
}

std::size_t algebra_failures(const RegistryPtr& reg, Xorshift64& rng) {
    std::size_t fail = 0;
    for (int t = 0; t < 100; ++t) {
        auto raw = random_raw(*reg, rng, 5);
        Element x = Element::from_terms(reg, raw), y = Element::from_terms(reg, raw, &rng);
        fail += !(x == y) + !(normal_form(x) == x) + !is_normal(x);
    }
    for (int t = 0; t < 50; ++t) {
        Element x = random_element(reg, rng, 3), y = random_element(reg, rng, 3), z = random_element(reg, rng, 3);
        fail += !((x * y) * z == x * (y * z));
        fail += !(involution(x * y) == involution(y) * involution(x));
        fail += !(involution(involution(x)) == x);
    }
    return fail;
}

Outcome c8_algebra() {
    auto t0 = Clock::now();
    Xorshift64 rng(8);
    auto rat = [&](int lo, int hi) { return Rational(rng.integer(lo, hi), rng.integer(1, 9)); };
    std::vector<std::vector<GaussRat>> tau(5, std::vector<GaussRat>(5)), g(4, std::vector<GaussRat>(4));
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) {
            tau[i][j] = GaussRat(rat(-9, 9));
            tau[j][i] = -tau[i][j];
        }
    for (int i = 0; i < 4; ++i) {
        g[i][i] = GaussRat(rat(1, 9));
        for (int j = i + 1; j < 4; ++j) {
            g[i][j] = GaussRat(rat(-9, 9), rat(-9, 9));
            g[j][i] = g[i][j].conj();
        }
    }
    std::size_t fail = algebra_failures(std::make_shared<const Registry>(Registry::bose(tau)), rng) +
                       algebra_failures(std::make_shared<const Registry>(Registry::fermi(g)), rng);

    // quantum causality with Gram data from each model: three sources near (k0, j0), three near the antipode
    LatticePtr L = lattice(Family::Minkowski, 64, 64, 1.0 / 64, 1.0 / 64, false);
    std::size_t nonzero = 0, entries = 0;
    bool disjoint = true;
    for (auto& mp : three_models(L)) {
        const GreenModel& m = *mp;
        std::vector<Observable> obs;
        std::vector<int> ra, rb;
        for (int i = 0; i < 3; ++i) {
            ra.push_back(static_cast<int>(obs.size()));
            obs.push_back(make_observable(m, bump_source(m, 30 + i, 10 + i, 3.0, rng)));
        }
        for (int i = 0; i < 3; ++i) {
            rb.push_back(static_cast<int>(obs.size()));
            obs.push_back(make_observable(m, bump_source(m, 32 - i, 42 + i, 3.0, rng)));
        }
        for (int a : ra)
            for (int b : rb) disjoint = disjoint && causally_disjoint(m, obs[a].rep, obs[b].rep);
        auto reg = std::make_shared<const Registry>(registry_from_observables(obs));
        CausalityReport rep = verify_quantum_causality(reg, ra, rb);
        nonzero += rep.nonzero();
        entries += rep.entries.size();
    }
    const double t = seconds_since(t0);
    return {fail == 0 && disjoint && nonzero == 0 && t < 5.0,
            fmt("%zu exact-identity failures, quantum causality %zu/%zu nonzero, %.2f s", fail, nonzero, entries, t)};
}

Outcome c9_massless_kernel() {
    const int nt = 128, nx = 256;
    const double d = 1.0 / nx;
    LatticePtr L = lattice(Family::Minkowski, nt, nx, d, d, false);
    ScalarModel m(L, 0.0);
    const int k0 = 10, j0 = 128;
    Section f = m.zero();
    f(k0, j0) = 1.0;
    Section u = m.green(f, Which::retarded);
    // E+ f = dt dx on the cells of the cone interior with n - |j - j0| odd: the two-row average is
    // 1/2 theta(t - |x|) per unit source weight, d'Alembert's kernel
    double pattern = 0.0, average = 0.0;
    std::size_t cells = 0;
    for (int k = 0; k < nt; ++k)
        for (int j = 0; j < nx; ++j) {
            const int n = k - k0, a = std::abs(j - j0);
            const bool boundary = n >= 0 && std::abs(a - n) <= 1;
            if (boundary) continue;
            const double want = (a < n && (n - a) % 2 == 1) ? d * d : 0.0;
            pattern = std::max(pattern, std::abs(u(k, j) - want) / (d * d));
            if (k > 0) {
                const double kern = a < n - 1 ? 0.5 : 0.0;
                average = std::max(average, std::abs(0.5 * (u(k, j) + u(k - 1, j)) / (d * d) - kern));
            }
            ++cells;
        }
    return {pattern <= 1e-12 && average <= 1e-12,
            fmt("%zu cells off the cone boundary: pattern error %.1e, two-row average vs 1/2 theta %.1e", cells, pattern,
                average)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"C1 clifford", c1_clifford},
        {"C2 green identities", c2_green_identities},
        {"C3 classical causality", c3_classical_causality},
        {"C4 slice forms", c4_slice_forms},
        {"C5 exact sequence", c5_exact_sequence},
        {"C6 time slice", c6_time_slice},
        {"C7 lichnerowicz", c7_lichnerowicz},
        {"C8 algebra", c8_algebra},
        {"C9 massless kernel", c9_massless_kernel},
    };
    // optional argument: comma separated criterion numbers
    std::string only = argc > 1 ? argv[1] : "";
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!only.empty() && (',' + only + ',').find(',' + std::to_string(i + 1) + ',') == std::string::npos) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
