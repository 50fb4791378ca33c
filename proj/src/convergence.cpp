#include "ghft/convergence.hpp"

#include <cmath>
#include <numbers>

namespace ghft {

SpacetimeSpec refined(const SpacetimeSpec& base, int level) {
    if (level < 0 || level > 12) throw PreconditionError("refinement level out of range");
    SpacetimeSpec s = base;
    s.n_t = base.n_t << level;
    s.n_x = base.n_x << level;
    s.dt = std::ldexp(base.dt, -level);
    s.dx = std::ldexp(base.dx, -level);
    return s;
}

LatticePtr make_lattice(const SpacetimeSpec& spec) { return std::make_shared<const SpacetimeLattice>(build_spacetime(spec)); }

Section smooth_source(const GreenModel& model, double t0, double x0, double radius, Xorshift64& rng) {
    const SpacetimeLattice& L = model.lattice();
    Section s = model.zero();
    const bool cplx = s.kind() == ScalarKind::complex;
    std::vector<cd> amp(s.fiber());
    for (cd& a : amp) {
        double re = rng.uniform(-1.0, 1.0);
        a = cplx ? cd(re, rng.uniform(-1.0, 1.0)) : cd(re);
    }
    for (int k = 0; k < L.n_t; ++k)
        for (int j = 0; j < L.n_x; ++j) {
            double dx = std::remainder(L.x(j) - x0, L.period());
            double b = bump(std::hypot((L.t(k) - t0) / radius, dx / radius));
            if (b > 0.0)
                for (int c = 0; c < s.fiber(); ++c) s(k, j, c) = amp[c] * b;
        }
    return s;
}

Section smooth_field(const LatticePtr& lat, int fiber, ScalarKind kind, Xorshift64& rng) {
    const SpacetimeLattice& L = *lat;
    Section s(lat, fiber, kind);
    const double kx = 2.0 * std::numbers::pi / L.period();
    for (int c = 0; c < fiber; ++c) {
        double p[6];
        for (double& v : p) v = rng.uniform(-1.0, 1.0);
        int mode = static_cast<int>(rng.integer(1, 2));
        for (int k = 0; k < L.n_t; ++k)
            for (int j = 0; j < L.n_x; ++j) {
                double t = L.t(k), x = L.x(j);
                double re = p[0] * std::sin(mode * kx * x + p[1]) * std::cos(1.3 * t + p[2]);
                double im = p[3] * std::cos(kx * x + p[4]) * std::exp(-0.5 * t * t + p[5] * t);
                s(k, j, c) = kind == ScalarKind::complex ? cd(re, im) : cd(re + im);
            }
    }
    return s;
}

double slice_form_error(const GreenModel& model, const Section& f, const Section& h, int k) {
    Section ef = model.causal(f), eh = model.causal(h);
    cd form = model.pair(f, eh);
    cd slice;
    if (const auto* m = dynamic_cast<const ScalarModel*>(&model)) {
        slice = sigma_on_slice(*m, ef, eh, k);
    } else if (const auto* m = dynamic_cast<const ProcaModel*>(&model)) {
        slice = proca_sigma_slice(*m, ef, eh, k);
    } else if (const auto* m = dynamic_cast<const DiracModel*>(&model)) {
        if (m->cospinor()) throw PreconditionError("slice form check expects the spinor model");
        form *= cd(0.0, -1.0);
        slice = hermitian_on_slice(*m, ef, eh, k);
    } else {
        throw PreconditionError("no slice form for this model");
    }
    if (std::abs(form) == 0.0) throw PreconditionError("sources are causally disjoint; the form vanishes");
    return std::abs(slice - form) / std::abs(form);
}

double lichnerowicz_residual(const CoframeData& cf, const Section& s, int margin) {
    const SpacetimeLattice& L = *cf.lattice;
    Section lhs = slash_generic(cf, slash_generic(cf, s));
    Section rhs = connection_laplacian(cf, s);
    double e = 0.0;
    for (int k = margin; k < L.n_t - margin; ++k) {
        const double r4 = cf.curvature[cf.row(k)] / 4.0;
        for (int j = 0; j < L.n_x; ++j)
            for (int c = 0; c < s.fiber(); ++c) e = std::max(e, std::abs(lhs(k, j, c) - rhs(k, j, c) - r4 * s(k, j, c)));
    }
    return e;
}

double square_expansion_residual(const DiracModel& model, const Section& s, int margin) {
    const SpacetimeLattice& L = model.lattice();
    Section pp = model.op().apply(model.op().apply(s));
    Section fs = apply_form(model.square_form(), s);
    double e = 0.0;
    for (int k = margin; k < L.n_t - margin; ++k)
        for (int j = 0; j < L.n_x; ++j)
            for (int c = 0; c < s.fiber(); ++c) e = std::max(e, std::abs(pp(k, j, c) + fs(k, j, c)));
    return e;
}

double scalar_manufactured_residual(const ScalarModel& model) {
    const SpacetimeLattice& L = model.lattice();
    if (!L.homogeneous()) throw PreconditionError("manufactured solution needs a homogeneous lattice");
    const Profile& a = *L.scale;
    const Profile& beta = *L.lapse_profile;
    const double kappa = 2.0 * std::numbers::pi / L.period(), theta = 0.4, w = 2.1;
    auto g = [&](double t) { return std::cos(w * t) + 0.5 * std::sin(1.7 * t); };
    auto g1 = [&](double t) { return -w * std::sin(w * t) + 0.85 * std::cos(1.7 * t); };
    auto g2 = [&](double t) { return -w * w * std::cos(w * t) - 1.445 * std::sin(1.7 * t); };

    Section phi(model.dynamics().lattice_ptr(), 1);
    for (int k = 0; k < L.n_t; ++k)
        for (int j = 0; j < L.n_x; ++j) phi(k, j) = g(L.t(k)) * std::cos(kappa * L.x(j) + theta);
    Section pphi = model.dynamics().apply(phi);
    double e = 0.0;
    for (int k = 1; k < L.n_t - 1; ++k) {
        const double t = L.t(k);
        const double av = a.value(t), ad = a.first(t), b = beta.value(t), bd = beta.first(t);
        // S = a / sqrt(beta), d_t (S g') / (a sqrt(beta)) + kappa^2 g / a^2
        const double S = av / std::sqrt(b), Sd = ad / std::sqrt(b) - 0.5 * av * bd / (b * std::sqrt(b));
        const double time = (Sd * g1(t) + S * g2(t)) / (av * std::sqrt(b));
        for (int j = 0; j < L.n_x; ++j) {
            const double cx = std::cos(kappa * L.x(j) + theta);
            const double f = (time + kappa * kappa * g(t) / (av * av)) * cx + model.op().potential(k, j) * g(t) * cx;
            e = std::max(e, std::abs(pphi(k, j) - f));
        }
    }
    return e;
}

std::vector<double> ConvergenceSeries::orders() const {
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < error.size(); ++i) out.push_back(std::log2(error[i] / error[i + 1]));
    return out;
}

double ConvergenceSeries::fitted_order() const {
    const std::size_t n = error.size();
    if (n < 2) return std::nan("");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double x = static_cast<double>(i), y = -std::log2(error[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace ghft
