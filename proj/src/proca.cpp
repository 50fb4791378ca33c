#include "ghft/proca.hpp"

#include <algorithm>
#include <cmath>

namespace ghft {

FormField::FormField(LatticePtr lat, int deg, bool is_dual)
    : degree(deg), dual(is_dual), data(std::move(lat), deg == 1 ? 2 : 1) {
    if (deg < 0 || deg > 2) throw PreconditionError("form degree must be 0, 1 or 2");
}

HodgeWeights HodgeWeights::build(const SpacetimeLattice& L) {
    HodgeWeights w;
    const std::size_t n = L.size();
    w.node.resize(n);
    w.cell.resize(n);
    w.w0.resize(n);
    w.w1.resize(n);
    for (int k = 0; k < L.n_t; ++k) {
        const int kn = std::min(k + 1, L.n_t - 1);
        for (int j = 0; j < L.n_x; ++j) {
            const int jn = L.wrap(j + 1);
            const std::size_t i = L.index(k, j);
            w.node[i] = std::sqrt(L.beta(k, j) * L.h(k, j));
            double be = 0.5 * (L.beta(k, j) + L.beta(k, jn)), he = 0.5 * (L.h(k, j) + L.h(k, jn));
            w.w0[i] = std::sqrt(be / he);
            be = 0.5 * (L.beta(k, j) + L.beta(kn, j));
            he = 0.5 * (L.h(k, j) + L.h(kn, j));
            w.w1[i] = std::sqrt(he / be);
            double bc = 0.25 * (L.beta(k, j) + L.beta(k, jn) + L.beta(kn, j) + L.beta(kn, jn));
            double hc = 0.25 * (L.h(k, j) + L.h(k, jn) + L.h(kn, j) + L.h(kn, jn));
            w.cell[i] = std::sqrt(bc * hc);
        }
    }
    return w;
}

FormField exterior_d(const FormField& f) {
    if (f.degree >= 2) throw PreconditionError("exterior derivative of a top-degree form");
    const SpacetimeLattice& L = f.lattice();
    const Section& u = f.data;
    FormField out(f.data.lattice_ptr(), f.degree + 1, f.dual);
    Section& o = out.data;
    for (int k = 0; k < L.n_t; ++k)
        for (int j = 0; j < L.n_x; ++j) {
            if (!f.dual && f.degree == 0) {
                o(k, j, 0) = (u.get(k, j + 1) - u(k, j)) / L.dx;
                o(k, j, 1) = (u.get(k + 1, j) - u(k, j)) / L.dt;
            } else if (!f.dual) {
                o(k, j) = (u.get(k + 1, j, 0) - u(k, j, 0)) / L.dt - (u.get(k, j + 1, 1) - u(k, j, 1)) / L.dx;
            } else if (f.degree == 0) {
                o(k, j, 0) = (u(k, j) - u.get(k - 1, j)) / L.dt;
                o(k, j, 1) = (u(k, j) - u.get(k, j - 1)) / L.dx;
            } else {
                o(k, j) = (u(k, j, 1) - u.get(k - 1, j, 1)) / L.dt - (u(k, j, 0) - u.get(k, j - 1, 0)) / L.dx;
            }
        }
    return out;
}

namespace {

// dual (2 - k)-form to primal k-form
FormField inverse_star_of_dual(const FormField& f) {
    const SpacetimeLattice& L = f.lattice();
    const HodgeWeights w = HodgeWeights::build(L);
    FormField out(f.data.lattice_ptr(), 2 - f.degree, false);
    for (int k = 0; k < L.n_t; ++k)
        for (int j = 0; j < L.n_x; ++j) {
            std::size_t i = L.index(k, j);
            if (f.degree == 2) {
                out.data(k, j) = f.data(k, j) / w.node[i];
            } else if (f.degree == 1) {
                out.data(k, j, 0) = f.data(k, j, 0) / w.w0[i];
                out.data(k, j, 1) = f.data(k, j, 1) / w.w1[i];
            } else {
                out.data(k, j) = -f.data(k, j) * w.cell[i];
            }
        }
    return out;
}

}  // namespace

FormField hodge_star(const FormField& f) {
    if (f.dual) {
        FormField out = inverse_star_of_dual(f);
        if (f.degree != 1) out.data *= -1.0;
        return out;
    }
    const SpacetimeLattice& L = f.lattice();
    const HodgeWeights w = HodgeWeights::build(L);
    FormField out(f.data.lattice_ptr(), 2 - f.degree, true);
    for (int k = 0; k < L.n_t; ++k)
        for (int j = 0; j < L.n_x; ++j) {
            std::size_t i = L.index(k, j);
            if (f.degree == 0) {
                out.data(k, j) = f.data(k, j) * w.node[i];
            } else if (f.degree == 1) {
                out.data(k, j, 0) = f.data(k, j, 0) * w.w0[i];
                out.data(k, j, 1) = f.data(k, j, 1) * w.w1[i];
            } else {
                out.data(k, j) = -f.data(k, j) / w.cell[i];
            }
        }
    return out;
}

FormField hodge_star_inverse(const FormField& f) {
    if (!f.dual) throw PreconditionError("inverse star expects a dual form");
    return inverse_star_of_dual(f);
}

FormField codifferential(const FormField& f) {
    if (f.dual || f.degree < 1) throw PreconditionError("codifferential needs a primal form of degree 1 or 2");
    FormField out = hodge_star_inverse(exterior_d(hodge_star(f)));
    if (f.degree % 2 == 1) out.data *= -1.0;
    return out;
}

double form_pairing(const FormField& a, const FormField& b) {
    if (a.dual || b.dual || a.degree != b.degree) throw PreconditionError("form pairing needs primal forms of equal degree");
    const SpacetimeLattice& L = a.lattice();
    const HodgeWeights w = HodgeWeights::build(L);
    double acc = 0.0;
    for (int k = 0; k < L.n_t; ++k)
        for (int j = 0; j < L.n_x; ++j) {
            std::size_t i = L.index(k, j);
            if (a.degree == 0)
                acc += w.node[i] * (a.data(k, j) * b.data(k, j)).real();
            else if (a.degree == 1)
                acc += (w.w1[i] * a.data(k, j, 1) * b.data(k, j, 1) - w.w0[i] * a.data(k, j, 0) * b.data(k, j, 0)).real();
            else
                acc -= (a.data(k, j) * b.data(k, j)).real() / w.cell[i];
        }
    return acc * L.dt * L.dx;
}

double wedge_integral(const FormField& p, const FormField& d) {
    if (p.dual || !d.dual || p.degree + d.degree != 2) throw PreconditionError("wedge needs a primal k-form and a dual (2-k)-form");
    const SpacetimeLattice& L = p.lattice();
    double acc = 0.0;
    for (int k = 0; k < L.n_t; ++k)
        for (int j = 0; j < L.n_x; ++j) {
            if (p.degree == 1)
                // A_t dt ^ B_x dx - A_x dx ^ B_t dt... with dx ^ dt = -dt ^ dx
                acc += (p.data(k, j, 1) * d.data(k, j, 1) - p.data(k, j, 0) * d.data(k, j, 0)).real();
            else
                acc += (p.data(k, j) * d.data(k, j)).real();
        }
    return acc * L.dt * L.dx;
}

ProcaOperator::ProcaOperator(LatticePtr lat, double mass_sq, ProcaOp which)
    : lat_(std::move(lat)), m2_(mass_sq), which_(which), w_(HodgeWeights::build(*lat_)) {
    const SpacetimeLattice& L = *lat_;
    double sc = 0.0;
    for (std::size_t i = 0; i < L.size(); ++i) {
        double r = std::max(w_.w0[i], w_.w1[i]) / std::min(w_.node[i], w_.cell[i]);
        sc = std::max(sc, 4.0 * r * (1.0 / (L.dt * L.dt) + 1.0 / (L.dx * L.dx)));
    }
    scale_ = sc + std::abs(m2_);
}

std::vector<std::vector<int>> ProcaOperator::groups(Which which) const {
    if (which == Which::retarded) return {{0}, {1}};
    return {{1}, {0}};
}

void ProcaOperator::apply_row(const Section& u, int k, cd* out) const {
    const SpacetimeLattice& L = *lat_;
    const int nx = L.n_x, nt = L.n_t;
    const double dt = L.dt, dx = L.dx;
    auto A0 = [&](int r, int j) { return u.get(r, j, 0); };
    auto A1 = [&](int r, int j) { return u.get(r, j, 1); };
    auto idx = [&](int r, int j) { return L.index(r, L.wrap(j)); };
    // psi = *dA on cell rows k - 1, k; phi = delta A on node rows k, k + 1
    std::vector<cd> psi(2 * nx, cd{}), phi(2 * nx, cd{});
    for (int s = 0; s < 2; ++s) {
        int r = k - 1 + s;
        if (r >= 0 && r < nt)
            for (int j = 0; j < nx; ++j) {
                cd F = (A0(r + 1, j) - A0(r, j)) / dt - (A1(r, j + 1) - A1(r, j)) / dx;
                psi[s * nx + j] = -F / w_.cell[idx(r, j)];
            }
        r = k + s;
        if (r >= 0 && r < nt)
            for (int j = 0; j < nx; ++j) {
                cd bt = w_.w1[idx(r, j)] * A1(r, j);
                if (r > 0) bt -= w_.w1[idx(r - 1, j)] * A1(r - 1, j);
                cd bx = w_.w0[idx(r, j)] * A0(r, j) - w_.w0[idx(r, j - 1)] * A0(r, j - 1);
                phi[s * nx + j] = -(bt / dt - bx / dx) / w_.node[idx(r, j)];
            }
    }
    for (int j = 0; j < nx; ++j) {
        const std::size_t i = idx(k, j);
        const int jm = L.wrap(j - 1), jp = L.wrap(j + 1);
        cd dF0 = (psi[nx + j] - psi[j]) / dt / w_.w0[i];
        cd dF1 = (psi[nx + j] - psi[nx + jm]) / dx / w_.w1[i];
        cd dd0 = (phi[jp] - phi[j]) / dx;
        cd dd1 = (phi[nx + j] - phi[j]) / dt;
        cd a0 = u(k, j, 0), a1 = u(k, j, 1);
        switch (which_) {
            case ProcaOp::P:
                out[2 * j] = -dF0 + m2_ * a0;
                out[2 * j + 1] = -dF1 + m2_ * a1;
                break;
            case ProcaOp::Q:
                out[2 * j] = a0 - dd0 / m2_;
                out[2 * j + 1] = a1 - dd1 / m2_;
                break;
            case ProcaOp::R:
                out[2 * j] = -dF0 - dd0 + m2_ * a0;
                out[2 * j + 1] = -dF1 - dd1 + m2_ * a1;
                break;
        }
    }
}

namespace {

// -delta d + m^2 on 0-forms with the weights of the 1-form operators, so that R d = d R0 holds
// row by row.
class GaugeOperator : public StencilOperator {
public:
    GaugeOperator(LatticePtr lat, double mass_sq) : lat_(std::move(lat)), m2_(mass_sq), w_(HodgeWeights::build(*lat_)) {
        const SpacetimeLattice& L = *lat_;
        double sc = 0.0;
        for (std::size_t i = 0; i < L.size(); ++i)
            sc = std::max(sc, 4.0 * std::max(w_.w0[i], w_.w1[i]) / w_.node[i] * (1.0 / (L.dt * L.dt) + 1.0 / (L.dx * L.dx)));
        scale_ = sc + std::abs(m2_);
    }

    const LatticePtr& lattice_ptr() const override { return lat_; }
    int fiber() const override { return 1; }
    int time_reach() const override { return 1; }
    int space_reach() const override { return 1; }
    double scale() const override { return scale_; }

    void apply_row(const Section& u, int k, cd* out) const override {
        const SpacetimeLattice& L = *lat_;
        const double dt = L.dt, dx = L.dx;
        auto idx = [&](int r, int j) { return L.index(r, L.wrap(j)); };
        auto a0 = [&](int j) { return (u.get(k, j + 1) - u.get(k, j)) / dx; };
        auto a1 = [&](int r, int j) { return (u.get(r + 1, j) - u.get(r, j)) / dt; };
        for (int j = 0; j < L.n_x; ++j) {
            cd bt = w_.w1[idx(k, j)] * a1(k, j);
            if (k > 0) bt -= w_.w1[idx(k - 1, j)] * a1(k - 1, j);
            cd bx = w_.w0[idx(k, j)] * a0(j) - w_.w0[idx(k, j - 1)] * a0(j - 1);
            cd delta = -(bt / dt - bx / dx) / w_.node[idx(k, j)];
            out[j] = -delta + m2_ * u(k, j);
        }
    }

private:
    LatticePtr lat_;
    double m2_;
    HodgeWeights w_;
    double scale_ = 1.0;
};

double require_mass(double m2) {
    if (!std::isfinite(m2) || m2 == 0.0) throw PreconditionError("Proca model requires a finite m^2 != 0");
    return m2;
}

}  // namespace

ProcaModel::ProcaModel(LatticePtr lat, double mass_sq)
    : m2_(require_mass(mass_sq)),
      p_(std::make_shared<const ProcaOperator>(lat, mass_sq, ProcaOp::P)),
      q_(std::make_shared<const ProcaOperator>(lat, mass_sq, ProcaOp::Q)),
      r_(std::make_shared<const ProcaOperator>(lat, mass_sq, ProcaOp::R)),
      solver_(r_),
      gauge_solver_(std::make_shared<const GaugeOperator>(lat, mass_sq)) {}

// F d = d F0, so F Q f = F f - m^-2 d F0 delta f. The gauge part comes from the scalar march and
// a single difference, which keeps the m^-2 d delta factor off the marching roundoff.
Section ProcaModel::green(const Section& f, Which which) const {
    FormField phi(f.lattice_ptr(), 0);
    phi.data = gauge_solver_.solve(codifferential(as_one_form(f)).data, which);
    Section e = solver_.solve(f, which);
    e += (-1.0 / m2_) * exterior_d(phi).data;
    return e;
}

Section ProcaModel::green_outer(const Section& f, Which which) const { return q_->apply(solver_.solve(f, which)); }

cd ProcaModel::pair(const Section& a, const Section& b) const {
    if (a.fiber() != 2 || b.fiber() != 2) throw PreconditionError("Proca pairing needs 1-forms");
    const SpacetimeLattice& L = lattice();
    const HodgeWeights& w = p_->weights();
    cd acc = 0.0;
    for (int k = 0; k < L.n_t; ++k)
        for (int j = 0; j < L.n_x; ++j) {
            std::size_t i = L.index(k, j);
            acc += w.w1[i] * a(k, j, 1) * b(k, j, 1) - w.w0[i] * a(k, j, 0) * b(k, j, 0);
        }
    return acc * (L.dt * L.dx);
}

SupportMask ProcaModel::support_of(const Section& s) const {
    const SpacetimeLattice& L = lattice();
    SupportMask m(L.n_t, L.n_x);
    const double thr = 1e-14 * s.max_abs();
    for (int k = 0; k < L.n_t; ++k)
        for (int j = 0; j < L.n_x; ++j) {
            if (std::abs(s(k, j, 0)) > thr) {
                m.set(k, j);
                m.set(k, L.wrap(j + 1));
            }
            if (std::abs(s(k, j, 1)) > thr) {
                m.set(k, j);
                if (k + 1 < L.n_t) m.set(k + 1, j);
            }
        }
    m.class_hint = classify_support(m, 1);
    return m;
}

double ProcaModel::component_time(int k, int c) const { return lattice().t(k) + (c == 1 ? 0.5 * lattice().dt : 0.0); }

NormallyHyperbolicForm ProcaModel::stepping_form() const {
    const SpacetimeLattice& L = lattice();
    const double b0 = L.lapse.front(), h0 = L.spatial_metric.front();
    for (std::size_t i = 0; i < L.size(); ++i)
        if (L.lapse[i] != b0 || L.spatial_metric[i] != h0)
            throw PreconditionError("the Proca stepping form is only available on flat lattices");
    NormallyHyperbolicForm form(p_->lattice_ptr(), 2);
    for (int k = 0; k < L.n_t; ++k)
        for (int j = 0; j < L.n_x; ++j) {
            form.C(k, j)[0] = m2_;
            form.C(k, j)[3] = m2_;
        }
    return form;
}

FormField as_one_form(const Section& s) {
    if (s.fiber() != 2) throw PreconditionError("1-forms have two components");
    FormField f(s.lattice_ptr(), 1);
    f.data = s;
    return f;
}

FormField proca_apply(const ProcaModel& model, const FormField& a) {
    FormField out = codifferential(exterior_d(a));
    out.data *= -1.0;
    out.data += model.mass_sq() * a.data;
    return out;
}

FormField proca_q(const ProcaModel& model, const FormField& a) {
    FormField out = exterior_d(codifferential(a));
    out.data *= -1.0 / model.mass_sq();
    out.data += a.data;
    return out;
}

double proca_tau(const Observable& a, const Observable& b) {
    if (dynamic_cast<const ProcaModel*>(a.model) == nullptr) throw PreconditionError("proca_tau needs Proca observables");
    return causal_pairing(a, b).real();
}

double proca_sigma_slice(const ProcaModel& model, const Section& a, const Section& b, int k, double tol) {
    const SpacetimeLattice& L = model.lattice();
    if (k < 1 || k > L.n_t - 2) throw PreconditionError("slice must be an interior row");
    if (onshell_residual(model.dynamics(), a, 2) > tol || onshell_residual(model.dynamics(), b, 2) > tol)
        throw PreconditionError("proca_sigma_slice needs on-shell fields");
    FormField fa = exterior_d(as_one_form(a)), fb = exterior_d(as_one_form(b));
    double acc = 0.0;
    for (int j = 0; j < L.n_x; ++j) {
        const int jn = L.wrap(j + 1);
        double be = 0.5 * (L.beta(k, j) + L.beta(k, jn)), he = 0.5 * (L.h(k, j) + L.h(k, jn));
        cd Fa = 0.5 * (fa.data(k - 1, j) + fa.data(k, j));
        cd Fb = 0.5 * (fb.data(k - 1, j) + fb.data(k, j));
        acc += (b(k, j, 0) * Fa - a(k, j, 0) * Fb).real() / std::sqrt(be * he);
    }
    return acc * L.dx;
}

}  // namespace ghft
