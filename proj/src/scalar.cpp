#include "ghft/scalar.hpp"

#include <algorithm>
#include <cmath>

namespace ghft {

ScalarOperator::ScalarOperator(LatticePtr lat, double mass_sq, double coupling)
    : lat_(std::move(lat)), m2_(mass_sq), xi_(coupling) {
    if (!std::isfinite(m2_) || !std::isfinite(xi_)) throw PreconditionError("mass and coupling must be finite");
    const SpacetimeLattice& L = *lat_;
    const std::size_t n = L.size();
    inv_vol_.resize(n);
    s_node_.resize(n);
    t_half_.resize(n);
    pot_.resize(n);
    for (int k = 0; k < L.n_t; ++k)
        for (int j = 0; j < L.n_x; ++j) {
            std::size_t i = L.index(k, j);
            inv_vol_[i] = 1.0 / std::sqrt(L.beta(k, j) * L.h(k, j));
            s_node_[i] = std::sqrt(L.h(k, j) / L.beta(k, j));
            int jn = L.wrap(j + 1);
            t_half_[i] = 0.5 * (std::sqrt(L.beta(k, j) / L.h(k, j)) + std::sqrt(L.beta(k, jn) / L.h(k, jn)));
            pot_[i] = m2_ + xi_ * L.R(k, j);
        }
    double sc = 0.0;
    for (int k = 0; k < L.n_t; ++k)
        for (int j = 0; j < L.n_x; ++j) {
            std::size_t i = L.index(k, j);
            sc = std::max(sc, inv_vol_[i] * (s_node_[i] / (L.dt * L.dt) + t_half_[i] / (L.dx * L.dx)) +
                                  std::abs(pot_[i]));
        }
    scale_ = sc;
}

double ScalarOperator::s_half(int k, int j) const {
    const SpacetimeLattice& L = *lat_;
    if (k < 0) return s_node_[L.index(0, j)];
    if (k >= L.n_t - 1) return s_node_[L.index(L.n_t - 1, j)];
    return 0.5 * (s_node_[L.index(k, j)] + s_node_[L.index(k + 1, j)]);
}

void ScalarOperator::apply_row(const Section& u, int k, cd* out) const {
    const SpacetimeLattice& L = *lat_;
    const double idt2 = 1.0 / (L.dt * L.dt), idx2 = 1.0 / (L.dx * L.dx);
    for (int j = 0; j < L.n_x; ++j) {
        const std::size_t i = L.index(k, j);
        const cd p = u(k, j);
        const double sp = s_half(k, j), sm = s_half(k - 1, j);
        const double tp = t_half_[i], tm = t_half_[L.index(k, L.wrap(j - 1))];
        cd time = (sp * (u.get(k + 1, j) - p) - sm * (p - u.get(k - 1, j))) * idt2;
        cd space = (tp * (u.get(k, j + 1) - p) - tm * (p - u.get(k, j - 1))) * idx2;
        out[j] = inv_vol_[i] * (time - space) + pot_[i] * p;
    }
}

std::vector<cd> ScalarOperator::edge_block(int k, int j, const std::vector<int>&, Which which) const {
    const double s = which == Which::retarded ? s_half(k, j) : s_half(k - 1, j);
    return {cd(inv_vol_[lat_->index(k, j)] * s / (lat_->dt * lat_->dt))};
}

ScalarModel::ScalarModel(LatticePtr lat, double mass_sq, double coupling)
    : op_(std::make_shared<const ScalarOperator>(std::move(lat), mass_sq, coupling)), solver_(op_) {}

NormallyHyperbolicForm ScalarModel::stepping_form() const {
    const SpacetimeLattice& L = lattice();
    NormallyHyperbolicForm form(op_->lattice_ptr(), 1);
    auto S = [&](int k, int j) { return std::sqrt(L.h(k, j) / L.beta(k, j)); };
    auto T = [&](int k, int j) { return std::sqrt(L.beta(k, L.wrap(j)) / L.h(k, L.wrap(j))); };
    for (int k = 0; k < L.n_t; ++k)
        for (int j = 0; j < L.n_x; ++j) {
            int kp = std::min(k + 1, L.n_t - 1), km = std::max(k - 1, 0);
            double ds = (S(kp, j) - S(km, j)) / ((kp - km) * L.dt);
            double dT = (T(k, j + 1) - T(k, j - 1)) / (2.0 * L.dx);
            double iv = 1.0 / std::sqrt(L.beta(k, j) * L.h(k, j));
            *form.Bt(k, j) = iv * ds;
            *form.Bx(k, j) = -iv * dT;
            *form.C(k, j) = op_->potential(k, j);
        }
    return form;
}

double symplectic_tau(const Observable& a, const Observable& b) { return causal_pairing(a, b).real(); }

double sigma_on_slice(const ScalarModel& model, const Section& phi, const Section& psi, int k, double tol) {
    const SpacetimeLattice& L = model.lattice();
    if (k < 1 || k > L.n_t - 2) throw PreconditionError("slice must be an interior row");
    if (onshell_residual(model.dynamics(), phi) > tol || onshell_residual(model.dynamics(), psi) > tol)
        throw PreconditionError("sigma_on_slice needs on-shell fields");
    CauchySlice sl = cauchy_slice(L, k);
    double acc = 0.0;
    for (int j = 0; j < L.n_x; ++j) {
        double n_psi = sl.normal_scale[j] * (psi(k + 1, j) - psi(k - 1, j)).real() / (2.0 * L.dt);
        double n_phi = sl.normal_scale[j] * (phi(k + 1, j) - phi(k - 1, j)).real() / (2.0 * L.dt);
        acc += (phi(k, j).real() * n_psi - psi(k, j).real() * n_phi) * sl.induced_volume[j];
    }
    return acc;
}

double discrete_wronskian(const ScalarModel& model, const Section& phi, const Section& psi, int k) {
    const SpacetimeLattice& L = model.lattice();
    if (k < 0 || k > L.n_t - 2) throw PreconditionError("Wronskian rows outside the lattice");
    double acc = 0.0;
    for (int j = 0; j < L.n_x; ++j)
        acc += model.op().s_half(k, j) *
               (phi(k, j) * psi(k + 1, j) - psi(k, j) * phi(k + 1, j)).real();
    return acc * L.dx / L.dt;
}

}  // namespace ghft
