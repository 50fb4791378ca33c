#pragma once

#include <memory>

#include "ghft/greenops.hpp"

namespace ghft {

// P phi = (1/sqrt(beta h)) [D_t(S D_t phi) - D_x(T D_x phi)] + (m^2 + xi R) phi
// with S = sqrt(h/beta), T = sqrt(beta/h) taken at half points. Symmetric under the
// weights sqrt(beta h) dt dx, so the discrete operator is exactly formally self-adjoint.
class ScalarOperator : public StencilOperator {
public:
    ScalarOperator(LatticePtr lat, double mass_sq, double coupling);

    const LatticePtr& lattice_ptr() const override { return lat_; }
    int fiber() const override { return 1; }
    int time_reach() const override { return 1; }
    int space_reach() const override { return 1; }
    void apply_row(const Section& u, int k, cd* out) const override;
    std::vector<cd> edge_block(int k, int j, const std::vector<int>& group, Which which) const override;
    double scale() const override { return scale_; }

    double mass_sq() const { return m2_; }
    double coupling() const { return xi_; }
    // S at (k + 1/2, j); clamped to the last row at the top boundary
    double s_half(int k, int j) const;
    double t_half(int k, int j) const { return t_half_[lat_->index(k, j)]; }
    double potential(int k, int j) const { return pot_[lat_->index(k, j)]; }

private:
    LatticePtr lat_;
    double m2_;
    double xi_;
    std::vector<double> inv_vol_;  // 1 / sqrt(beta h)
    std::vector<double> s_node_;
    std::vector<double> t_half_;   // T at (k, j + 1/2)
    std::vector<double> pot_;
    double scale_ = 1.0;
};

class ScalarModel : public GreenModel {
public:
    explicit ScalarModel(LatticePtr lat, double mass_sq = 1.0, double coupling = 0.0);

    const StencilOperator& dynamics() const override { return *op_; }
    Section green(const Section& f, Which which) const override { return solver_.solve(f, which); }
    cd pair(const Section& a, const Section& b) const override { return ghft::pair(a, b, false); }

    const ScalarOperator& op() const { return *op_; }
    std::shared_ptr<const ScalarOperator> op_ptr() const { return op_; }
    const MarchingSolver& solver() const { return solver_; }
    // g^{mu nu} d_mu d_nu + B^mu d_mu + C form of P, with B from differences of S and T
    NormallyHyperbolicForm stepping_form() const;

private:
    std::shared_ptr<const ScalarOperator> op_;
    MarchingSolver solver_;
};

// tau([f], [h]) = (f, E h)
double symplectic_tau(const Observable& a, const Observable& b);

// Sum over the slice of (phi n(psi) - psi n(phi)) sqrt(h) dx with n = beta^{-1/2} d_t by centered
// differences. Rejects fields whose residual exceeds tol relative to scale * ||field||.
double sigma_on_slice(const ScalarModel& model, const Section& phi, const Section& psi, int t_index,
                      double tol = 1e-6);

// Conserved discrete Wronskian between rows k and k + 1.
double discrete_wronskian(const ScalarModel& model, const Section& phi, const Section& psi, int k);

}  // namespace ghft
