#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <string>
#include <vector>

#include "ghft/exact.hpp"
#include "ghft/greenops.hpp"

namespace ghft {

// eta = diag(+1, -1, -1, -1)
inline int eta(int mu) { return mu == 0 ? 1 : -1; }

// gamma_mu with lower frame index, exact entries.
struct GammaRep {
    std::array<Mat4, 4> lower;

    // gamma_0 = [[0, 1], [1, 0]], gamma_i = [[0, sigma_i], [-sigma_i, 0]]
    static GammaRep chiral();
    Mat4 upper(int mu) const { return GaussRat(eta(mu)) * lower[mu]; }
    // gamma(n) = n^mu gamma_mu
    Mat4 slash(const std::array<GaussRat, 4>& n) const;
};

struct CliffordCheck {
    std::string name;
    bool pass = false;
};

struct CliffordReport {
    std::vector<CliffordCheck> checks;
    bool all_pass() const;
    std::size_t failures() const;
};

// Anticommutators, adjoint and conjugation relations, A Cs = -Cc A on random exact spinors,
// and positivity of gamma_0 gamma(n) for random future timelike n (Sylvester minors).
CliffordReport clifford_check(const GammaRep& rep, std::uint64_t seed = 1);

// Pointwise maps. Cospinors are stored as row 4-vectors.
Spinor4 adjunction(const GammaRep& g, const Spinor4& s);          // s^dagger gamma_0
Spinor4 adjunction_inverse(const GammaRep& g, const Spinor4& w);  // (w gamma_0)^dagger
Spinor4 charge_conj_s(const GammaRep& g, const Spinor4& s);       // conj(gamma_2 s)
Spinor4 charge_conj_c(const GammaRep& g, const Spinor4& w);       // conj(w) gamma_2

// Field versions with double entries.
Section adjunction(const Section& s);
Section adjunction_inverse(const Section& w);
Section charge_conj_s(const Section& s);
Section charge_conj_c(const Section& w);

using CMat4 = Eigen::Matrix4cd;
// numeric copies of the chiral matrices
const std::array<CMat4, 4>& gamma_lower();
CMat4 to_numeric(const Mat4& m);

// Diagonal comoving coframe e^0 = sqrt(beta) dt, e^i = a dx^i on a homogeneous lattice,
// with frame Christoffels Gamma^rho_{mu nu} = e^rho(nabla_{eps_mu} eps_nu) and the
// four-dimensional scalar curvature. Rows -1 and n_t are included for stencil use.
struct CoframeData {
    LatticePtr lattice;
    std::vector<double> c, c_dot;        // beta^{-1/2}
    std::vector<double> a, a_dot, a_ddot;
    std::vector<double> curvature;       // R of the 4d metric
    std::vector<double> christoffel;     // 64 per row: rho * 16 + mu * 4 + nu
    std::vector<CMat4> omega;            // 4 per row: 1/4 Gamma^rho_{mu nu} gamma_rho gamma^nu

    int rows() const { return lattice->n_t + 2; }
    std::size_t row(int k) const { return static_cast<std::size_t>(k + 1); }
    double Gamma(int k, int rho, int mu, int nu) const { return christoffel[row(k) * 64 + rho * 16 + mu * 4 + nu]; }
    const CMat4& Omega(int k, int mu) const { return omega[row(k) * 4 + mu]; }
    double tilde_a(int k) const { return std::pow(a[row(k)], 1.5); }
    // max |eta(e, e) - g| over the lattice
    double metric_error() const;
    // max |Gamma^s_{mu nu} eta_{rho s} + Gamma^s_{mu rho} eta_{nu s}|
    double metricity_error() const;
};

CoframeData build_coframe(LatticePtr lat);

// Frame covariant derivative along eps_mu with centered differences (reduced: d_2 = d_3 = 0).
Section spin_covariant_derivative(const CoframeData& cf, int mu, const Section& s);
// Cospinor version fixed by the Leibniz rule: d_X w - w Omega_X.
Section cospinor_covariant_derivative(const CoframeData& cf, int mu, const Section& w);
// Sup over interior rows of d_X(w s) - (nabla w) s - w (nabla s).
double leibniz_residual(const CoframeData& cf, int mu, const Section& w, const Section& s);

// eta^{mu nu} gamma_mu nabla_{eps_nu} s assembled from spin_covariant_derivative
Section slash_generic(const CoframeData& cf, const Section& s);
// eta^{ab} (nabla_a nabla_b - nabla_{nabla_a eps_b}) s
Section connection_laplacian(const CoframeData& cf, const Section& s);

// Sup over interior rows, frame directions mu and coordinate slots nu of
// d_{eps_mu}(gamma(d_nu)) + [Omega_mu, gamma(d_nu)] - gamma(nabla_{eps_mu} d_nu).
double nabla_gamma_residual(const CoframeData& cf);

// P_s = i slash - m on spinors, P_c = -i slash - m on cospinors, with
// slash s = c a^{-3/2} gamma^0 D_t(a^{3/2} s) + a^{-1} gamma^1 D_x s (centered differences).
// The discrete slash is exactly anti-self-adjoint for the weights sqrt(beta) a^3 dt dx.
class DiracOperator : public StencilOperator {
public:
    DiracOperator(std::shared_ptr<const CoframeData> cf, double mass, bool cospinor);

    const LatticePtr& lattice_ptr() const override { return cf_->lattice; }
    int fiber() const override { return 4; }
    int time_reach() const override { return 1; }
    int space_reach() const override { return 1; }
    ScalarKind kind() const override { return ScalarKind::complex; }
    void apply_row(const Section& u, int k, cd* out) const override;
    double scale() const override { return scale_; }

    // same row with the field read from a (3 x n_x x 4) buffer holding rows k-1, k, k+1
    void apply_row_buffer(const cd* rows3, int k, cd* out) const;
    double mass() const { return m_; }
    bool cospinor() const { return cospinor_; }
    const CoframeData& coframe() const { return *cf_; }
    // coefficient of row k +- 1 in row k, without the gamma^0 factor
    double time_coefficient(int k, int dk) const;

private:
    template <class Get>
    void row_kernel(Get get, int k, cd* out) const;

    std::shared_ptr<const CoframeData> cf_;
    double m_;
    bool cospinor_;
    double scale_ = 1.0;
};

// Discrete composite P o P (reach 2), marched to obtain the companion Green operators F.
class DiracSquareOperator : public StencilOperator {
public:
    explicit DiracSquareOperator(std::shared_ptr<const DiracOperator> p) : p_(std::move(p)) {}

    const LatticePtr& lattice_ptr() const override { return p_->lattice_ptr(); }
    int fiber() const override { return 4; }
    int time_reach() const override { return 2; }
    int space_reach() const override { return 2; }
    ScalarKind kind() const override { return ScalarKind::complex; }
    void apply_row(const Section& u, int k, cd* out) const override;
    std::vector<cd> edge_block(int k, int j, const std::vector<int>& group, Which which) const override;
    double scale() const override { return p_->scale() * p_->scale(); }

private:
    std::shared_ptr<const DiracOperator> p_;
};

class DiracModel : public GreenModel {
public:
    DiracModel(LatticePtr lat, double mass, bool cospinor = false);

    const StencilOperator& dynamics() const override { return *op_; }
    // E = P F with F the marching inverse of P o P
    Section green(const Section& f, Which which) const override;
    // <s, t>_s = sum W s^dagger gamma_0 t, <w, z>_c = sum W z gamma_0 w^dagger, W = sqrt(beta) a^3 dt dx
    cd pair(const Section& a, const Section& b) const override;
    int boundary_width() const override { return 4; }
    bool bosonic() const override { return false; }

    const DiracOperator& op() const { return *op_; }
    const DiracSquareOperator& square() const { return *sq_; }
    const CoframeData& coframe() const { return *cf_; }
    bool cospinor() const { return op_->cospinor(); }
    double mass() const { return op_->mass(); }
    // -P_s^2 = slash^2 + 2 i m slash - m^2 as a normally hyperbolic form (spinor model)
    NormallyHyperbolicForm square_form() const;

private:
    std::shared_ptr<const CoframeData> cf_;
    std::shared_ptr<const DiracOperator> op_;
    std::shared_ptr<const DiracSquareOperator> sq_;
    MarchingSolver solver_;
};

// h_s = -i <s, E t>_s for spinor models, h_c = i <w, E z>_c for cospinor models.
cd hermitian_form(const Observable& a, const Observable& b);

// Slice form with n-slash = gamma_0 and dSigma = a^3 dx: sum phi^dagger psi a^3 dx (spinors),
// sum psi phi^dagger a^3 dx (cospinors). Rejects fields off shell beyond tol.
cd hermitian_on_slice(const DiracModel& model, const Section& phi, const Section& psi, int t_index,
                      double tol = 1e-6);

}  // namespace ghft
