#pragma once

#include <memory>

#include "ghft/greenops.hpp"

namespace ghft {

// Differential form on the staggered complex. Primal placement: 0-forms on nodes (k, j);
// 1-forms with component 0 = A_x on x-edges (k, j + 1/2) and component 1 = A_t on t-edges
// (k + 1/2, j); 2-forms (coefficient of dt ^ dx) on cells (k + 1/2, j + 1/2) stored at (k, j).
// Dual forms live on the same storage with the roles swapped: dual 0-forms on cells, dual
// 1-forms with component 0 = dt-coefficient at (k, j + 1/2) and component 1 = dx-coefficient
// at (k + 1/2, j), dual 2-forms on nodes. Values outside rows [0, n_t) are zero.
struct FormField {
    int degree = 0;
    bool dual = false;
    Section data;

    FormField() = default;
    FormField(LatticePtr lat, int degree, bool dual = false);
    const SpacetimeLattice& lattice() const { return data.lattice(); }
};

// Metric weights of the complex.
struct HodgeWeights {
    std::vector<double> node;   // sqrt(beta h) at nodes
    std::vector<double> cell;   // sqrt(beta h) at cells
    std::vector<double> w0;     // sqrt(beta/h) on x-edges
    std::vector<double> w1;     // sqrt(h/beta) on t-edges
    static HodgeWeights build(const SpacetimeLattice& lat);
};

// Coboundary on the primal or dual complex (degree 0 or 1).
FormField exterior_d(const FormField& f);
// Primal k-form to dual (2 - k)-form and back. On dual input hodge_star applies the
// dual-to-primal star, so ** = id on 1-forms and -id on 0- and 2-forms.
FormField hodge_star(const FormField& f);
FormField hodge_star_inverse(const FormField& f);
// (-1)^k *^{-1} d * on primal forms of degree 1 or 2.
FormField codifferential(const FormField& f);
// integral of a ^ *b for primal forms of equal degree
double form_pairing(const FormField& a, const FormField& b);
// integral of a ^ b for a primal k-form and a dual (2 - k)-form
double wedge_integral(const FormField& primal, const FormField& dual);

enum class ProcaOp { P, Q, R };

// Row-local evaluation of P = -delta d + m^2, Q = 1 - m^-2 d delta and R = -delta d - d delta + m^2
// on primal 1-forms stored as 2-component sections.
class ProcaOperator : public StencilOperator {
public:
    ProcaOperator(LatticePtr lat, double mass_sq, ProcaOp which);

    const LatticePtr& lattice_ptr() const override { return lat_; }
    int fiber() const override { return 2; }
    int time_reach() const override { return 1; }
    int space_reach() const override { return 1; }
    void apply_row(const Section& u, int k, cd* out) const override;
    // R marches A_x before A_t forward in time and A_t before A_x backward.
    std::vector<std::vector<int>> groups(Which which) const override;
    double scale() const override { return scale_; }
    const HodgeWeights& weights() const { return w_; }

private:
    LatticePtr lat_;
    double m2_;
    ProcaOp which_;
    HodgeWeights w_;
    double scale_ = 1.0;
};

class ProcaModel : public GreenModel {
public:
    ProcaModel(LatticePtr lat, double mass_sq);

    const StencilOperator& dynamics() const override { return *p_; }
    // E = F Q with F the marching inverse of R, evaluated as F - m^-2 d F0 delta with F0 the
    // marching inverse of -delta d + m^2 on 0-forms
    Section green(const Section& f, Which which) const override;
    // the same operator composed as Q F
    Section green_outer(const Section& f, Which which) const;
    cd pair(const Section& a, const Section& b) const override;
    // closure: every stored component marks the nodes bounding its edge
    SupportMask support_of(const Section& s) const override;
    double component_time(int k, int c) const override;
    int boundary_width() const override { return 3; }

    double mass_sq() const { return m2_; }
    const ProcaOperator& P() const { return *p_; }
    const ProcaOperator& Q() const { return *q_; }
    const ProcaOperator& R() const { return *r_; }
    // R = box + m^2 componentwise; only defined on flat lattices
    NormallyHyperbolicForm stepping_form() const;

private:
    double m2_;
    std::shared_ptr<const ProcaOperator> p_, q_, r_;
    MarchingSolver solver_;
    MarchingSolver gauge_solver_;
};

FormField as_one_form(const Section& s);
// P A = -delta d A + m^2 A and Q A = -m^-2 d delta A + A through the FormField operations
FormField proca_apply(const ProcaModel& model, const FormField& a);
FormField proca_q(const ProcaModel& model, const FormField& a);

// tau([a], [b]) = (a, E b)
double proca_tau(const Observable& a, const Observable& b);
// Slice sum of (B_x F_A - A_x F_B) / sqrt(beta h) dx along the x-edges of row t_index,
// with F = dA averaged over the two adjacent cell rows.
double proca_sigma_slice(const ProcaModel& model, const Section& a, const Section& b, int t_index,
                         double tol = 1e-6);

}  // namespace ghft
