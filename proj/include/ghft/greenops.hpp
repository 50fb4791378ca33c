#pragma once

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "ghft/section.hpp"

namespace ghft {

// Linear operator with a finite stencil: equation row k reads rows k - s .. k + s
// and columns j - r .. j + r of its argument (zero outside the time range, periodic in x).
class StencilOperator {
public:
    virtual ~StencilOperator() = default;

    virtual const LatticePtr& lattice_ptr() const = 0;
    virtual int fiber() const = 0;
    virtual int time_reach() const = 0;
    virtual int space_reach() const = 0;
    virtual ScalarKind kind() const { return ScalarKind::real; }
    // out[j * fiber + c] = (L u)(k, j, c)
    virtual void apply_row(const Section& u, int k, cd* out) const = 0;
    // Components solved together, in order, when marching in the given direction.
    virtual std::vector<std::vector<int>> groups(Which which) const;
    // Coefficient of u(k +- s, j, group) in equation (k, j, group), row-major, or empty to
    // let the solver probe it numerically.
    virtual std::vector<cd> edge_block(int k, int j, const std::vector<int>& group, Which which) const;
    // typical coefficient magnitude, used to normalise residuals
    virtual double scale() const = 0;

    const SpacetimeLattice& lattice() const { return *lattice_ptr(); }
    Section zero() const { return Section(lattice_ptr(), fiber(), kind()); }
    Section apply(const Section& u) const;
};

// Coefficient blocks of an operator obtained by applying it to combs of unit impulses.
// Returns, for every column j, the |g| x |g| block of equation (k, j, g) against u(target, j, g).
std::vector<std::vector<cd>> probe_blocks(const StencilOperator& op, int k, int target, const std::vector<int>& group);

// Row-by-row marching inverse of a stencil operator. Retarded: rows below the source are zero and
// equation row k determines row k + s. Advanced: the mirror image.
class MarchingSolver {
public:
    explicit MarchingSolver(std::shared_ptr<const StencilOperator> op);

    const StencilOperator& op() const { return *op_; }
    // Discrete E^+- of the operator. Equations hold on rows [0, n_t - s) (retarded) or [s, n_t)
    // (advanced); the source must vanish within s rows of both time boundaries.
    Section solve(const Section& f, Which which) const;
    // Sourced Cauchy problem with data u0 and normal derivative u1 on a slice (reach-1 operators).
    Section cauchy(int t_index, const std::vector<cd>& u0, const std::vector<cd>& u1, const Section& source,
                   TimeDirection dir) const;

private:
    struct GroupBlocks {
        std::vector<int> comps;
        bool scalar = true;        // every block a multiple of the identity
        std::vector<cd> inv;       // scalar: one entry per (row, j); else q*q per (row, j)
    };
    void build(Which which, std::vector<GroupBlocks>& out) const;
    void march_row(Section& u, const Section& f, int k, int kt, const std::vector<GroupBlocks>& blocks,
                   std::vector<cd>& scratch) const;

    std::shared_ptr<const StencilOperator> op_;
    std::vector<GroupBlocks> fwd_;
    std::vector<GroupBlocks> bwd_;
};

// Interface shared by the scalar, Dirac and Proca models.
class GreenModel {
public:
    virtual ~GreenModel() = default;
    // the dynamical operator L
    virtual const StencilOperator& dynamics() const = 0;
    virtual Section green(const Section& f, Which which) const = 0;
    // model pairing of sections; sesquilinear models conjugate the first argument
    virtual cd pair(const Section& a, const Section& b) const = 0;
    virtual SupportMask support_of(const Section& s) const { return s.support(); }
    // coordinate time carried by storage row k, component c (staggered fields differ)
    virtual double component_time(int k, int c) const;
    // rows next to each time boundary that sources must avoid
    virtual int boundary_width() const { return dynamics().time_reach() + 1; }
    virtual bool bosonic() const { return true; }

    const SpacetimeLattice& lattice() const { return dynamics().lattice(); }
    Section zero() const { return dynamics().zero(); }
    Section causal(const Section& f) const;
    // rows on which the Green identities are asserted
    int interior_margin() const { return 2 * dynamics().time_reach() + 1; }
};

// Plain quadrature against volume_weights with the Euclidean fiber product.
cd pair(const Section& a, const Section& b, bool sesquilinear = false);

// Checks the support class and boundary clearance, then applies the model's E+-.
Section green_apply(const GreenModel& model, const Section& f, Which which);
// E f = E^- f - E^+ f
Section causal_propagator(const GreenModel& model, const Section& f);

Section solve_cauchy(const MarchingSolver& solver, const CauchySlice& slice, const std::vector<cd>& u0,
                     const std::vector<cd>& u1, const Section& source, TimeDirection dir);

// Smoothstep partition of unity in t: chi_plus rises from 0 to 1 across [t_lo, t_hi].
// Grid values are rounded to multiples of 2^-40 so chi_plus + chi_minus == 1 exactly.
struct Partition {
    double t_lo = 0.0;
    double t_hi = 0.0;
    double chi_plus(double t) const;
    double chi_minus(double t) const { return 1.0 - chi_plus(t); }
    static Partition middle_third(const SpacetimeLattice& lat);
};

// h = E^+(chi_plus f) + E^-(chi_minus f), so that L h = f.
Section split_solve(const GreenModel& model, const Section& f, const Partition& chi);

// Coefficient form L = g^{mu nu} d_mu d_nu + B^t d_t + B^x d_x + C with fiber-matrix fields.
struct NormallyHyperbolicForm {
    LatticePtr lattice;
    int fiber = 1;
    // row-major fiber x fiber blocks per lattice point
    std::vector<cd> b_t, b_x, c;

    NormallyHyperbolicForm() = default;
    NormallyHyperbolicForm(LatticePtr lat, int fib);
    cd* Bt(int k, int j) { return &b_t[block(k, j)]; }
    cd* Bx(int k, int j) { return &b_x[block(k, j)]; }
    cd* C(int k, int j) { return &c[block(k, j)]; }
    const cd* Bt(int k, int j) const { return &b_t[block(k, j)]; }
    const cd* Bx(int k, int j) const { return &b_x[block(k, j)]; }
    const cd* C(int k, int j) const { return &c[block(k, j)]; }
    std::size_t block(int k, int j) const { return lattice->index(k, j) * fiber * fiber; }
};

// Centered-difference evaluation of the form (one-sided rows are left zero).
Section apply_form(const NormallyHyperbolicForm& form, const Section& u);

// (i lambda)^-2 e^{-i lambda zeta.x} L e^{i lambda zeta.x} at (k, j) for lambda in `scales`,
// extrapolated to lambda -> infinity; row-major fiber x fiber.
std::vector<cd> symbol_probe(const NormallyHyperbolicForm& form, int k, int j, std::array<double, 2> zeta,
                             std::array<double, 3> scales = {8.0, 16.0, 32.0});

struct AdjointResidual {
    double operator_residual = 0.0;  // |(L* g, f) - (g, L f)|
    double green_residual = 0.0;     // max over +- of |(E*-+ g, f) - (g, E+- f)|
};

AdjointResidual adjoint_residual(const GreenModel& model, const GreenModel& partner, const Section& f,
                                 const Section& g);

struct IdentityResiduals {
    double l_after_e[2] = {0.0, 0.0};  // ||L E+- f - f|| / ||f||, [retarded, advanced]
    double e_after_l[2] = {0.0, 0.0};  // ||E+- L f - f|| / ||f|| on interior rows
    std::size_t support_violations[2] = {0, 0};
    double worst() const;
};

IdentityResiduals green_identities(const GreenModel& model, const Section& f);

// Cells of supp(E+- f) outside the discrete cone of supp f.
std::size_t support_violations(const GreenModel& model, const Section& f, const Section& ef, Which which);

// Compactly supported representative of a class in the quotient by the image of L.
struct Observable {
    Section rep;
    const GreenModel* model = nullptr;
};

// Checks compactness and boundary clearance of f.
Observable make_observable(const GreenModel& model, const Section& f);
// Model pairing of the representative with phi.
cd evaluate(const Observable& obs, const Section& phi);
// ||E(f_a - f_b)|| <= tol (||f_a|| + ||f_b||), measured on rows at least boundary_width()
// away from either end of the lattice
bool observable_equal(const Observable& a, const Observable& b, double tol = 1e-8);
// pair(f_a, E f_b): tau for bosonic models, <f_a, E f_b> for the Dirac forms
cd causal_pairing(const Observable& a, const Observable& b);

// Representative of [f] supported in the storage rows [k_lo, k_hi): f' = L(chi_minus E f),
// with the partition transition inside the band. Rows where chi_minus is constant across the
// stencil are set to exactly zero.
Observable time_slice_project(const Observable& obs, int k_lo, int k_hi);

// max |L u| over rows [margin, n_t - margin) relative to scale * ||u||
double onshell_residual(const StencilOperator& op, const Section& u, int margin = 1);

// C-infinity bump exp(1 - 1 / (1 - r^2)) on r < 1, zero outside.
double bump(double r);

}  // namespace ghft
