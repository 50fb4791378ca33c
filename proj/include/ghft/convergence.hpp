#pragma once

#include <string>
#include <vector>

#include "ghft/dirac.hpp"
#include "ghft/proca.hpp"
#include "ghft/scalar.hpp"

namespace ghft {

// Level l has 2^l times the samples and 1/2^l times the steps of the base grid.
SpacetimeSpec refined(const SpacetimeSpec& base, int level);
LatticePtr make_lattice(const SpacetimeSpec& spec);

// Bump of the given coordinate radius centred at (t0, x0), periodic in x, with one random
// amplitude per fiber component (complex for complex models).
Section smooth_source(const GreenModel& model, double t0, double x0, double radius, Xorshift64& rng);
// Low-mode trigonometric field on the whole lattice.
Section smooth_field(const LatticePtr& lat, int fiber, ScalarKind kind, Xorshift64& rng);

// |slice form(E f, E h) - causal form(f, h)| / |causal form(f, h)| on row k: sigma vs tau for
// the scalar and Proca models, the slice Hermitian form vs h_s for Dirac spinors.
double slice_form_error(const GreenModel& model, const Section& f, const Section& h, int k);

// sup |slash^2 s - box s - R s / 4| over rows [margin, n_t - margin)
double lichnerowicz_residual(const CoframeData& cf, const Section& s, int margin = 3);
// sup |P_s P_s s + square_form(s)| over rows [margin, n_t - margin)
double square_expansion_residual(const DiracModel& model, const Section& s, int margin = 3);
// sup |P phi - f| for phi = g(t) cos(kappa x + theta) with f computed in closed form
// (homogeneous lattices), over rows [1, n_t - 1)
double scalar_manufactured_residual(const ScalarModel& model);

struct ConvergenceSeries {
    std::string identity;
    std::vector<int> n_t;
    std::vector<int> n_x;
    std::vector<double> error;
    // identities that hold to roundoff at every level carry no order
    bool exact = false;

    // log2(e_l / e_{l+1}) for consecutive levels
    std::vector<double> orders() const;
    // least-squares slope of -log2 e against the level
    double fitted_order() const;
};

}  // namespace ghft
