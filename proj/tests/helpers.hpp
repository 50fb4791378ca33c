#pragma once

#include <cmath>
#include <memory>

#include "ghft/spacetime.hpp"
#include "ghft/section.hpp"

namespace ghft::test {

inline LatticePtr minkowski(int nt, int nx, double dt, double dx) {
    SpacetimeSpec s;
    s.n_t = nt;
    s.n_x = nx;
    s.dt = dt;
    s.dx = dx;
    return std::make_shared<const SpacetimeLattice>(build_spacetime(s));
}

inline LatticePtr frw(int nt, int nx, double dt, double dx, Profile a, bool conformal = false) {
    SpacetimeSpec s;
    s.family = Family::FRW;
    s.n_t = nt;
    s.n_x = nx;
    s.dt = dt;
    s.dx = dx;
    s.scale = std::move(a);
    s.conformal = conformal;
    return std::make_shared<const SpacetimeLattice>(build_spacetime(s));
}

// bump of radius r cells at (k0, j0), all fiber components scaled by amp
inline Section cell_source(const LatticePtr& lat, int fiber, ScalarKind kind, int k0, int j0, double r, cd amp = 1.0) {
    Section s(lat, fiber, kind);
    const int ri = static_cast<int>(std::ceil(r));
    for (int k = k0 - ri; k <= k0 + ri; ++k)
        for (int dj = -ri; dj <= ri; ++dj) {
            double rr = std::hypot(k - k0, dj) / r;
            if (rr >= 1.0) continue;
            double b = std::exp(1.0 - 1.0 / (1.0 - rr * rr));
            for (int c = 0; c < fiber; ++c) s(k, lat->wrap(j0 + dj), c) = amp * b * (1.0 + 0.25 * c);
        }
    return s;
}

}  // namespace ghft::test
