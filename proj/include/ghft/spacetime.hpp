#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ghft/common.hpp"

namespace ghft {

enum class Family { Minkowski, Ultrastatic, FRW, DeSitter, Custom };

std::string family_name(Family f);
Family parse_family(const std::string& s);

// A function of time with its first two derivatives.
struct Profile {
    std::function<double(double)> value;
    std::function<double(double)> first;
    std::function<double(double)> second;

    static Profile constant(double c);
    // a0 + a1 t + a2 t^2
    static Profile polynomial(double a0, double a1, double a2);
    // r cosh(t / r)
    static Profile cosh_scale(double r);
    // derivatives from centered differences of the sampler
    static Profile from_sampler(std::function<double(double)> f, double step = 1e-4);
    // pointwise square of p (lapse in conformal gauge)
    static Profile squared(const Profile& p);
};

struct SpacetimeSpec {
    Family family = Family::Minkowski;
    int n_t = 64;
    int n_x = 64;
    double dt = 1.0 / 64;
    double dx = 1.0 / 64;
    double t_origin = 0.0;

    // FRW: scale factor a(t). DeSitter uses a(t) = radius cosh(t / radius).
    std::optional<Profile> scale;
    double radius = 1.0;
    // FRW/DeSitter: lapse beta = a^2 (conformal time) instead of beta = 1.
    bool conformal = false;

    // Ultrastatic: h(x).
    std::function<double(double)> spatial_metric;
    // Custom: beta(t, x) and h(t, x).
    std::function<double(double, double)> lapse_fn;
    std::function<double(double, double)> metric_fn;
};

// Product lattice R x S^1 with ds^2 = beta dt^2 - h dx^2. Arrays are indexed k * n_x + j.
struct SpacetimeLattice {
    int n_t = 0;
    int n_x = 0;
    double dt = 0.0;
    double dx = 0.0;
    double t_origin = 0.0;
    Family family = Family::Minkowski;
    std::vector<double> lapse;
    std::vector<double> spatial_metric;
    std::vector<double> scalar_curvature;
    // Present for spatially homogeneous families (Minkowski, FRW, DeSitter).
    std::optional<Profile> scale;
    std::optional<Profile> lapse_profile;

    std::size_t index(int k, int j) const { return static_cast<std::size_t>(k) * n_x + j; }
    double t(int k) const { return t_origin + k * dt; }
    double x(int j) const { return j * dx; }
    double period() const { return n_x * dx; }
    double beta(int k, int j) const { return lapse[index(k, j)]; }
    double h(int k, int j) const { return spatial_metric[index(k, j)]; }
    double R(int k, int j) const { return scalar_curvature[index(k, j)]; }
    int wrap(int j) const { return ((j % n_x) + n_x) % n_x; }
    std::size_t size() const { return static_cast<std::size_t>(n_t) * n_x; }
    bool homogeneous() const { return scale.has_value() && lapse_profile.has_value(); }
    // max over the grid of sqrt(beta / h) * dt / dx
    double courant() const;
};

SpacetimeLattice build_spacetime(const SpacetimeSpec& spec);

enum class SupportClass { Compact, PastCompact, FutureCompact, TimelikeCompact, SpacelikeCompact, Full };

std::string support_class_name(SupportClass c);

struct SupportMask {
    int n_t = 0;
    int n_x = 0;
    std::vector<unsigned char> bits;
    SupportClass class_hint = SupportClass::Full;
    // set by causal_cone when a cone reaches half the circle
    bool wrapped = false;

    SupportMask() = default;
    SupportMask(int nt, int nx) : n_t(nt), n_x(nx), bits(static_cast<std::size_t>(nt) * nx, 0) {}

    bool at(int k, int j) const { return bits[static_cast<std::size_t>(k) * n_x + j] != 0; }
    void set(int k, int j, bool v = true) { bits[static_cast<std::size_t>(k) * n_x + j] = v ? 1 : 0; }
    std::size_t count() const;
    bool empty() const { return count() == 0; }
    // number of cells set here but not in `outer`
    std::size_t cells_outside(const SupportMask& outer) const;
    bool subset_of(const SupportMask& outer) const { return cells_outside(outer) == 0; }
    SupportMask unite(const SupportMask& other) const;
    int first_row() const;  // -1 when empty
    int last_row() const;
};

// Classification on the finite lattice: past compact means no support within `width`
// rows of the initial boundary, future compact likewise for the final boundary.
SupportClass classify_support(const SupportMask& m, int width);
bool has_support_class(const SupportMask& m, SupportClass c, int width);

enum class ConeKind { causal, chronological };

SupportMask causal_cone(const SpacetimeLattice& lat, const SupportMask& seed, TimeDirection dir,
                        ConeKind kind = ConeKind::causal);

std::vector<double> volume_weights(const SpacetimeLattice& lat);

struct CauchySlice {
    int t_index = 0;
    std::vector<double> normal_scale;
    std::vector<double> induced_volume;
};

CauchySlice cauchy_slice(const SpacetimeLattice& lat, int t_index);

// Binary PGM (P5), one image row per time row, 255 inside the mask.
void write_pgm(const SupportMask& mask, const std::string& path);

}  // namespace ghft
