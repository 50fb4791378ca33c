#include "ghft/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace ghft {

std::string family_name(Family f) {
    switch (f) {
        case Family::Minkowski: return "minkowski";
        case Family::Ultrastatic: return "ultrastatic";
        case Family::FRW: return "frw";
        case Family::DeSitter: return "desitter";
        case Family::Custom: return "custom";
    }
    return "unknown";
}

Family parse_family(const std::string& s) {
    if (s == "minkowski") return Family::Minkowski;
    if (s == "ultrastatic") return Family::Ultrastatic;
    if (s == "frw") return Family::FRW;
    if (s == "desitter" || s == "de_sitter") return Family::DeSitter;
    if (s == "custom") return Family::Custom;
    throw PreconditionError("unknown spacetime family '" + s + "'");
}

Profile Profile::constant(double c) {
    return {[c](double) { return c; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
}

Profile Profile::polynomial(double a0, double a1, double a2) {
    return {[=](double t) { return a0 + t * (a1 + t * a2); }, [=](double t) { return a1 + 2.0 * a2 * t; },
            [=](double) { return 2.0 * a2; }};
}

Profile Profile::cosh_scale(double r) {
    return {[r](double t) { return r * std::cosh(t / r); }, [r](double t) { return std::sinh(t / r); },
            [r](double t) { return std::cosh(t / r) / r; }};
}

Profile Profile::from_sampler(std::function<double(double)> f, double step) {
    auto d1 = [f, step](double t) { return (f(t + step) - f(t - step)) / (2.0 * step); };
    auto d2 = [f, step](double t) { return (f(t + step) - 2.0 * f(t) + f(t - step)) / (step * step); };
    return {f, d1, d2};
}

Profile Profile::squared(const Profile& p) {
    return {[p](double t) {
                double a = p.value(t);
                return a * a;
            },
            [p](double t) { return 2.0 * p.value(t) * p.first(t); },
            [p](double t) {
                double d = p.first(t);
                return 2.0 * (d * d + p.value(t) * p.second(t));
            }};
}

double SpacetimeLattice::courant() const {
    double c = 0.0;
    for (std::size_t i = 0; i < size(); ++i) c = std::max(c, std::sqrt(lapse[i] / spatial_metric[i]));
    return c * dt / dx;
}

namespace {

void require_finite_positive(double v, const char* what, int k, int j) {
    if (!std::isfinite(v) || v <= 0.0) {
        std::ostringstream os;
        os << what << " sample " << v << " at (" << k << ", " << j << ") is not positive";
        throw PreconditionError(os.str());
    }
}

// R = (1/s) [ d_t(h_t / s) - d_x(beta_x / s) ], s = sqrt(beta h), by nested centered differences.
double curvature_by_differences(const std::function<double(double, double)>& beta,
                                const std::function<double(double, double)>& h, double t, double x) {
    const double e = 1e-4;
    auto s = [&](double tt, double xx) { return std::sqrt(beta(tt, xx) * h(tt, xx)); };
    auto ht_over_s = [&](double tt) { return (h(tt + e, x) - h(tt - e, x)) / (2 * e) / s(tt, x); };
    auto bx_over_s = [&](double xx) { return (beta(t, xx + e) - beta(t, xx - e)) / (2 * e) / s(t, xx); };
    double dt_term = (ht_over_s(t + e) - ht_over_s(t - e)) / (2 * e);
    double dx_term = (bx_over_s(x + e) - bx_over_s(x - e)) / (2 * e);
    return (dt_term - dx_term) / s(t, x);
}

}  // namespace

SpacetimeLattice build_spacetime(const SpacetimeSpec& spec) {
    if (spec.n_t < 8 || spec.n_x < 8) throw PreconditionError("grid sizes must be at least 8");
    if (!(spec.dt > 0.0) || !(spec.dx > 0.0) || !std::isfinite(spec.dt) || !std::isfinite(spec.dx))
        throw PreconditionError("time and space steps must be positive");

    SpacetimeLattice lat;
    lat.n_t = spec.n_t;
    lat.n_x = spec.n_x;
    lat.dt = spec.dt;
    lat.dx = spec.dx;
    lat.t_origin = spec.t_origin;
    lat.family = spec.family;
    lat.lapse.assign(lat.size(), 1.0);
    lat.spatial_metric.assign(lat.size(), 1.0);
    lat.scalar_curvature.assign(lat.size(), 0.0);

    switch (spec.family) {
        case Family::Minkowski:
            lat.scale = Profile::constant(1.0);
            lat.lapse_profile = Profile::constant(1.0);
            break;
        case Family::Ultrastatic: {
            if (!spec.spatial_metric) throw PreconditionError("ultrastatic spacetime needs h(x)");
            for (int k = 0; k < lat.n_t; ++k)
                for (int j = 0; j < lat.n_x; ++j) lat.spatial_metric[lat.index(k, j)] = spec.spatial_metric(lat.x(j));
            break;
        }
        case Family::FRW:
        case Family::DeSitter: {
            Profile a;
            if (spec.family == Family::DeSitter) {
                if (!(spec.radius > 0.0)) throw PreconditionError("de Sitter radius must be positive");
                a = Profile::cosh_scale(spec.radius);
            } else {
                if (!spec.scale) throw PreconditionError("FRW spacetime needs a scale factor profile");
                a = *spec.scale;
            }
            Profile b = spec.conformal ? Profile::squared(a) : Profile::constant(1.0);
            for (int k = 0; k < lat.n_t; ++k) {
                double t = lat.t(k);
                double av = a.value(t), ad = a.first(t), add = a.second(t);
                double bv = b.value(t), bd = b.first(t);
                require_finite_positive(av, "scale factor", k, 0);
                // R = 2 a''/(beta a) - a' beta' / (beta^2 a)
                double R = 2.0 * add / (bv * av) - ad * bd / (bv * bv * av);
                for (int j = 0; j < lat.n_x; ++j) {
                    lat.lapse[lat.index(k, j)] = bv;
                    lat.spatial_metric[lat.index(k, j)] = av * av;
                    lat.scalar_curvature[lat.index(k, j)] = R;
                }
            }
            lat.scale = a;
            lat.lapse_profile = b;
            break;
        }
        case Family::Custom: {
            if (!spec.lapse_fn || !spec.metric_fn) throw PreconditionError("custom spacetime needs beta(t,x) and h(t,x)");
            for (int k = 0; k < lat.n_t; ++k)
                for (int j = 0; j < lat.n_x; ++j) {
                    double t = lat.t(k), x = lat.x(j);
                    lat.lapse[lat.index(k, j)] = spec.lapse_fn(t, x);
                    lat.spatial_metric[lat.index(k, j)] = spec.metric_fn(t, x);
                }
            for (int k = 0; k < lat.n_t; ++k)
                for (int j = 0; j < lat.n_x; ++j) {
                    require_finite_positive(lat.beta(k, j), "lapse", k, j);
                    require_finite_positive(lat.h(k, j), "spatial metric", k, j);
                    lat.scalar_curvature[lat.index(k, j)] =
                        curvature_by_differences(spec.lapse_fn, spec.metric_fn, lat.t(k), lat.x(j));
                }
            break;
        }
    }
    for (int k = 0; k < lat.n_t; ++k)
        for (int j = 0; j < lat.n_x; ++j) {
            require_finite_positive(lat.beta(k, j), "lapse", k, j);
            require_finite_positive(lat.h(k, j), "spatial metric", k, j);
            if (!std::isfinite(lat.R(k, j))) throw PreconditionError("non-finite curvature sample");
        }
    return lat;
}

std::string support_class_name(SupportClass c) {
    switch (c) {
        case SupportClass::Compact: return "compact";
        case SupportClass::PastCompact: return "past_compact";
        case SupportClass::FutureCompact: return "future_compact";
        case SupportClass::TimelikeCompact: return "timelike_compact";
        case SupportClass::SpacelikeCompact: return "spacelike_compact";
        case SupportClass::Full: return "full";
    }
    return "unknown";
}

std::size_t SupportMask::count() const {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), static_cast<unsigned char>(1)));
}

std::size_t SupportMask::cells_outside(const SupportMask& outer) const {
    if (outer.n_t != n_t || outer.n_x != n_x) throw PreconditionError("mask shape mismatch");
    std::size_t n = 0;
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i] && !outer.bits[i]) ++n;
    return n;
}

SupportMask SupportMask::unite(const SupportMask& other) const {
    if (other.n_t != n_t || other.n_x != n_x) throw PreconditionError("mask shape mismatch");
    SupportMask m = *this;
    for (std::size_t i = 0; i < bits.size(); ++i) m.bits[i] = bits[i] | other.bits[i];
    m.wrapped = wrapped || other.wrapped;
    return m;
}

int SupportMask::first_row() const {
    for (int k = 0; k < n_t; ++k)
        for (int j = 0; j < n_x; ++j)
            if (at(k, j)) return k;
    return -1;
}

int SupportMask::last_row() const {
    for (int k = n_t - 1; k >= 0; --k)
        for (int j = 0; j < n_x; ++j)
            if (at(k, j)) return k;
    return -1;
}

SupportClass classify_support(const SupportMask& m, int width) {
    int lo = m.first_row();
    if (lo < 0) return SupportClass::Compact;
    int hi = m.last_row();
    bool pc = lo >= width;
    bool fc = hi < m.n_t - width;
    // every support is spacelike compact on S^1, and compact equals timelike compact
    if (pc && fc) return SupportClass::Compact;
    if (pc) return SupportClass::PastCompact;
    if (fc) return SupportClass::FutureCompact;
    return SupportClass::SpacelikeCompact;
}

bool has_support_class(const SupportMask& m, SupportClass c, int width) {
    SupportClass got = classify_support(m, width);
    switch (c) {
        case SupportClass::Full:
        case SupportClass::SpacelikeCompact: return true;
        case SupportClass::Compact:
        case SupportClass::TimelikeCompact: return got == SupportClass::Compact;
        case SupportClass::PastCompact: return got == SupportClass::Compact || got == SupportClass::PastCompact;
        case SupportClass::FutureCompact: return got == SupportClass::Compact || got == SupportClass::FutureCompact;
    }
    return false;
}

namespace {

// circular distance from each column to the nearest set column of a row
std::vector<int> row_distance(const SupportMask& m, int k) {
    const int n = m.n_x;
    const int inf = std::numeric_limits<int>::max() / 4;
    std::vector<int> d(n, inf);
    int last = -1;
    for (int i = 0; i < 2 * n; ++i) {
        if (m.at(k, i % n)) last = i;
        if (last >= 0) d[i % n] = std::min(d[i % n], i - last);
    }
    last = -1;
    for (int i = 2 * n - 1; i >= 0; --i) {
        if (m.at(k, i % n)) last = i;
        if (last >= 0) d[i % n] = std::min(d[i % n], last - i);
    }
    return d;
}

}  // namespace

SupportMask causal_cone(const SpacetimeLattice& lat, const SupportMask& seed, TimeDirection dir, ConeKind kind) {
    if (seed.n_t != lat.n_t || seed.n_x != lat.n_x) throw PreconditionError("seed mask does not match lattice");
    if (seed.empty()) throw PreconditionError("causal_cone needs a nonempty seed");

    // accumulated index-space reach: acc[k] = sum over steps i < k of the largest local speed
    std::vector<double> acc(lat.n_t, 0.0);
    for (int k = 0; k + 1 < lat.n_t; ++k) {
        double v = 0.0;
        for (int j = 0; j < lat.n_x; ++j) {
            v = std::max(v, std::sqrt(lat.beta(k, j) / lat.h(k, j)));
            v = std::max(v, std::sqrt(lat.beta(k + 1, j) / lat.h(k + 1, j)));
        }
        acc[k + 1] = acc[k] + v * lat.dt / lat.dx;
    }
    const double slack = 1e-9;

    SupportMask out(lat.n_t, lat.n_x);
    std::vector<int> seed_rows;
    for (int k = 0; k < lat.n_t; ++k)
        for (int j = 0; j < lat.n_x; ++j)
            if (seed.at(k, j)) {
                seed_rows.push_back(k);
                break;
            }

    for (int k0 : seed_rows) {
        std::vector<int> d = row_distance(seed, k0);
        int steps = dir == TimeDirection::future ? lat.n_t - k0 : k0 + 1;
        for (int s = 0; s < steps; ++s) {
            int k = dir == TimeDirection::future ? k0 + s : k0 - s;
            double r = std::abs(acc[k] - acc[k0]);
            long reach;
            if (kind == ConeKind::causal) {
                reach = static_cast<long>(std::ceil(r - slack));
            } else {
                if (s == 0) continue;
                reach = static_cast<long>(std::ceil(r - slack)) - 1;
                if (reach < 0) continue;
            }
            if (2 * reach >= lat.n_x) out.wrapped = true;
            for (int j = 0; j < lat.n_x; ++j)
                if (d[j] <= reach) out.set(k, j);
        }
    }
    out.class_hint = dir == TimeDirection::future ? SupportClass::PastCompact : SupportClass::FutureCompact;
    return out;
}

std::vector<double> volume_weights(const SpacetimeLattice& lat) {
    std::vector<double> w(lat.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = std::sqrt(lat.lapse[i] * lat.spatial_metric[i]) * lat.dt * lat.dx;
    return w;
}

CauchySlice cauchy_slice(const SpacetimeLattice& lat, int t_index) {
    if (t_index < 0 || t_index >= lat.n_t) throw PreconditionError("slice index out of range");
    CauchySlice s;
    s.t_index = t_index;
    s.normal_scale.resize(lat.n_x);
    s.induced_volume.resize(lat.n_x);
    for (int j = 0; j < lat.n_x; ++j) {
        s.normal_scale[j] = 1.0 / std::sqrt(lat.beta(t_index, j));
        s.induced_volume[j] = std::sqrt(lat.h(t_index, j)) * lat.dx;
    }
    return s;
}

void write_pgm(const SupportMask& mask, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path + " for writing");
    os << "P5\n" << mask.n_x << ' ' << mask.n_t << "\n255\n";
    for (unsigned char b : mask.bits) os.put(static_cast<char>(b ? 255 : 0));
    if (!os) throw IoError("write failed for " + path);
}

}  // namespace ghft
