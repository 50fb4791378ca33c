#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include "ghft/common.hpp"
#include "ghft/spacetime.hpp"

namespace ghft {

using LatticePtr = std::shared_ptr<const SpacetimeLattice>;

// Fiber-valued grid function. Values are stored complex even for real models;
// layout is ((k * n_x) + j) * fiber + c.
class Section {
public:
    Section() = default;
    Section(LatticePtr lat, int fiber, ScalarKind kind = ScalarKind::real);

    const SpacetimeLattice& lattice() const { return *lat_; }
    const LatticePtr& lattice_ptr() const { return lat_; }
    int fiber() const { return fiber_; }
    ScalarKind kind() const { return kind_; }
    int n_t() const { return lat_->n_t; }
    int n_x() const { return lat_->n_x; }

    std::vector<cd>& values() { return v_; }
    const std::vector<cd>& values() const { return v_; }
    cd* data() { return v_.data(); }
    const cd* data() const { return v_.data(); }

    std::size_t offset(int k, int j, int c = 0) const {
        return (static_cast<std::size_t>(k) * lat_->n_x + j) * fiber_ + c;
    }
    cd& operator()(int k, int j, int c = 0) { return v_[offset(k, j, c)]; }
    cd operator()(int k, int j, int c = 0) const { return v_[offset(k, j, c)]; }
    // zero outside the time range, periodic in j
    cd get(int k, int j, int c = 0) const {
        if (k < 0 || k >= lat_->n_t) return {};
        return v_[offset(k, lat_->wrap(j), c)];
    }

    double max_abs() const;
    // values with |v| above rel_tol * max|v| mark their lattice point
    SupportMask support(double rel_tol = 1e-14) const;
    bool is_zero() const;

    Section& operator+=(const Section& o);
    Section& operator-=(const Section& o);
    Section& operator*=(cd s);
    friend Section operator+(Section a, const Section& b) { return a += b; }
    friend Section operator-(Section a, const Section& b) { return a -= b; }
    friend Section operator*(cd s, Section a) { return a *= s; }

    // zero every value on rows outside [k_lo, k_hi)
    Section restricted_rows(int k_lo, int k_hi) const;

private:
    void check_compatible(const Section& o) const;

    LatticePtr lat_;
    int fiber_ = 1;
    ScalarKind kind_ = ScalarKind::real;
    std::vector<cd> v_;
};

// sup norm of a - b over rows [k_lo, k_hi)
double max_abs_diff(const Section& a, const Section& b, int k_lo, int k_hi);
double max_abs_rows(const Section& a, int k_lo, int k_hi);

// CSV with header t_index,x_index,component_index,re,im; 17 significant digits; zero entries skipped.
void write_section_csv(const Section& s, std::ostream& os);
void write_section_csv(const Section& s, const std::string& path);
Section read_section_csv(LatticePtr lat, int fiber, ScalarKind kind, std::istream& is);
Section read_section_csv(LatticePtr lat, int fiber, ScalarKind kind, const std::string& path);

}  // namespace ghft
