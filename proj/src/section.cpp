#include "ghft/section.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace ghft {

Section::Section(LatticePtr lat, int fiber, ScalarKind kind)
    : lat_(std::move(lat)), fiber_(fiber), kind_(kind), v_(lat_->size() * static_cast<std::size_t>(fiber)) {
    if (fiber != 1 && fiber != 2 && fiber != 4) throw PreconditionError("fiber dimension must be 1, 2 or 4");
}

double Section::max_abs() const {
    double m = 0.0;
    for (const cd& z : v_) m = std::max(m, std::abs(z));
    return m;
}

SupportMask Section::support(double rel_tol) const {
    SupportMask m(lat_->n_t, lat_->n_x);
    double thr = rel_tol * max_abs();
    for (int k = 0; k < lat_->n_t; ++k)
        for (int j = 0; j < lat_->n_x; ++j)
            for (int c = 0; c < fiber_; ++c)
                if (std::abs((*this)(k, j, c)) > thr) {
                    m.set(k, j);
                    break;
                }
    m.class_hint = classify_support(m, 1);
    return m;
}

bool Section::is_zero() const {
    return std::all_of(v_.begin(), v_.end(), [](const cd& z) { return z == cd{}; });
}

void Section::check_compatible(const Section& o) const {
    if (fiber_ != o.fiber_ || lat_->size() != o.lat_->size()) throw PreconditionError("incompatible sections");
}

Section& Section::operator+=(const Section& o) {
    check_compatible(o);
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
    return *this;
}

Section& Section::operator-=(const Section& o) {
    check_compatible(o);
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
    return *this;
}

Section& Section::operator*=(cd s) {
    for (cd& z : v_) z *= s;
    return *this;
}

Section Section::restricted_rows(int k_lo, int k_hi) const {
    Section r = *this;
    for (int k = 0; k < lat_->n_t; ++k) {
        if (k >= k_lo && k < k_hi) continue;
        std::fill(r.v_.begin() + offset(k, 0), r.v_.begin() + offset(k, 0) + lat_->n_x * fiber_, cd{});
    }
    return r;
}

double max_abs_diff(const Section& a, const Section& b, int k_lo, int k_hi) {
    double m = 0.0;
    k_lo = std::max(k_lo, 0);
    k_hi = std::min(k_hi, a.n_t());
    for (int k = k_lo; k < k_hi; ++k)
        for (int j = 0; j < a.n_x(); ++j)
            for (int c = 0; c < a.fiber(); ++c) m = std::max(m, std::abs(a(k, j, c) - b(k, j, c)));
    return m;
}

double max_abs_rows(const Section& a, int k_lo, int k_hi) {
    double m = 0.0;
    k_lo = std::max(k_lo, 0);
    k_hi = std::min(k_hi, a.n_t());
    for (int k = k_lo; k < k_hi; ++k)
        for (int j = 0; j < a.n_x(); ++j)
            for (int c = 0; c < a.fiber(); ++c) m = std::max(m, std::abs(a(k, j, c)));
    return m;
}

void write_section_csv(const Section& s, std::ostream& os) {
    os << "t_index,x_index,component_index,re,im\r\n";
    os << std::setprecision(17);
    for (int k = 0; k < s.n_t(); ++k)
        for (int j = 0; j < s.n_x(); ++j)
            for (int c = 0; c < s.fiber(); ++c) {
                cd z = s(k, j, c);
                if (z == cd{}) continue;
                os << k << ',' << j << ',' << c << ',' << z.real() << ',' << z.imag() << "\r\n";
            }
}

void write_section_csv(const Section& s, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path + " for writing");
    write_section_csv(s, os);
    if (!os) throw IoError("write failed for " + path);
}

Section read_section_csv(LatticePtr lat, int fiber, ScalarKind kind, std::istream& is) {
    Section s(std::move(lat), fiber, kind);
    std::string line;
    if (!std::getline(is, line)) throw PreconditionError("empty section file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t_index,x_index,component_index,re,im") throw PreconditionError("bad section CSV header");
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        long k, j, c;
        double re, im;
        if (!(ls >> k >> j >> c >> re >> im)) throw PreconditionError("malformed CSV line " + std::to_string(lineno));
        if (k < 0 || k >= s.n_t() || j < 0 || j >= s.n_x() || c < 0 || c >= fiber)
            throw PreconditionError("CSV index out of range on line " + std::to_string(lineno));
        if (kind == ScalarKind::real && im != 0.0)
            throw PreconditionError("imaginary part in a real section on line " + std::to_string(lineno));
        s(static_cast<int>(k), static_cast<int>(j), static_cast<int>(c)) = cd(re, im);
    }
    return s;
}

Section read_section_csv(LatticePtr lat, int fiber, ScalarKind kind, const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    return read_section_csv(std::move(lat), fiber, kind, is);
}

}  // namespace ghft
