#pragma once

#include <array>
#include <boost/multiprecision/cpp_int.hpp>
#include <string>

#include "ghft/common.hpp"

namespace ghft {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Exact complex number with rational parts.
struct GaussRat {
    Rational re{0};
    Rational im{0};

    GaussRat() = default;
    GaussRat(Rational r, Rational i = Rational(0)) : re(std::move(r)), im(std::move(i)) {}
    GaussRat(long long r, long long i = 0) : re(r), im(i) {}

    bool is_zero() const { return re == 0 && im == 0; }
    GaussRat conj() const { return {re, -im}; }
    cd to_complex() const { return {static_cast<double>(re), static_cast<double>(im)}; }
    std::string str() const;

    friend GaussRat operator+(const GaussRat& a, const GaussRat& b) { return {a.re + b.re, a.im + b.im}; }
    friend GaussRat operator-(const GaussRat& a, const GaussRat& b) { return {a.re - b.re, a.im - b.im}; }
    friend GaussRat operator-(const GaussRat& a) { return {-a.re, -a.im}; }
    friend GaussRat operator*(const GaussRat& a, const GaussRat& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend GaussRat operator/(const GaussRat& a, const GaussRat& b);
    GaussRat& operator+=(const GaussRat& o) { return *this = *this + o; }
    GaussRat& operator-=(const GaussRat& o) { return *this = *this - o; }
    GaussRat& operator*=(const GaussRat& o) { return *this = *this * o; }
    friend bool operator==(const GaussRat& a, const GaussRat& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const GaussRat& a, const GaussRat& b) { return !(a == b); }
};

inline GaussRat operator/(const GaussRat& a, const GaussRat& b) {
    Rational den = b.re * b.re + b.im * b.im;
    if (den == 0) throw std::domain_error("division by zero");
    return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
}

const GaussRat I_unit{0, 1};

// Nearest multiple of 10^-15; values below 1e-12 in magnitude become exactly zero.
Rational snap_rational(double v);
GaussRat snap_complex(cd z);
// Parses a decimal such as -12.0625 exactly.
Rational parse_decimal(const std::string& s);
std::string rational_str(const Rational& r);

using Spinor4 = std::array<GaussRat, 4>;

// Exact 4 x 4 complex matrix, row-major.
struct Mat4 {
    std::array<GaussRat, 16> e{};

    static Mat4 zero() { return {}; }
    static Mat4 identity();
    GaussRat& operator()(int r, int c) { return e[r * 4 + c]; }
    const GaussRat& operator()(int r, int c) const { return e[r * 4 + c]; }

    Mat4 adjoint() const;
    Mat4 conj() const;
    Mat4 transpose() const;

    friend Mat4 operator+(const Mat4& a, const Mat4& b);
    friend Mat4 operator-(const Mat4& a, const Mat4& b);
    friend Mat4 operator*(const Mat4& a, const Mat4& b);
    friend Mat4 operator*(const GaussRat& s, const Mat4& a);
    friend Spinor4 operator*(const Mat4& a, const Spinor4& v);
    // row vector times matrix
    friend Spinor4 operator*(const Spinor4& w, const Mat4& a);
    friend bool operator==(const Mat4& a, const Mat4& b) { return a.e == b.e; }
    friend bool operator!=(const Mat4& a, const Mat4& b) { return !(a == b); }
};

// Exact inverse by Gauss-Jordan elimination; throws on singular input.
Mat4 inverse(const Mat4& m);
// Leading principal minors of a Hermitian matrix, all real.
std::array<Rational, 4> leading_minors(const Mat4& m);

}  // namespace ghft
