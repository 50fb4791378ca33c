#include "ghft/exact.hpp"

#include <cmath>
#include <sstream>

namespace ghft {

namespace {

const BigInt& ten15() {
    static const BigInt v = boost::multiprecision::pow(BigInt(10), 15);
    return v;
}

// determinant of the leading n x n block by fraction-exact elimination
GaussRat leading_det(Mat4 m, int n) {
    GaussRat det(1);
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int r = c; r < n; ++r)
            if (!m(r, c).is_zero()) {
                piv = r;
                break;
            }
        if (piv < 0) return GaussRat(0);
        if (piv != c) {
            for (int k = 0; k < 4; ++k) std::swap(m(piv, k), m(c, k));
            det = -det;
        }
        det *= m(c, c);
        for (int r = c + 1; r < n; ++r) {
            if (m(r, c).is_zero()) continue;
            GaussRat f = m(r, c) / m(c, c);
            for (int k = c; k < n; ++k) m(r, k) -= f * m(c, k);
        }
    }
    return det;
}

}  // namespace

std::string rational_str(const Rational& r) {
    std::ostringstream os;
    os << boost::multiprecision::numerator(r);
    if (boost::multiprecision::denominator(r) != 1) os << '/' << boost::multiprecision::denominator(r);
    return os.str();
}

std::string GaussRat::str() const {
    if (im == 0) return rational_str(re);
    std::string i_part = rational_str(im < 0 ? Rational(-im) : im);
    if (re == 0) return (im < 0 ? "-" : "") + i_part + "i";
    return "(" + rational_str(re) + (im < 0 ? "-" : "+") + i_part + "i)";
}

Rational snap_rational(double v) {
    if (!std::isfinite(v)) throw PreconditionError("cannot snap a non-finite value");
    if (std::abs(v) < 1e-12) return Rational(0);
    BigInt n(std::nearbyint(v * 1e15));
    return Rational(n, ten15());
}

GaussRat snap_complex(cd z) { return {snap_rational(z.real()), snap_rational(z.imag())}; }

Rational parse_decimal(const std::string& s) {
    std::size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = s[i++] == '-';
    BigInt num = 0, den = 1;
    bool digits = false, dot = false;
    for (; i < s.size(); ++i) {
        char ch = s[i];
        if (ch == '.' && !dot) {
            dot = true;
        } else if (ch >= '0' && ch <= '9') {
            num = num * 10 + (ch - '0');
            if (dot) den *= 10;
            digits = true;
        } else {
            throw PreconditionError("bad decimal literal '" + s + "'");
        }
    }
    if (!digits) throw PreconditionError("bad decimal literal '" + s + "'");
    Rational r(num, den);
    return neg ? Rational(-r) : r;
}

Mat4 Mat4::identity() {
    Mat4 m;
    for (int i = 0; i < 4; ++i) m(i, i) = GaussRat(1);
    return m;
}

Mat4 Mat4::adjoint() const {
    Mat4 m;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) m(r, c) = (*this)(c, r).conj();
    return m;
}

Mat4 Mat4::conj() const {
    Mat4 m;
    for (int i = 0; i < 16; ++i) m.e[i] = e[i].conj();
    return m;
}

Mat4 Mat4::transpose() const {
    Mat4 m;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) m(r, c) = (*this)(c, r);
    return m;
}

Mat4 operator+(const Mat4& a, const Mat4& b) {
    Mat4 m;
    for (int i = 0; i < 16; ++i) m.e[i] = a.e[i] + b.e[i];
    return m;
}

Mat4 operator-(const Mat4& a, const Mat4& b) {
    Mat4 m;
    for (int i = 0; i < 16; ++i) m.e[i] = a.e[i] - b.e[i];
    return m;
}

Mat4 operator*(const Mat4& a, const Mat4& b) {
    Mat4 m;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            GaussRat acc;
            for (int k = 0; k < 4; ++k)
                if (!a(r, k).is_zero() && !b(k, c).is_zero()) acc += a(r, k) * b(k, c);
            m(r, c) = acc;
        }
    return m;
}

Mat4 operator*(const GaussRat& s, const Mat4& a) {
    Mat4 m;
    for (int i = 0; i < 16; ++i) m.e[i] = s * a.e[i];
    return m;
}

Spinor4 operator*(const Mat4& a, const Spinor4& v) {
    Spinor4 out;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) out[r] += a(r, c) * v[c];
    return out;
}

Spinor4 operator*(const Spinor4& w, const Mat4& a) {
    Spinor4 out;
    for (int c = 0; c < 4; ++c)
        for (int r = 0; r < 4; ++r) out[c] += w[r] * a(r, c);
    return out;
}

Mat4 inverse(const Mat4& in) {
    Mat4 m = in, inv = Mat4::identity();
    for (int c = 0; c < 4; ++c) {
        int piv = -1;
        for (int r = c; r < 4; ++r)
            if (!m(r, c).is_zero()) {
                piv = r;
                break;
            }
        if (piv < 0) throw std::domain_error("singular matrix");
        for (int k = 0; k < 4; ++k) {
            std::swap(m(piv, k), m(c, k));
            std::swap(inv(piv, k), inv(c, k));
        }
        GaussRat p = m(c, c);
        for (int k = 0; k < 4; ++k) {
            m(c, k) = m(c, k) / p;
            inv(c, k) = inv(c, k) / p;
        }
        for (int r = 0; r < 4; ++r) {
            if (r == c || m(r, c).is_zero()) continue;
            GaussRat f = m(r, c);
            for (int k = 0; k < 4; ++k) {
                m(r, k) -= f * m(c, k);
                inv(r, k) -= f * inv(c, k);
            }
        }
    }
    return inv;
}

std::array<Rational, 4> leading_minors(const Mat4& m) {
    std::array<Rational, 4> out;
    for (int n = 1; n <= 4; ++n) {
        GaussRat d = leading_det(m, n);
        if (d.im != 0) throw std::domain_error("leading minor of a non-Hermitian matrix");
        out[n - 1] = d.re;
    }
    return out;
}

}  // namespace ghft
