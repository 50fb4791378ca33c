#include "ghft/dirac.hpp"

#include <algorithm>
#include <cmath>

namespace ghft {

namespace {

Mat4 block2(const std::array<GaussRat, 4>& ur, const std::array<GaussRat, 4>& ll) {
    // [[0, U], [L, 0]] with 2 x 2 blocks given row-major
    Mat4 m;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
            m(r, c + 2) = ur[r * 2 + c];
            m(r + 2, c) = ll[r * 2 + c];
        }
    return m;
}

std::array<GaussRat, 4> pauli(int i) {
    switch (i) {
        case 1: return {GaussRat(0), GaussRat(1), GaussRat(1), GaussRat(0)};
        case 2: return {GaussRat(0), GaussRat(0, -1), GaussRat(0, 1), GaussRat(0)};
        default: return {GaussRat(1), GaussRat(0), GaussRat(0), GaussRat(-1)};
    }
}

std::array<GaussRat, 4> neg(std::array<GaussRat, 4> b) {
    for (auto& x : b) x = -x;
    return b;
}

GaussRat random_gauss(Xorshift64& rng) {
    Rational re(static_cast<long long>(rng.integer(-9, 9)), static_cast<long long>(rng.integer(1, 7)));
    Rational im(static_cast<long long>(rng.integer(-9, 9)), static_cast<long long>(rng.integer(1, 7)));
    return {re, im};
}

}  // namespace

GammaRep GammaRep::chiral() {
    GammaRep g;
    const std::array<GaussRat, 4> one{GaussRat(1), GaussRat(0), GaussRat(0), GaussRat(1)};
    g.lower[0] = block2(one, one);
    for (int i = 1; i <= 3; ++i) g.lower[i] = block2(pauli(i), neg(pauli(i)));
    return g;
}

Mat4 GammaRep::slash(const std::array<GaussRat, 4>& n) const {
    Mat4 m;
    for (int mu = 0; mu < 4; ++mu) m = m + n[mu] * lower[mu];
    return m;
}

bool CliffordReport::all_pass() const { return failures() == 0; }

std::size_t CliffordReport::failures() const {
    return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const CliffordCheck& c) { return !c.pass; }));
}

Spinor4 adjunction(const GammaRep& g, const Spinor4& s) {
    Spinor4 row;
    for (int i = 0; i < 4; ++i) row[i] = s[i].conj();
    return row * g.lower[0];
}

Spinor4 adjunction_inverse(const GammaRep& g, const Spinor4& w) {
    Spinor4 v = w * g.lower[0];
    for (auto& x : v) x = x.conj();
    return v;
}

Spinor4 charge_conj_s(const GammaRep& g, const Spinor4& s) {
    Spinor4 v = g.lower[2] * s;
    for (auto& x : v) x = x.conj();
    return v;
}

Spinor4 charge_conj_c(const GammaRep& g, const Spinor4& w) {
    Spinor4 v;
    for (int i = 0; i < 4; ++i) v[i] = w[i].conj();
    return v * g.lower[2];
}

CliffordReport clifford_check(const GammaRep& g, std::uint64_t seed) {
    CliffordReport rep;
    const Mat4 id = Mat4::identity();
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) {
            Mat4 ac = g.lower[mu] * g.lower[nu] + g.lower[nu] * g.lower[mu];
            Mat4 want = mu == nu ? GaussRat(2 * eta(mu)) * id : Mat4::zero();
            rep.checks.push_back({"anticommutator(" + std::to_string(mu) + "," + std::to_string(nu) + ")", ac == want});
        }
    for (int mu = 0; mu < 4; ++mu) {
        Mat4 want = mu == 0 ? g.lower[0] : GaussRat(-1) * g.lower[mu];
        rep.checks.push_back({"adjoint(" + std::to_string(mu) + ")", g.lower[mu].adjoint() == want});
    }
    const Mat4 g2inv = inverse(g.lower[2]);
    for (int mu = 0; mu < 4; ++mu) {
        Mat4 want = GaussRat(-1) * (g.lower[2] * g.lower[mu] * g2inv);
        rep.checks.push_back({"conjugation(" + std::to_string(mu) + ")", g.lower[mu].conj() == want});
    }
    Xorshift64 rng(seed);
    bool intertwine = true;
    for (int n = 0; n < 20; ++n) {
        Spinor4 s;
        for (auto& x : s) x = random_gauss(rng);
        Spinor4 lhs = adjunction(g, charge_conj_s(g, s));
        Spinor4 rhs = charge_conj_c(g, adjunction(g, s));
        for (int i = 0; i < 4; ++i) intertwine = intertwine && lhs[i] == -rhs[i];
    }
    rep.checks.push_back({"A Cs = -Cc A (20 spinors)", intertwine});
    for (int n = 0; n < 10; ++n) {
        // future timelike: n^0 > |n_vec| via n^0 = |n_1| + |n_2| + |n_3| + positive slack
        std::array<GaussRat, 4> v;
        Rational sum = 0;
        for (int i = 1; i < 4; ++i) {
            Rational q(static_cast<long long>(rng.integer(-20, 20)), static_cast<long long>(rng.integer(1, 9)));
            v[i] = GaussRat(q);
            sum += q < 0 ? Rational(-q) : q;
        }
        v[0] = GaussRat(sum + Rational(static_cast<long long>(rng.integer(1, 20)), 10));
        Mat4 m = g.lower[0] * g.slash(v);
        bool hermitian = m.adjoint() == m;
        bool positive = hermitian;
        if (hermitian)
            for (const Rational& minor : leading_minors(m)) positive = positive && minor > 0;
        rep.checks.push_back({"positivity gamma_0 gamma(n) #" + std::to_string(n), positive});
    }
    return rep;
}

CMat4 to_numeric(const Mat4& m) {
    CMat4 out;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) out(r, c) = m(r, c).to_complex();
    return out;
}

const std::array<CMat4, 4>& gamma_lower() {
    static const std::array<CMat4, 4> g = [] {
        GammaRep rep = GammaRep::chiral();
        std::array<CMat4, 4> out;
        for (int mu = 0; mu < 4; ++mu) out[mu] = to_numeric(rep.lower[mu]);
        return out;
    }();
    return g;
}

namespace {

using CVec4 = Eigen::Vector4cd;
using CRow4 = Eigen::RowVector4cd;

CVec4 load(const Section& s, int k, int j) {
    CVec4 v;
    for (int c = 0; c < 4; ++c) v(c) = s.get(k, j, c);
    return v;
}

template <class V>
void store(Section& s, int k, int j, const V& v) {
    for (int c = 0; c < 4; ++c) s(k, j, c) = v(c);
}

void require_fiber4(const Section& s) {
    if (s.fiber() != 4) throw PreconditionError("spinor fields need fiber dimension 4");
}

}  // namespace

Section adjunction(const Section& s) {
    require_fiber4(s);
    const CMat4& g0 = gamma_lower()[0];
    Section out(s.lattice_ptr(), 4, ScalarKind::complex);
    for (int k = 0; k < s.n_t(); ++k)
        for (int j = 0; j < s.n_x(); ++j) {
            CRow4 row = load(s, k, j).adjoint() * g0;
            store(out, k, j, row);
        }
    return out;
}

Section adjunction_inverse(const Section& w) {
    require_fiber4(w);
    const CMat4& g0 = gamma_lower()[0];
    Section out(w.lattice_ptr(), 4, ScalarKind::complex);
    for (int k = 0; k < w.n_t(); ++k)
        for (int j = 0; j < w.n_x(); ++j) {
            CRow4 row = load(w, k, j).transpose() * g0;
            store(out, k, j, row.adjoint());
        }
    return out;
}

Section charge_conj_s(const Section& s) {
    require_fiber4(s);
    const CMat4& g2 = gamma_lower()[2];
    Section out(s.lattice_ptr(), 4, ScalarKind::complex);
    for (int k = 0; k < s.n_t(); ++k)
        for (int j = 0; j < s.n_x(); ++j) store(out, k, j, (g2 * load(s, k, j)).conjugate());
    return out;
}

Section charge_conj_c(const Section& w) {
    require_fiber4(w);
    const CMat4& g2 = gamma_lower()[2];
    Section out(w.lattice_ptr(), 4, ScalarKind::complex);
    for (int k = 0; k < w.n_t(); ++k)
        for (int j = 0; j < w.n_x(); ++j) {
            CRow4 row = load(w, k, j).transpose().conjugate() * g2;
            store(out, k, j, row);
        }
    return out;
}

CoframeData build_coframe(LatticePtr lat) {
    if (!lat->homogeneous())
        throw PreconditionError("the Dirac model needs a spatially homogeneous lattice (Minkowski, FRW, de Sitter)");
    CoframeData cf;
    cf.lattice = lat;
    const int rows = lat->n_t + 2;
    cf.c.resize(rows);
    cf.c_dot.resize(rows);
    cf.a.resize(rows);
    cf.a_dot.resize(rows);
    cf.a_ddot.resize(rows);
    cf.curvature.resize(rows);
    cf.christoffel.assign(static_cast<std::size_t>(rows) * 64, 0.0);
    cf.omega.assign(static_cast<std::size_t>(rows) * 4, CMat4::Zero());
    const Profile& A = *lat->scale;
    const Profile& B = *lat->lapse_profile;
    const auto& g = gamma_lower();
    for (int k = -1; k <= lat->n_t; ++k) {
        const std::size_t r = cf.row(k);
        const double t = lat->t(k);
        const double beta = B.value(t), beta_dot = B.first(t);
        if (!(beta > 0.0) || !(A.value(t) > 0.0)) throw PreconditionError("coframe needs positive lapse and scale");
        cf.c[r] = 1.0 / std::sqrt(beta);
        cf.c_dot[r] = -0.5 * beta_dot * std::pow(beta, -1.5);
        cf.a[r] = A.value(t);
        cf.a_dot[r] = A.first(t);
        cf.a_ddot[r] = A.second(t);
        const double c = cf.c[r], H = cf.a_dot[r] / cf.a[r];
        cf.curvature[r] = 6.0 * (c * cf.c_dot[r] * H + c * c * cf.a_ddot[r] / cf.a[r] + c * c * H * H);
        for (int i = 1; i <= 3; ++i) {
            cf.christoffel[r * 64 + i * 16 + i * 4 + 0] = c * H;  // Gamma^i_{i0}
            cf.christoffel[r * 64 + 0 * 16 + i * 4 + i] = c * H;  // Gamma^0_{ii}
        }
        for (int mu = 0; mu < 4; ++mu) {
            CMat4 om = CMat4::Zero();
            for (int rho = 0; rho < 4; ++rho)
                for (int nu = 0; nu < 4; ++nu) {
                    double G = cf.christoffel[r * 64 + rho * 16 + mu * 4 + nu];
                    if (G != 0.0) om += 0.25 * G * g[rho] * (eta(nu) * g[nu]);
                }
            cf.omega[r * 4 + mu] = om;
        }
    }
    return cf;
}

double CoframeData::metric_error() const {
    double err = 0.0;
    const SpacetimeLattice& L = *lattice;
    for (int k = 0; k < L.n_t; ++k)
        for (int j = 0; j < L.n_x; ++j) {
            double e0 = 1.0 / c[row(k)], e1 = a[row(k)];
            err = std::max({err, std::abs(e0 * e0 - L.beta(k, j)), std::abs(e1 * e1 - L.h(k, j))});
        }
    return err;
}

double CoframeData::metricity_error() const {
    double err = 0.0;
    for (int k = -1; k <= lattice->n_t; ++k)
        for (int mu = 0; mu < 4; ++mu)
            for (int nu = 0; nu < 4; ++nu)
                for (int rho = 0; rho < 4; ++rho) {
                    double v = Gamma(k, rho, mu, nu) * eta(rho) + Gamma(k, nu, mu, rho) * eta(nu);
                    err = std::max(err, std::abs(v));
                }
    return err;
}

namespace {

// eps_mu applied componentwise by centered differences
CVec4 frame_derivative(const CoframeData& cf, int mu, const Section& s, int k, int j) {
    const SpacetimeLattice& L = *cf.lattice;
    if (mu == 0) return cf.c[cf.row(k)] * (load(s, k + 1, j) - load(s, k - 1, j)) / (2.0 * L.dt);
    if (mu == 1) return (load(s, k, j + 1) - load(s, k, j - 1)) / (2.0 * L.dx * cf.a[cf.row(k)]);
    return CVec4::Zero();
}

}  // namespace

Section spin_covariant_derivative(const CoframeData& cf, int mu, const Section& s) {
    require_fiber4(s);
    Section out(s.lattice_ptr(), 4, ScalarKind::complex);
    for (int k = 0; k < s.n_t(); ++k)
        for (int j = 0; j < s.n_x(); ++j)
            store(out, k, j, frame_derivative(cf, mu, s, k, j) + cf.Omega(k, mu) * load(s, k, j));
    return out;
}

Section cospinor_covariant_derivative(const CoframeData& cf, int mu, const Section& w) {
    require_fiber4(w);
    Section out(w.lattice_ptr(), 4, ScalarKind::complex);
    for (int k = 0; k < w.n_t(); ++k)
        for (int j = 0; j < w.n_x(); ++j) {
            CRow4 row = frame_derivative(cf, mu, w, k, j).transpose() - load(w, k, j).transpose() * cf.Omega(k, mu);
            store(out, k, j, row);
        }
    return out;
}

double leibniz_residual(const CoframeData& cf, int mu, const Section& w, const Section& s) {
    const SpacetimeLattice& L = *cf.lattice;
    Section dw = cospinor_covariant_derivative(cf, mu, w);
    Section ds = spin_covariant_derivative(cf, mu, s);
    Section prod(s.lattice_ptr(), 1, ScalarKind::complex);
    for (int k = 0; k < L.n_t; ++k)
        for (int j = 0; j < L.n_x; ++j) prod(k, j) = (load(w, k, j).transpose() * load(s, k, j)).value();
    double err = 0.0;
    for (int k = 1; k + 1 < L.n_t; ++k)
        for (int j = 0; j < L.n_x; ++j) {
            cd d;
            if (mu == 0)
                d = cf.c[cf.row(k)] * (prod(k + 1, j) - prod(k - 1, j)) / (2.0 * L.dt);
            else if (mu == 1)
                d = (prod.get(k, j + 1) - prod.get(k, j - 1)) / (2.0 * L.dx * cf.a[cf.row(k)]);
            cd rhs = (load(dw, k, j).transpose() * load(s, k, j)).value();
            rhs += (load(w, k, j).transpose() * load(ds, k, j)).value();
            err = std::max(err, std::abs(d - rhs));
        }
    return err;
}

Section slash_generic(const CoframeData& cf, const Section& s) {
    const auto& g = gamma_lower();
    Section out(s.lattice_ptr(), 4, ScalarKind::complex);
    for (int mu = 0; mu < 4; ++mu) {
        Section d = spin_covariant_derivative(cf, mu, s);
        for (int k = 0; k < s.n_t(); ++k)
            for (int j = 0; j < s.n_x(); ++j) {
                CVec4 v = load(out, k, j) + double(eta(mu)) * (g[mu] * load(d, k, j));
                store(out, k, j, v);
            }
    }
    return out;
}

Section connection_laplacian(const CoframeData& cf, const Section& s) {
    std::array<Section, 4> psi;
    for (int b = 0; b < 4; ++b) psi[b] = spin_covariant_derivative(cf, b, s);
    Section out(s.lattice_ptr(), 4, ScalarKind::complex);
    for (int a = 0; a < 4; ++a) {
        Section hess = spin_covariant_derivative(cf, a, psi[a]);
        for (int k = 0; k < s.n_t(); ++k)
            for (int j = 0; j < s.n_x(); ++j) {
                CVec4 v = load(hess, k, j);
                for (int c = 0; c < 4; ++c) {
                    double G = cf.Gamma(k, c, a, a);
                    if (G != 0.0) v -= G * load(psi[c], k, j);
                }
                store(out, k, j, load(out, k, j) + double(eta(a)) * v);
            }
    }
    return out;
}

double nabla_gamma_residual(const CoframeData& cf) {
    const SpacetimeLattice& L = *cf.lattice;
    const auto& g = gamma_lower();
    // coordinate components gamma(d_t) = sqrt(beta) gamma_0, gamma(d_i) = a gamma_i
    auto coord_gamma = [&](int k, int nu) -> CMat4 {
        return nu == 0 ? CMat4((1.0 / cf.c[cf.row(k)]) * g[0]) : CMat4(cf.a[cf.row(k)] * g[nu]);
    };
    double err = 0.0;
    for (int k = 0; k < L.n_t; ++k) {
        const std::size_t r = cf.row(k);
        const double c = cf.c[r], a = cf.a[r], ad = cf.a_dot[r];
        const double beta = 1.0 / (c * c);
        const double beta_dot = -2.0 * cf.c_dot[r] / (c * c * c);
        for (int mu = 0; mu < 4; ++mu)
            for (int nu = 0; nu < 4; ++nu) {
                CMat4 d = CMat4::Zero();
                if (mu == 0) d = c * (coord_gamma(k + 1, nu) - coord_gamma(k - 1, nu)) / (2.0 * L.dt);
                CMat4 gn = coord_gamma(k, nu);
                CMat4 comm = cf.Omega(k, mu) * gn - gn * cf.Omega(k, mu);
                // gamma(nabla_{eps_mu} d_nu) from the coordinate Christoffels of beta dt^2 - a^2 dx^2
                CMat4 conn = CMat4::Zero();
                if (mu == 0) {
                    if (nu == 0) conn = c * (beta_dot / (2.0 * beta)) * coord_gamma(k, 0);
                    else conn = c * (ad / a) * coord_gamma(k, nu);
                } else {
                    if (nu == 0) conn = (1.0 / a) * (ad / a) * coord_gamma(k, mu);
                    else if (nu == mu) conn = (1.0 / a) * (a * ad / beta) * coord_gamma(k, 0);
                }
                err = std::max(err, (d + comm - conn).norm());
            }
    }
    return err;
}

DiracOperator::DiracOperator(std::shared_ptr<const CoframeData> cf, double mass, bool cospinor)
    : cf_(std::move(cf)), m_(mass), cospinor_(cospinor) {
    if (!std::isfinite(m_)) throw PreconditionError("Dirac mass must be finite");
    const SpacetimeLattice& L = *cf_->lattice;
    double sc = 0.0;
    for (int k = 0; k < L.n_t; ++k) {
        const std::size_t r = cf_->row(k);
        sc = std::max(sc, cf_->c[r] / L.dt + 1.0 / (cf_->a[r] * L.dx));
    }
    scale_ = sc + std::abs(m_);
}

double DiracOperator::time_coefficient(int k, int dk) const {
    const CoframeData& cf = *cf_;
    return cf.c[cf.row(k)] * std::pow(cf.a[cf.row(k)], -1.5) * cf.tilde_a(k + dk) / (2.0 * cf_->lattice->dt);
}

template <class Get>
void DiracOperator::row_kernel(Get get, int k, cd* out) const {
    const SpacetimeLattice& L = *cf_->lattice;
    const auto& g = gamma_lower();
    const CMat4& g0 = g[0];
    const CMat4 g1 = -g[1];  // gamma^1
    const double cp = time_coefficient(k, 1), cm = time_coefficient(k, -1);
    const double bx = 1.0 / (cf_->a[cf_->row(k)] * 2.0 * L.dx);
    const cd I(0.0, 1.0);
    for (int j = 0; j < L.n_x; ++j) {
        CVec4 up, dn, right, left, here;
        for (int c = 0; c < 4; ++c) {
            up(c) = get(k + 1, j, c);
            dn(c) = get(k - 1, j, c);
            right(c) = get(k, j + 1, c);
            left(c) = get(k, j - 1, c);
            here(c) = get(k, j, c);
        }
        CVec4 dt = cp * up - cm * dn, dx = bx * (right - left);
        CVec4 v;
        if (!cospinor_)
            v = I * (g0 * dt + g1 * dx) - m_ * here;
        else
            v = -I * (g0.transpose() * dt + g1.transpose() * dx) - m_ * here;
        for (int c = 0; c < 4; ++c) out[j * 4 + c] = v(c);
    }
}

void DiracOperator::apply_row(const Section& u, int k, cd* out) const {
    row_kernel([&u](int kk, int j, int c) { return u.get(kk, j, c); }, k, out);
}

void DiracOperator::apply_row_buffer(const cd* rows3, int k, cd* out) const {
    const SpacetimeLattice& L = *cf_->lattice;
    row_kernel([&](int kk, int j, int c) { return rows3[(static_cast<std::size_t>(kk - k + 1) * L.n_x + L.wrap(j)) * 4 + c]; },
               k, out);
}

void DiracSquareOperator::apply_row(const Section& u, int k, cd* out) const {
    const SpacetimeLattice& L = lattice();
    const std::size_t row = static_cast<std::size_t>(L.n_x) * 4;
    std::vector<cd> buf(3 * row, cd{});
    for (int d = -1; d <= 1; ++d) {
        int kk = k + d;
        if (kk < 0 || kk >= L.n_t) continue;
        p_->apply_row(u, kk, buf.data() + (d + 1) * row);
    }
    p_->apply_row_buffer(buf.data(), k, out);
}

std::vector<cd> DiracSquareOperator::edge_block(int k, int, const std::vector<int>& group, Which which) const {
    if (group.size() != 4) return {};
    // (+-i gamma^0 t_k)(+-i gamma^0 t_{k+-1}) = -t_k t_{k+-1}
    double v = which == Which::retarded ? p_->time_coefficient(k, 1) * p_->time_coefficient(k + 1, 1)
                                        : p_->time_coefficient(k, -1) * p_->time_coefficient(k - 1, -1);
    std::vector<cd> b(16, cd{});
    for (int i = 0; i < 4; ++i) b[i * 5] = -v;
    return b;
}

DiracModel::DiracModel(LatticePtr lat, double mass, bool cospinor)
    : cf_(std::make_shared<const CoframeData>(build_coframe(std::move(lat)))),
      op_(std::make_shared<const DiracOperator>(cf_, mass, cospinor)),
      sq_(std::make_shared<const DiracSquareOperator>(op_)),
      solver_(sq_) {}

Section DiracModel::green(const Section& f, Which which) const { return op_->apply(solver_.solve(f, which)); }

cd DiracModel::pair(const Section& a, const Section& b) const {
    if (a.fiber() != 4 || b.fiber() != 4) throw PreconditionError("Dirac pairing needs fiber dimension 4");
    const SpacetimeLattice& L = lattice();
    const CMat4& g0 = gamma_lower()[0];
    cd acc = 0.0;
    for (int k = 0; k < L.n_t; ++k) {
        const std::size_t r = cf_->row(k);
        const double w = std::pow(cf_->a[r], 3) * L.dt * L.dx / cf_->c[r];
        cd row = 0.0;
        for (int j = 0; j < L.n_x; ++j) {
            CVec4 x = load(a, k, j), y = load(b, k, j);
            if (!cospinor())
                row += x.dot(g0 * y);  // conj(x)^T gamma_0 y
            else
                row += (y.transpose() * g0 * x.conjugate())(0, 0);
        }
        acc += w * row;
    }
    return acc;
}

NormallyHyperbolicForm DiracModel::square_form() const {
    const SpacetimeLattice& L = lattice();
    NormallyHyperbolicForm form(op_->lattice_ptr(), 4);
    const auto& g = gamma_lower();
    const CMat4 id = CMat4::Identity();
    const CMat4 g1 = -g[1];
    const cd I(0.0, 1.0);
    const double m = mass();
    for (int k = 0; k < L.n_t; ++k) {
        const std::size_t r = cf_->row(k);
        const double c = cf_->c[r], cdot = cf_->c_dot[r], a = cf_->a[r], ad = cf_->a_dot[r], add = cf_->a_ddot[r];
        const double A = 1.5 * ad / a, Adot = 1.5 * (add / a - ad * ad / (a * a));
        const double b = 1.0 / a, bdot = -ad / (a * a);
        CMat4 Bt = (2.0 * c * c * A + c * cdot) * id + 2.0 * I * m * c * g[0];
        CMat4 Bx = c * bdot * g[0] * g1 + 2.0 * I * m * b * g1;
        CMat4 C = (c * c * (Adot + A * A) + c * cdot * A - m * m) * id + 2.0 * I * m * c * A * g[0];
        for (int j = 0; j < L.n_x; ++j)
            for (int p = 0; p < 4; ++p)
                for (int q = 0; q < 4; ++q) {
                    form.Bt(k, j)[p * 4 + q] = Bt(p, q);
                    form.Bx(k, j)[p * 4 + q] = Bx(p, q);
                    form.C(k, j)[p * 4 + q] = C(p, q);
                }
    }
    return form;
}

cd hermitian_form(const Observable& a, const Observable& b) {
    const auto* model = dynamic_cast<const DiracModel*>(a.model);
    if (model == nullptr) throw PreconditionError("hermitian_form needs Dirac observables");
    cd v = causal_pairing(a, b);
    const cd I(0.0, 1.0);
    return model->cospinor() ? I * v : -I * v;
}

cd hermitian_on_slice(const DiracModel& model, const Section& phi, const Section& psi, int k, double tol) {
    const SpacetimeLattice& L = model.lattice();
    if (k < 0 || k >= L.n_t) throw PreconditionError("slice index outside the lattice");
    if (onshell_residual(model.dynamics(), phi, 2) > tol || onshell_residual(model.dynamics(), psi, 2) > tol)
        throw PreconditionError("hermitian_on_slice needs on-shell fields");
    const CoframeData& cf = model.coframe();
    cd acc = 0.0;
    for (int j = 0; j < L.n_x; ++j) {
        CVec4 x = load(phi, k, j), y = load(psi, k, j);
        acc += model.cospinor() ? (y.transpose() * x.conjugate()).value() : x.dot(y);
    }
    return acc * std::pow(cf.a[cf.row(k)], 3) * L.dx;
}

}  // namespace ghft
