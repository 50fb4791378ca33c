#include "ghft/greenops.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace ghft {

std::vector<std::vector<int>> StencilOperator::groups(Which) const {
    std::vector<int> all(fiber());
    std::iota(all.begin(), all.end(), 0);
    return {all};
}

std::vector<cd> StencilOperator::edge_block(int, int, const std::vector<int>&, Which) const { return {}; }

Section StencilOperator::apply(const Section& u) const {
    Section out = zero();
    const std::size_t row = static_cast<std::size_t>(lattice().n_x) * fiber();
    for (int k = 0; k < lattice().n_t; ++k) apply_row(u, k, out.data() + k * row);
    return out;
}

namespace {

// Column sets whose members are at least p apart on the circle.
std::vector<std::vector<int>> comb_classes(int n, int p) {
    std::vector<std::vector<int>> classes;
    std::vector<int> singles;
    for (int r = 0; r < p && r < n; ++r) {
        std::vector<int> c;
        for (int j = r; j < n; j += p) c.push_back(j);
        while (c.size() > 1 && n - c.back() + c.front() < p) {
            singles.push_back(c.back());
            c.pop_back();
        }
        classes.push_back(c);
    }
    for (int s : singles) classes.push_back({s});
    return classes;
}

}  // namespace

std::vector<std::vector<cd>> probe_blocks(const StencilOperator& op, int k, int target, const std::vector<int>& group) {
    const SpacetimeLattice& lat = op.lattice();
    const int fib = op.fiber();
    const int q = static_cast<int>(group.size());
    if (target < 0 || target >= lat.n_t) throw PreconditionError("probe row outside the lattice");
    std::vector<std::vector<cd>> blocks(lat.n_x, std::vector<cd>(static_cast<std::size_t>(q) * q));
    Section u = op.zero();
    std::vector<cd> out(static_cast<std::size_t>(lat.n_x) * fib);
    std::vector<char> member(lat.n_x);
    for (const auto& cls : comb_classes(lat.n_x, 2 * op.space_reach() + 1)) {
        std::fill(member.begin(), member.end(), 0);
        for (int j : cls) member[j] = 1;
        for (int ci = 0; ci < q; ++ci) {
            for (int j : cls) u(target, j, group[ci]) = 1.0;
            op.apply_row(u, k, out.data());
            for (int j = 0; j < lat.n_x; ++j)
                for (int ri = 0; ri < q; ++ri) {
                    cd v = out[static_cast<std::size_t>(j) * fib + group[ri]];
                    if (member[j])
                        blocks[j][ri * q + ci] = v;
                    else if (v != cd{})
                        throw std::logic_error("operator couples neighbouring columns on the marching row");
                }
            for (int j : cls) u(target, j, group[ci]) = 0.0;
        }
    }
    return blocks;
}

MarchingSolver::MarchingSolver(std::shared_ptr<const StencilOperator> op) : op_(std::move(op)) {
    build(Which::retarded, fwd_);
    build(Which::advanced, bwd_);
}

void MarchingSolver::build(Which which, std::vector<GroupBlocks>& out) const {
    const SpacetimeLattice& lat = op_->lattice();
    const int s = op_->time_reach();
    const std::size_t npts = lat.size();
    for (const auto& g : op_->groups(which)) {
        GroupBlocks gb;
        gb.comps = g;
        const int q = static_cast<int>(g.size());
        const std::size_t qq = static_cast<std::size_t>(q) * q;
        gb.inv.assign(npts, cd{});
        int k_lo = which == Which::retarded ? 0 : s;
        int k_hi = which == Which::retarded ? lat.n_t - s : lat.n_t;
        for (int k = k_lo; k < k_hi; ++k) {
            int target = which == Which::retarded ? k + s : k - s;
            std::vector<std::vector<cd>> row;
            std::vector<cd> first = op_->edge_block(k, 0, g, which);
            if (first.empty()) {
                row = probe_blocks(*op_, k, target, g);
            } else {
                row.resize(lat.n_x);
                row[0] = std::move(first);
                for (int j = 1; j < lat.n_x; ++j) row[j] = op_->edge_block(k, j, g, which);
            }
            for (int j = 0; j < lat.n_x; ++j) {
                const std::vector<cd>& b = row[j];
                bool is_scalar = true;
                for (int r = 0; r < q && is_scalar; ++r)
                    for (int c = 0; c < q; ++c)
                        if ((r == c && b[r * q + c] != b[0]) || (r != c && b[r * q + c] != cd{})) {
                            is_scalar = false;
                            break;
                        }
                if (is_scalar && b[0] == cd{}) throw std::logic_error("singular marching block");
                if (!is_scalar && gb.scalar) {
                    // expand the scalar entries stored so far
                    std::vector<cd> full(npts * qq, cd{});
                    for (std::size_t i = 0; i < npts; ++i)
                        for (int d = 0; d < q; ++d) full[i * qq + d * q + d] = gb.inv[i];
                    gb.inv.swap(full);
                    gb.scalar = false;
                }
                std::size_t idx = lat.index(k, j);
                if (gb.scalar) {
                    gb.inv[idx] = 1.0 / b[0];
                } else {
                    Eigen::MatrixXcd m(q, q);
                    for (int r = 0; r < q; ++r)
                        for (int c = 0; c < q; ++c) m(r, c) = b[r * q + c];
                    Eigen::MatrixXcd mi = m.fullPivLu().inverse();
                    for (int r = 0; r < q; ++r)
                        for (int c = 0; c < q; ++c) gb.inv[idx * qq + r * q + c] = mi(r, c);
                }
            }
        }
        out.push_back(std::move(gb));
    }
}

void MarchingSolver::march_row(Section& u, const Section& f, int k, int kt, const std::vector<GroupBlocks>& blocks,
                               std::vector<cd>& scratch) const {
    const SpacetimeLattice& lat = op_->lattice();
    const int fib = op_->fiber();
    cd rhs[4];
    for (const GroupBlocks& gb : blocks) {
        op_->apply_row(u, k, scratch.data());
        const int q = static_cast<int>(gb.comps.size());
        for (int j = 0; j < lat.n_x; ++j) {
            for (int ri = 0; ri < q; ++ri) {
                int c = gb.comps[ri];
                rhs[ri] = f(k, j, c) - scratch[static_cast<std::size_t>(j) * fib + c];
            }
            std::size_t idx = lat.index(k, j);
            if (gb.scalar) {
                for (int ri = 0; ri < q; ++ri) u(kt, j, gb.comps[ri]) = gb.inv[idx] * rhs[ri];
            } else {
                const cd* m = &gb.inv[idx * q * q];
                for (int ri = 0; ri < q; ++ri) {
                    cd acc = 0.0;
                    for (int ci = 0; ci < q; ++ci) acc += m[ri * q + ci] * rhs[ci];
                    u(kt, j, gb.comps[ri]) = acc;
                }
            }
        }
    }
}

Section MarchingSolver::solve(const Section& f, Which which) const {
    const SpacetimeLattice& lat = op_->lattice();
    const int s = op_->time_reach();
    if (f.fiber() != op_->fiber()) throw PreconditionError("source fiber does not match operator");
    if (max_abs_rows(f, 0, s) != 0.0 || max_abs_rows(f, lat.n_t - s, lat.n_t) != 0.0)
        throw PreconditionError("source touches the lattice time boundary");
    Section u = op_->zero();
    std::vector<cd> scratch(static_cast<std::size_t>(lat.n_x) * op_->fiber());
    if (which == Which::retarded) {
        for (int k = 0; k + s < lat.n_t; ++k) march_row(u, f, k, k + s, fwd_, scratch);
    } else {
        for (int k = lat.n_t - 1; k - s >= 0; --k) march_row(u, f, k, k - s, bwd_, scratch);
    }
    return u;
}

Section MarchingSolver::cauchy(int k0, const std::vector<cd>& u0, const std::vector<cd>& u1, const Section& source,
                               TimeDirection dir) const {
    const SpacetimeLattice& lat = op_->lattice();
    const int fib = op_->fiber();
    if (op_->time_reach() != 1 || op_->groups(Which::retarded).size() != 1)
        throw PreconditionError("Cauchy solver needs a reach-one operator with a single component group");
    if (k0 < 1 || k0 > lat.n_t - 2) throw PreconditionError("Cauchy slice must be an interior row");
    const std::size_t row = static_cast<std::size_t>(lat.n_x) * fib;
    if (u0.size() != row || u1.size() != row) throw PreconditionError("slice data has the wrong length");

    std::vector<int> g(fib);
    std::iota(g.begin(), g.end(), 0);
    const int ahead = dir == TimeDirection::future ? k0 + 1 : k0 - 1;
    const int behind = dir == TimeDirection::future ? k0 - 1 : k0 + 1;
    auto lead = probe_blocks(*op_, k0, ahead, g);
    auto ghost = probe_blocks(*op_, k0, behind, g);

    Section u = op_->zero();
    for (int j = 0; j < lat.n_x; ++j)
        for (int c = 0; c < fib; ++c) u(k0, j, c) = u0[static_cast<std::size_t>(j) * fib + c];
    std::vector<cd> r(row);
    op_->apply_row(u, k0, r.data());
    // the ghost row is eliminated with the centered normal derivative:
    // u(behind) = u(ahead) -+ 2 dt sqrt(beta) u1
    const double sign = dir == TimeDirection::future ? -1.0 : 1.0;
    for (int j = 0; j < lat.n_x; ++j) {
        Eigen::MatrixXcd m(fib, fib), gm(fib, fib);
        Eigen::VectorXcd rhs(fib), d(fib);
        for (int a = 0; a < fib; ++a)
            for (int b = 0; b < fib; ++b) {
                m(a, b) = lead[j][a * fib + b] + ghost[j][a * fib + b];
                gm(a, b) = ghost[j][a * fib + b];
            }
        const double scale = 2.0 * lat.dt * std::sqrt(lat.beta(k0, j));
        for (int a = 0; a < fib; ++a) {
            rhs(a) = source(k0, j, a) - r[static_cast<std::size_t>(j) * fib + a];
            d(a) = scale * u1[static_cast<std::size_t>(j) * fib + a];
        }
        rhs -= sign * (gm * d);
        Eigen::VectorXcd x = m.fullPivLu().solve(rhs);
        for (int a = 0; a < fib; ++a) u(ahead, j, a) = x(a);
    }
    std::vector<cd> scratch(row);
    if (dir == TimeDirection::future) {
        for (int k = k0 + 1; k + 1 < lat.n_t; ++k) march_row(u, source, k, k + 1, fwd_, scratch);
    } else {
        for (int k = k0 - 1; k - 1 >= 0; --k) march_row(u, source, k, k - 1, bwd_, scratch);
    }
    return u;
}

double GreenModel::component_time(int k, int) const { return lattice().t(k); }

Section GreenModel::causal(const Section& f) const { return green(f, Which::advanced) - green(f, Which::retarded); }

cd pair(const Section& a, const Section& b, bool sesquilinear) {
    if (a.fiber() != b.fiber()) throw PreconditionError("pairing needs equal fiber dimensions");
    std::vector<double> w = volume_weights(a.lattice());
    cd acc = 0.0;
    for (int k = 0; k < a.n_t(); ++k)
        for (int j = 0; j < a.n_x(); ++j) {
            cd local = 0.0;
            for (int c = 0; c < a.fiber(); ++c) local += (sesquilinear ? std::conj(a(k, j, c)) : a(k, j, c)) * b(k, j, c);
            acc += w[a.lattice().index(k, j)] * local;
        }
    return acc;
}

namespace {

void check_source(const GreenModel& model, const Section& f, Which which) {
    SupportMask m = model.support_of(f);
    const int width = model.boundary_width();
    SupportClass need = which == Which::retarded ? SupportClass::PastCompact : SupportClass::FutureCompact;
    if (!has_support_class(m, need, width))
        throw PreconditionError("source is not " + support_class_name(need) + " on this lattice");
    if (!has_support_class(m, SupportClass::Compact, width))
        throw PreconditionError("source touches the lattice time boundary");
}

}  // namespace

Section green_apply(const GreenModel& model, const Section& f, Which which) {
    check_source(model, f, which);
    return model.green(f, which);
}

Section causal_propagator(const GreenModel& model, const Section& f) {
    check_source(model, f, Which::retarded);
    return model.causal(f);
}

Section solve_cauchy(const MarchingSolver& solver, const CauchySlice& slice, const std::vector<cd>& u0,
                     const std::vector<cd>& u1, const Section& source, TimeDirection dir) {
    const SpacetimeLattice& lat = solver.op().lattice();
    double cfl = 0.0;
    for (int k = 0; k < lat.n_t; ++k)
        for (int j = 0; j < lat.n_x; ++j) cfl = std::max(cfl, std::sqrt(lat.beta(k, j) / lat.h(k, j)));
    if (cfl * lat.dt > lat.dx * (1.0 + 1e-12)) throw PreconditionError("CFL condition violated");
    return solver.cauchy(slice.t_index, u0, u1, source, dir);
}

double Partition::chi_plus(double t) const {
    double s = (t - t_lo) / (t_hi - t_lo);
    s = std::clamp(s, 0.0, 1.0);
    double v = s * s * (3.0 - 2.0 * s);
    return std::ldexp(std::nearbyint(std::ldexp(v, 40)), -40);
}

Partition Partition::middle_third(const SpacetimeLattice& lat) {
    double t0 = lat.t(0), t1 = lat.t(lat.n_t - 1);
    return {t0 + (t1 - t0) / 3.0, t0 + 2.0 * (t1 - t0) / 3.0};
}

Section split_solve(const GreenModel& model, const Section& f, const Partition& chi) {
    Section fp = f, fm = f;
    for (int k = 0; k < f.n_t(); ++k)
        for (int j = 0; j < f.n_x(); ++j)
            for (int c = 0; c < f.fiber(); ++c) {
                double t = model.component_time(k, c);
                fp(k, j, c) *= chi.chi_plus(t);
                fm(k, j, c) *= chi.chi_minus(t);
            }
    return model.green(fp, Which::retarded) + model.green(fm, Which::advanced);
}

NormallyHyperbolicForm::NormallyHyperbolicForm(LatticePtr lat, int fib) : lattice(std::move(lat)), fiber(fib) {
    std::size_t n = lattice->size() * fib * fib;
    b_t.assign(n, cd{});
    b_x.assign(n, cd{});
    c.assign(n, cd{});
}

Section apply_form(const NormallyHyperbolicForm& form, const Section& u) {
    const SpacetimeLattice& lat = *form.lattice;
    const int n = form.fiber;
    Section out(form.lattice, n, u.kind());
    for (int k = 1; k + 1 < lat.n_t; ++k)
        for (int j = 0; j < lat.n_x; ++j) {
            const double gtt = 1.0 / lat.beta(k, j), gxx = -1.0 / lat.h(k, j);
            const cd* bt = form.Bt(k, j);
            const cd* bx = form.Bx(k, j);
            const cd* cc = form.C(k, j);
            for (int a = 0; a < n; ++a) {
                cd v = gtt * (u.get(k + 1, j, a) - 2.0 * u(k, j, a) + u.get(k - 1, j, a)) / (lat.dt * lat.dt) +
                       gxx * (u.get(k, j + 1, a) - 2.0 * u(k, j, a) + u.get(k, j - 1, a)) / (lat.dx * lat.dx);
                for (int b = 0; b < n; ++b) {
                    cd ut = (u.get(k + 1, j, b) - u.get(k - 1, j, b)) / (2.0 * lat.dt);
                    cd ux = (u.get(k, j + 1, b) - u.get(k, j - 1, b)) / (2.0 * lat.dx);
                    v += bt[a * n + b] * ut + bx[a * n + b] * ux + cc[a * n + b] * u(k, j, b);
                }
                out(k, j, a) = v;
            }
        }
    return out;
}

std::vector<cd> symbol_probe(const NormallyHyperbolicForm& form, int k, int j, std::array<double, 2> zeta,
                             std::array<double, 3> scales) {
    const SpacetimeLattice& lat = *form.lattice;
    const int n = form.fiber;
    const double g = zeta[0] * zeta[0] / lat.beta(k, j) - zeta[1] * zeta[1] / lat.h(k, j);
    const cd I(0.0, 1.0);
    std::array<std::vector<cd>, 3> samples;
    for (int s = 0; s < 3; ++s) {
        const double lam = scales[s];
        samples[s].assign(static_cast<std::size_t>(n) * n, cd{});
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                // L e^{i lam zeta.x} = (-lam^2 g + i lam zeta.B + C) e^{i lam zeta.x}, divided by (i lam)^2
                cd v = (a == b ? -lam * lam * g : 0.0) +
                       I * lam * (zeta[0] * form.Bt(k, j)[a * n + b] + zeta[1] * form.Bx(k, j)[a * n + b]) +
                       form.C(k, j)[a * n + b];
                samples[s][a * n + b] = v / (-(lam * lam));
            }
    }
    // quadratic extrapolation in 1/lambda to zero
    std::array<double, 3> x{1.0 / scales[0], 1.0 / scales[1], 1.0 / scales[2]};
    std::array<double, 3> w{};
    for (int i = 0; i < 3; ++i) {
        double num = 1.0, den = 1.0;
        for (int m = 0; m < 3; ++m)
            if (m != i) {
                num *= -x[m];
                den *= x[i] - x[m];
            }
        w[i] = num / den;
    }
    std::vector<cd> out(static_cast<std::size_t>(n) * n, cd{});
    for (int i = 0; i < 3; ++i)
        for (std::size_t e = 0; e < out.size(); ++e) out[e] += w[i] * samples[i][e];
    return out;
}

AdjointResidual adjoint_residual(const GreenModel& model, const GreenModel& partner, const Section& f,
                                 const Section& g) {
    AdjointResidual r;
    r.operator_residual =
        std::abs(partner.pair(partner.dynamics().apply(g), f) - model.pair(g, model.dynamics().apply(f)));
    for (Which w : {Which::retarded, Which::advanced}) {
        Which other = w == Which::retarded ? Which::advanced : Which::retarded;
        double d = std::abs(partner.pair(partner.green(g, other), f) - model.pair(g, model.green(f, w)));
        r.green_residual = std::max(r.green_residual, d);
    }
    return r;
}

double IdentityResiduals::worst() const {
    return std::max({l_after_e[0], l_after_e[1], e_after_l[0], e_after_l[1]});
}

std::size_t support_violations(const GreenModel& model, const Section& f, const Section& ef, Which which) {
    SupportMask seed = model.support_of(f);
    SupportMask cone = causal_cone(model.lattice(), seed,
                                   which == Which::retarded ? TimeDirection::future : TimeDirection::past);
    return model.support_of(ef).cells_outside(cone);
}

IdentityResiduals green_identities(const GreenModel& model, const Section& f) {
    IdentityResiduals r;
    const int m = model.interior_margin();
    const int nt = model.lattice().n_t;
    const double fn = f.max_abs();
    const Section lf = model.dynamics().apply(f);
    for (int i = 0; i < 2; ++i) {
        Which w = i == 0 ? Which::retarded : Which::advanced;
        Section ef = model.green(f, w);
        r.l_after_e[i] = max_abs_diff(model.dynamics().apply(ef), f, m, nt - m) / fn;
        r.e_after_l[i] = max_abs_diff(model.green(lf, w), f, m, nt - m) / fn;
        r.support_violations[i] = support_violations(model, f, ef, w);
    }
    return r;
}

Observable make_observable(const GreenModel& model, const Section& f) {
    if (!has_support_class(model.support_of(f), SupportClass::Compact, model.boundary_width()))
        throw PreconditionError("observable representative must be compact and clear of the time boundary");
    return {f, &model};
}

cd evaluate(const Observable& obs, const Section& phi) { return obs.model->pair(obs.rep, phi); }

namespace {

void same_model(const Observable& a, const Observable& b) {
    if (a.model != b.model) throw PreconditionError("observables belong to different models");
}

}  // namespace

bool observable_equal(const Observable& a, const Observable& b, double tol) {
    same_model(a, b);
    Section e = a.model->causal(a.rep - b.rep);
    const int w = a.model->boundary_width();
    return max_abs_rows(e, w, e.n_t() - w) <= tol * (a.rep.max_abs() + b.rep.max_abs());
}

cd causal_pairing(const Observable& a, const Observable& b) {
    same_model(a, b);
    return a.model->pair(a.rep, a.model->causal(b.rep));
}

Observable time_slice_project(const Observable& obs, int k_lo, int k_hi) {
    const GreenModel& model = *obs.model;
    const SpacetimeLattice& lat = model.lattice();
    const int s = model.dynamics().time_reach();
    const int margin = s + 2;
    k_lo = std::max(k_lo, 0);
    k_hi = std::min(k_hi, lat.n_t);
    if (k_hi - 1 - margin - (k_lo + margin) < 2) throw PreconditionError("time band too narrow for the projector");
    Partition chi{lat.t(k_lo + margin), lat.t(k_hi - 1 - margin)};

    Section g = model.causal(obs.rep);
    const int fib = g.fiber();
    for (int k = 0; k < lat.n_t; ++k)
        for (int c = 0; c < fib; ++c) {
            double w = chi.chi_minus(model.component_time(k, c));
            for (int j = 0; j < lat.n_x; ++j) g(k, j, c) *= w;
        }
    Section fp = model.dynamics().apply(g);
    for (int k = 0; k < lat.n_t; ++k) {
        double first = chi.chi_minus(model.component_time(std::max(k - s, 0), 0));
        bool flat = true;
        for (int kk = std::max(k - s, 0); kk <= std::min(k + s, lat.n_t - 1) && flat; ++kk)
            for (int c = 0; c < fib; ++c)
                if (chi.chi_minus(model.component_time(kk, c)) != first) {
                    flat = false;
                    break;
                }
        if (flat)
            for (int j = 0; j < lat.n_x; ++j)
                for (int c = 0; c < fib; ++c) fp(k, j, c) = 0.0;
    }
    return {fp, &model};
}

double onshell_residual(const StencilOperator& op, const Section& u, int margin) {
    const double n = u.max_abs();
    if (n == 0.0) return 0.0;
    Section r = op.apply(u);
    return max_abs_rows(r, margin, u.n_t() - margin) / (op.scale() * n);
}

double bump(double r) {
    if (std::abs(r) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - r * r));
}

}  // namespace ghft
