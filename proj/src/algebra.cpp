#include "ghft/algebra.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "ghft/dirac.hpp"

namespace ghft {

std::string Handle::str() const {
    return std::string(kind == GenKind::PsiFermi ? "Psi(" : "Phi(") + std::to_string(index) + ")";
}

namespace {

void check_square(const std::vector<std::vector<GaussRat>>& g) {
    if (g.empty()) throw PreconditionError("registry needs at least one observable");
    for (const auto& row : g)
        if (row.size() != g.size()) throw PreconditionError("Gram matrix must be square");
}

}  // namespace

Registry Registry::bose(std::vector<std::vector<GaussRat>> tau) {
    check_square(tau);
    const std::size_t n = tau.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (tau[i][j].im != 0) throw PreconditionError("Bose Gram data must be real");
            if (tau[i][j] != -tau[j][i]) throw PreconditionError("Bose Gram data must be antisymmetric");
        }
    Registry r;
    r.stats_ = Statistics::Bose;
    r.gram_ = std::move(tau);
    return r;
}

Registry Registry::fermi(std::vector<std::vector<GaussRat>> gram) {
    check_square(gram);
    const std::size_t n = gram.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (gram[i][j] != gram[j][i].conj()) throw PreconditionError("Fermi Gram data must be Hermitian");
    Registry r;
    r.stats_ = Statistics::Fermi;
    r.gram_ = std::move(gram);
    return r;
}

Registry Registry::bose_numeric(const std::vector<std::vector<double>>& tau) {
    const std::size_t n = tau.size();
    std::vector<std::vector<GaussRat>> g(n, std::vector<GaussRat>(n));
    std::vector<SnapEntry> log;
    for (std::size_t i = 0; i < n; ++i) {
        if (tau[i].size() != n) throw PreconditionError("Gram matrix must be square");
        for (std::size_t j = 0; j < n; ++j) {
            double v = 0.5 * (tau[i][j] - tau[j][i]);
            g[i][j] = GaussRat(snap_rational(v));
            log.push_back({static_cast<int>(i), static_cast<int>(j), cd(tau[i][j]), g[i][j]});
        }
    }
    Registry r = bose(std::move(g));
    r.snaps_ = std::move(log);
    return r;
}

Registry Registry::fermi_numeric(const std::vector<std::vector<cd>>& gram) {
    const std::size_t n = gram.size();
    std::vector<std::vector<GaussRat>> g(n, std::vector<GaussRat>(n));
    std::vector<SnapEntry> log;
    for (std::size_t i = 0; i < n; ++i) {
        if (gram[i].size() != n) throw PreconditionError("Gram matrix must be square");
        for (std::size_t j = 0; j < n; ++j) {
            cd v = 0.5 * (gram[i][j] + std::conj(gram[j][i]));
            g[i][j] = snap_complex(v);
            log.push_back({static_cast<int>(i), static_cast<int>(j), gram[i][j], g[i][j]});
        }
    }
    Registry r = fermi(std::move(g));
    r.snaps_ = std::move(log);
    return r;
}

bool Registry::contains(const Handle& h) const {
    if (h.index < 0 || h.index >= size()) return false;
    return stats_ == Statistics::Bose ? h.kind == GenKind::PhiBose : h.kind != GenKind::PhiBose;
}

std::size_t Registry::zero_snaps() const {
    return static_cast<std::size_t>(
        std::count_if(snaps_.begin(), snaps_.end(), [](const SnapEntry& e) { return e.exact.is_zero() && e.numeric != 0.0; }));
}

namespace {

void accumulate(std::map<Monomial, GaussRat>& m, const Monomial& key, const GaussRat& c) {
    if (c.is_zero()) return;
    auto it = m.find(key);
    if (it == m.end()) {
        m.emplace(key, c);
        return;
    }
    it->second += c;
    if (it->second.is_zero()) m.erase(it);
}

bool out_of_order(const Registry& reg, const Handle& a, const Handle& b) {
    return b < a || (reg.statistics() == Statistics::Fermi && a == b);
}

void check_same(const Element& a, const Element& b) {
    if (!a.registry() || !b.registry()) throw PreconditionError("element without registry");
    if (a.registry() != b.registry()) throw PreconditionError("registry mismatch");
}

}  // namespace

Element Element::from_terms(RegistryPtr reg, const std::map<Monomial, GaussRat>& raw, Xorshift64* rng) {
    if (!reg) throw PreconditionError("element without registry");
    const Registry& R = *reg;
    const bool fermi = R.statistics() == Statistics::Fermi;
    for (const auto& [mono, c] : raw)
        for (const Handle& h : mono)
            if (!R.contains(h)) throw PreconditionError("unknown generator " + h.str());

    Element out(reg);
    std::map<Monomial, GaussRat> pending;
    for (const auto& [mono, c] : raw) accumulate(pending, mono, c);
    std::vector<std::size_t> sites;
    while (!pending.empty()) {
        auto it = pending.begin();
        if (rng) std::advance(it, static_cast<long>(rng->next() % pending.size()));
        Monomial m = it->first;
        GaussRat c = it->second;
        pending.erase(it);

        sites.clear();
        for (std::size_t i = 0; i + 1 < m.size(); ++i)
            if (out_of_order(R, m[i], m[i + 1])) {
                sites.push_back(i);
                if (!rng) break;
            }
        if (sites.empty()) {
            accumulate(out.terms_, m, c);
            continue;
        }
        const std::size_t i = rng ? sites[rng->next() % sites.size()] : sites.front();
        const Handle a = m[i], b = m[i + 1];
        if (fermi && a == b) continue;  // a a = {a, a} / 2 = 0

        GaussRat corr;
        if (!fermi)
            corr = I_unit * R.gram(a.index, b.index);  // [Phi(a), Phi(b)] = i tau(a, b)
        else if (a.kind == GenKind::PsiFermi && b.kind == GenKind::PhiFermi)
            corr = R.gram(b.index, a.index);           // {Psi(j), Phi(i)} = G(i, j)
        Monomial swapped = m;
        std::swap(swapped[i], swapped[i + 1]);
        accumulate(pending, swapped, fermi ? -c : c);
        if (!corr.is_zero()) {
            Monomial shorter;
            shorter.reserve(m.size() - 2);
            shorter.insert(shorter.end(), m.begin(), m.begin() + static_cast<long>(i));
            shorter.insert(shorter.end(), m.begin() + static_cast<long>(i) + 2, m.end());
            accumulate(pending, shorter, c * corr);
        }
    }
    return out;
}

Element Element::unit(RegistryPtr reg) { return scalar(std::move(reg), GaussRat(1)); }

Element Element::scalar(RegistryPtr reg, const GaussRat& c) {
    Element e(std::move(reg));
    if (!c.is_zero()) e.terms_.emplace(Monomial{}, c);
    return e;
}

Element Element::inject(RegistryPtr reg, Handle h) {
    if (!reg || !reg->contains(h)) throw PreconditionError("unknown generator " + h.str());
    Element e(std::move(reg));
    e.terms_.emplace(Monomial{h}, GaussRat(1));
    return e;
}

int Element::degree() const {
    int d = -1;
    for (const auto& [m, c] : terms_) d = std::max(d, static_cast<int>(m.size()));
    return d;
}

std::string Element::str() const {
    if (terms_.empty()) return "0";
    std::vector<const std::pair<const Monomial, GaussRat>*> order;
    for (const auto& t : terms_) order.push_back(&t);
    std::stable_sort(order.begin(), order.end(),
                     [](auto* x, auto* y) { return x->first.size() < y->first.size(); });
    std::string s;
    for (auto* t : order) {
        if (!s.empty()) s += " + ";
        s += t->second.str();
        for (const Handle& h : t->first) s += "*" + h.str();
    }
    return s;
}

Element& Element::operator+=(const Element& o) {
    check_same(*this, o);
    for (const auto& [m, c] : o.terms_) accumulate(terms_, m, c);
    return *this;
}

Element& Element::operator-=(const Element& o) {
    check_same(*this, o);
    for (const auto& [m, c] : o.terms_) accumulate(terms_, m, -c);
    return *this;
}

Element operator*(const GaussRat& c, const Element& x) {
    Element out(x.reg_);
    if (c.is_zero()) return out;
    for (const auto& [m, v] : x.terms_) out.terms_.emplace(m, c * v);
    return out;
}

Element operator*(const Element& x, const Element& y) {
    check_same(x, y);
    std::map<Monomial, GaussRat> raw;
    for (const auto& [mx, cx] : x.terms_)
        for (const auto& [my, cy] : y.terms_) {
            Monomial m = mx;
            m.insert(m.end(), my.begin(), my.end());
            accumulate(raw, m, cx * cy);
        }
    return Element::from_terms(x.reg_, raw);
}

bool operator==(const Element& a, const Element& b) {
    check_same(a, b);
    return a.terms_ == b.terms_;
}

bool is_normal(const Element& x) {
    for (const auto& [m, c] : x.terms()) {
        if (c.is_zero()) return false;
        for (std::size_t i = 0; i + 1 < m.size(); ++i)
            if (out_of_order(*x.registry(), m[i], m[i + 1])) return false;
    }
    return true;
}

Element normal_form(const Element& x, Xorshift64* rng) { return Element::from_terms(x.registry(), x.terms(), rng); }

Element involution(const Element& x) {
    const bool fermi = x.statistics() == Statistics::Fermi;
    std::map<Monomial, GaussRat> raw;
    for (const auto& [m, c] : x.terms()) {
        Monomial r(m.rbegin(), m.rend());
        if (fermi)
            for (Handle& h : r) h.kind = h.kind == GenKind::PhiFermi ? GenKind::PsiFermi : GenKind::PhiFermi;
        accumulate(raw, r, c.conj());
    }
    return Element::from_terms(x.registry(), raw);
}

bool equal(const Element& x, const Element& y) { return x == y; }

Element commutator(const Element& x, const Element& y) { return x * y - y * x; }

Element anticommutator(const Element& x, const Element& y) { return x * y + y * x; }

std::map<Monomial, GaussRat> random_raw(const Registry& reg, Xorshift64& rng, int max_degree, int terms) {
    std::map<Monomial, GaussRat> raw;
    const bool fermi = reg.statistics() == Statistics::Fermi;
    for (int t = 0; t < terms; ++t) {
        const int len = static_cast<int>(rng.integer(0, max_degree));
        Monomial m;
        for (int i = 0; i < len; ++i) {
            GenKind kind = !fermi ? GenKind::PhiBose : (rng.integer(0, 1) ? GenKind::PsiFermi : GenKind::PhiFermi);
            m.push_back({kind, static_cast<int>(rng.integer(0, reg.size() - 1))});
        }
        GaussRat c(Rational(rng.integer(-6, 6), rng.integer(1, 4)), Rational(rng.integer(-6, 6), rng.integer(1, 4)));
        accumulate(raw, m, c);
    }
    return raw;
}

Element random_element(RegistryPtr reg, Xorshift64& rng, int max_degree, int terms) {
    auto raw = random_raw(*reg, rng, max_degree, terms);
    return Element::from_terms(std::move(reg), raw);
}

Registry registry_from_observables(const std::vector<Observable>& obs) {
    if (obs.empty()) throw PreconditionError("registry needs at least one observable");
    const GreenModel* model = obs.front().model;
    for (const Observable& o : obs)
        if (o.model != model) throw PreconditionError("observables from different models");
    const std::size_t n = obs.size();
    if (model->bosonic()) {
        std::vector<Section> e;
        for (const Observable& o : obs) e.push_back(model->causal(o.rep));
        std::vector<std::vector<double>> tau(n, std::vector<double>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) tau[i][j] = model->pair(obs[i].rep, e[j]).real();
        return Registry::bose_numeric(tau);
    }
    if (dynamic_cast<const DiracModel*>(model) == nullptr) throw PreconditionError("unsupported fermionic model");
    std::vector<std::vector<cd>> g(n, std::vector<cd>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g[i][j] = hermitian_form(obs[j], obs[i]);
    return Registry::fermi_numeric(g);
}

bool causally_disjoint(const GreenModel& model, const Section& a, const Section& b) {
    const SpacetimeLattice& L = model.lattice();
    SupportMask sa = model.support_of(a), sb = model.support_of(b);
    if (sa.empty() || sb.empty()) return true;
    SupportMask cone = causal_cone(L, sa, TimeDirection::future).unite(causal_cone(L, sa, TimeDirection::past));
    // one extra column of clearance for staggered stencils
    for (int k = 0; k < L.n_t; ++k)
        for (int j = 0; j < L.n_x; ++j)
            if (sb.at(k, j) && (cone.at(k, j) || cone.at(k, L.wrap(j - 1)) || cone.at(k, L.wrap(j + 1))))
                return false;
    return true;
}

std::size_t CausalityReport::nonzero() const {
    return static_cast<std::size_t>(
        std::count_if(entries.begin(), entries.end(), [](const CausalityEntry& e) { return !e.value.is_zero(); }));
}

CausalityReport verify_quantum_causality(const RegistryPtr& reg, const std::vector<int>& region_a,
                                         const std::vector<int>& region_b) {
    CausalityReport rep;
    auto gens = [&](const std::vector<int>& region) {
        std::vector<Handle> out;
        for (int i : region) {
            if (reg->statistics() == Statistics::Bose) {
                out.push_back({GenKind::PhiBose, i});
            } else {
                out.push_back({GenKind::PhiFermi, i});
                out.push_back({GenKind::PsiFermi, i});
            }
        }
        return out;
    };
    const std::vector<Handle> ga = gens(region_a), gb = gens(region_b);
    for (const Handle& x : ga)
        for (const Handle& y : gb) {
            Element ex = Element::inject(reg, x), ey = Element::inject(reg, y);
            if (reg->statistics() == Statistics::Bose)
                rep.entries.push_back({"[" + x.str() + "," + y.str() + "]", commutator(ex, ey)});
            else
                rep.entries.push_back({"{" + x.str() + "," + y.str() + "}", anticommutator(ex, ey)});
        }
    if (reg->statistics() == Statistics::Fermi)
        for (std::size_t p = 0; p < ga.size(); ++p)
            for (std::size_t q = p + 1; q < ga.size(); ++q) {
                Element even = Element::inject(reg, ga[p]) * Element::inject(reg, ga[q]);
                for (const Handle& y : gb)
                    rep.entries.push_back({"[" + ga[p].str() + ga[q].str() + "," + y.str() + "]",
                                           commutator(even, Element::inject(reg, y))});
            }
    return rep;
}

bool TimeSliceReport::pass(double tol) const {
    return contained == samples && equal == samples && max_e_residual <= tol && gram_error <= tol;
}

TimeSliceReport time_slice_isomorphism(const std::vector<Observable>& obs, int k_lo, int k_hi) {
    TimeSliceReport rep;
    if (obs.empty()) return rep;
    const GreenModel& model = *obs.front().model;
    const int w = model.boundary_width();
    std::vector<Observable> proj;
    for (const Observable& o : obs) {
        Observable p = time_slice_project(o, k_lo, k_hi);
        SupportMask m = model.support_of(p.rep);
        if (m.empty() || (m.first_row() >= k_lo && m.last_row() < k_hi)) ++rep.contained;
        if (observable_equal(p, o)) ++rep.equal;
        Section e = model.causal(p.rep - o.rep);
        rep.max_e_residual =
            std::max(rep.max_e_residual, max_abs_rows(e, w, e.n_t() - w) / std::max(o.rep.max_abs(), 1e-300));
        proj.push_back(std::move(p));
        ++rep.samples;
    }
    std::vector<Section> e_orig, e_proj;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        e_orig.push_back(model.causal(obs[i].rep));
        e_proj.push_back(model.causal(proj[i].rep));
    }
    double worst = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i)
        for (std::size_t j = 0; j < obs.size(); ++j) {
            cd a = model.pair(obs[i].rep, e_orig[j]);
            cd b = model.pair(proj[i].rep, e_proj[j]);
            worst = std::max(worst, std::abs(a - b));
            ref = std::max(ref, std::abs(a));
        }
    rep.gram_error = ref > 0.0 ? worst / ref : worst;
    return rep;
}

namespace {

class Parser {
public:
    Parser(const std::string& s, const RegistryPtr& reg) : s_(s), reg_(reg) {}

    Element parse() {
        Element e = expr();
        skip();
        if (p_ != s_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw PreconditionError("expression parse error at offset " + std::to_string(p_) + ": " + what);
    }
    void skip() {
        while (p_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[p_]))) ++p_;
    }
    bool eat(const std::string& tok) {
        skip();
        if (s_.compare(p_, tok.size(), tok) == 0) {
            p_ += tok.size();
            return true;
        }
        return false;
    }
    bool peek_digit() const { return p_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p_])); }

    Element expr() {
        Element acc = term();
        for (;;) {
            if (eat("+"))
                acc += term();
            else if (eat("-"))
                acc -= term();
            else
                return acc;
        }
    }
    Element term() {
        Element acc = unary();
        while (eat("*")) acc = acc * unary();
        return acc;
    }
    Element unary() {
        if (eat("-")) return GaussRat(-1) * unary();
        if (eat("+")) return unary();
        return postfix();
    }
    Element postfix() {
        Element base = primary();
        for (;;) {
            if (eat("^")) {
                skip();
                if (!peek_digit()) fail("expected exponent");
                unsigned long n = 0;
                while (peek_digit()) {
                    n = n * 10 + static_cast<unsigned long>(s_[p_++] - '0');
                    if (n > 64) fail("exponent too large");
                }
                Element r = Element::unit(reg_);
                for (unsigned long i = 0; i < n; ++i) r = r * base;
                base = r;
            } else if (eat("\xE2\x80\xA0") || eat("'")) {
                base = involution(base);
            } else {
                return base;
            }
        }
    }
    Element primary() {
        skip();
        if (eat("(")) {
            Element e = expr();
            if (!eat(")")) fail("expected ')'");
            return e;
        }
        if (eat("Phi") || eat("Psi")) {
            const bool psi = s_.compare(p_ - 3, 3, "Psi") == 0;
            if (!eat("(")) fail("expected '('");
            skip();
            if (!peek_digit()) fail("expected generator index");
            long idx = 0;
            while (peek_digit()) {
                idx = idx * 10 + (s_[p_++] - '0');
                if (idx > 1000000) fail("generator index too large");
            }
            if (!eat(")")) fail("expected ')'");
            GenKind kind;
            if (reg_->statistics() == Statistics::Bose) {
                if (psi) fail("Psi generators need a Fermi registry");
                kind = GenKind::PhiBose;
            } else {
                kind = psi ? GenKind::PsiFermi : GenKind::PhiFermi;
            }
            Handle h{kind, static_cast<int>(idx)};
            if (!reg_->contains(h)) fail("unknown generator " + h.str());
            return Element::inject(reg_, h);
        }
        if (peek_digit() || (p_ < s_.size() && s_[p_] == '.')) {
            std::size_t start = p_;
            while (peek_digit() || (p_ < s_.size() && s_[p_] == '.')) ++p_;
            Rational v;
            try {
                v = parse_decimal(s_.substr(start, p_ - start));
            } catch (const std::exception&) {
                fail("malformed number");
            }
            if (p_ < s_.size() && s_[p_] == 'i') {
                ++p_;
                return Element::scalar(reg_, GaussRat(Rational(0), v));
            }
            return Element::scalar(reg_, GaussRat(v));
        }
        if (eat("i")) return Element::scalar(reg_, I_unit);
        fail("expected a coefficient, generator or '('");
    }

    const std::string& s_;
    const RegistryPtr& reg_;
    std::size_t p_ = 0;
};

}  // namespace

Element parse_expression(const std::string& text, const RegistryPtr& reg) {
    if (!reg) throw PreconditionError("expression needs a registry");
    return Parser(text, reg).parse();
}

}  // namespace ghft
