#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ghft/exact.hpp"
#include "ghft/greenops.hpp"

namespace ghft {

enum class GenKind { PhiBose = 0, PhiFermi = 1, PsiFermi = 2 };
enum class Statistics { Bose, Fermi };

// Generator Phi(i) or Psi(i); the total order is (kind, index).
struct Handle {
    GenKind kind = GenKind::PhiBose;
    int index = 0;

    auto operator<=>(const Handle&) const = default;
    std::string str() const;
};

struct SnapEntry {
    int i = 0;
    int j = 0;
    cd numeric;
    GaussRat exact;
};

// Frozen Gram data of a finite set of observables. Bose: tau(i, j), real and antisymmetric.
// Fermi: G(i, j) = {Psi(j), Phi(i)} = h_c(A[tau_i], [zeta_j]) with zeta_j = A[tau_j], Hermitian;
// the A-map pairs Phi(i) with Psi(i).
class Registry {
public:
    static Registry bose(std::vector<std::vector<GaussRat>> tau);
    static Registry fermi(std::vector<std::vector<GaussRat>> gram);
    // Numeric Gram matrices are symmetrised, then snapped through snap_complex; every entry is logged.
    static Registry bose_numeric(const std::vector<std::vector<double>>& tau);
    static Registry fermi_numeric(const std::vector<std::vector<cd>>& gram);

    Statistics statistics() const { return stats_; }
    int size() const { return static_cast<int>(gram_.size()); }
    bool contains(const Handle& h) const;
    const GaussRat& gram(int i, int j) const { return gram_[i][j]; }
    const std::vector<SnapEntry>& snap_log() const { return snaps_; }
    // number of entries snapped to exactly zero
    std::size_t zero_snaps() const;

private:
    Statistics stats_ = Statistics::Bose;
    std::vector<std::vector<GaussRat>> gram_;
    std::vector<SnapEntry> snaps_;
};

using RegistryPtr = std::shared_ptr<const Registry>;
using Monomial = std::vector<Handle>;

// Element of the CCR or CAR algebra, stored in normal form.
class Element {
public:
    Element() = default;
    explicit Element(RegistryPtr reg) : reg_(std::move(reg)) {}

    static Element unit(RegistryPtr reg);
    static Element inject(RegistryPtr reg, Handle h);
    static Element scalar(RegistryPtr reg, const GaussRat& c);

    const RegistryPtr& registry() const { return reg_; }
    Statistics statistics() const { return reg_->statistics(); }
    const std::map<Monomial, GaussRat>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    // highest monomial length, -1 for zero
    int degree() const;
    std::string str() const;

    Element& operator+=(const Element& o);
    Element& operator-=(const Element& o);
    friend Element operator+(Element a, const Element& b) { return a += b; }
    friend Element operator-(Element a, const Element& b) { return a -= b; }
    friend Element operator*(const GaussRat& c, const Element& x);
    friend Element operator*(const Element& x, const Element& y);
    friend bool operator==(const Element& a, const Element& b);

    // Builds an element from arbitrary monomials and rewrites it to normal order. With a
    // generator the rewrite site is chosen at random among all admissible ones.
    static Element from_terms(RegistryPtr reg, const std::map<Monomial, GaussRat>& raw, Xorshift64* rng = nullptr);

private:
    RegistryPtr reg_;
    std::map<Monomial, GaussRat> terms_;
};

bool is_normal(const Element& x);
// Re-normal-forms the stored terms (a no-op on valid elements).
Element normal_form(const Element& x, Xorshift64* rng = nullptr);
Element involution(const Element& x);
bool equal(const Element& x, const Element& y);
Element commutator(const Element& x, const Element& y);
Element anticommutator(const Element& x, const Element& y);

// Random element with up to `terms` monomials of length <= max_degree and small rational coefficients.
Element random_element(RegistryPtr reg, Xorshift64& rng, int max_degree, int terms = 4);
// Raw (unordered) monomial map behind random_element, for confluence checks.
std::map<Monomial, GaussRat> random_raw(const Registry& reg, Xorshift64& rng, int max_degree, int terms = 4);

// Gram matrices from observables: tau(i, j) = causal_pairing for bosonic models,
// G(i, j) = h_s([tau_j], [tau_i]) for Dirac spinor observables.
Registry registry_from_observables(const std::vector<Observable>& obs);

// True when supp b misses J(supp a) on the lattice.
bool causally_disjoint(const GreenModel& model, const Section& a, const Section& b);

struct CausalityEntry {
    std::string name;
    Element value;
};

struct CausalityReport {
    std::vector<CausalityEntry> entries;
    std::size_t nonzero() const;
    bool all_zero() const { return nonzero() == 0; }
};

// Every observable index in region_a is causally disjoint from every index in region_b.
// Bose: commutators. Fermi: anticommutators of all generator pairs across the regions and
// commutators of even products of two generators from region_a with generators of region_b.
CausalityReport verify_quantum_causality(const RegistryPtr& reg, const std::vector<int>& region_a,
                                         const std::vector<int>& region_b);

struct TimeSliceReport {
    std::size_t samples = 0;
    std::size_t contained = 0;     // projected representative supported inside the band
    std::size_t equal = 0;         // observable_equal(projected, original)
    double max_e_residual = 0.0;   // ||E(f' - f)|| / ||f|| on interior rows
    double gram_error = 0.0;       // max |form(f', h') - form(f, h)| / max |form(f, h)|
    bool pass(double tol = 1e-8) const;
};

TimeSliceReport time_slice_isomorphism(const std::vector<Observable>& obs, int k_lo, int k_hi);

// Expression grammar: sums and products of complex decimal literals, Phi(n), Psi(n),
// parentheses, '^' powers and postfix adjoint marks ('†' or a single quote).
Element parse_expression(const std::string& text, const RegistryPtr& reg);

}  // namespace ghft
