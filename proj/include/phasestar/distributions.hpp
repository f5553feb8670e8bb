#pragma once

#include "phasestar/covariant.hpp"
#include "phasestar/parametrized.hpp"
#include "phasestar/symbol.hpp"

#include <string>
#include <utility>
#include <vector>

namespace phasestar {

struct DeltaFactor {
  Symbol arg;
  int order = 0;  // delta^{(order)}(arg)
  friend bool operator==(const DeltaFactor& a, const DeltaFactor& b) { return a.order == b.order && a.arg == b.arg; }
};

// poly * exp((i/hbar) phase) * prod delta^{(k)}(arg)
struct DeltaTerm {
  Symbol poly;
  Symbol phase;
  std::vector<DeltaFactor> deltas;
  friend bool operator==(const DeltaTerm& a, const DeltaTerm& b) {
    return a.poly == b.poly && a.phase == b.phase && a.deltas == b.deltas;
  }
};

// Finite sum of DeltaTerms over one space, always held in canonical form:
//  - each delta argument whose variable can be isolated (a coordinate occurring only
//    linearly with an invertible coefficient) is scaled to unit coefficient in it;
//  - polynomials and phases carry no dependence on those pivot coordinates, the
//    identities x^m delta^{(k)}(x) = (-1)^m k!/(k-m)! delta^{(k-m)}(x) having been applied;
//  - terms with equal (phase, deltas) are merged.
// Generators (M, k, labels) are taken to be positive when normalizing delta scales.
class DeltaSymbol {
 public:
  explicit DeltaSymbol(SpacePtr space) : space_(std::move(space)) {}
  DeltaSymbol(const Symbol& poly);  // NOLINT: polynomials embed
  static DeltaSymbol delta(const Symbol& arg, int order = 0);
  static DeltaSymbol phase(const Symbol& linear_form);
  static DeltaSymbol from_terms(SpacePtr space, std::vector<DeltaTerm> terms);

  const SpacePtr& space() const { return space_; }
  const std::vector<DeltaTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_polynomial() const;
  Symbol as_polynomial() const;
  int min_hbar_power() const;
  bool depends_on(std::size_t coord) const;

  DeltaSymbol operator-() const;
  friend DeltaSymbol operator+(const DeltaSymbol& a, const DeltaSymbol& b);
  friend DeltaSymbol operator-(const DeltaSymbol& a, const DeltaSymbol& b) { return a + (-b); }
  // Pointwise product; delta arguments of the two factors must be independent.
  friend DeltaSymbol operator*(const DeltaSymbol& a, const DeltaSymbol& b);
  friend DeltaSymbol operator*(const Symbol& p, const DeltaSymbol& d);
  friend bool operator==(const DeltaSymbol& a, const DeltaSymbol& b);
  friend bool operator!=(const DeltaSymbol& a, const DeltaSymbol& b) { return !(a == b); }

 private:
  SpacePtr space_;
  std::vector<DeltaTerm> terms_;
};

std::string to_string(const DeltaSymbol& d);

// Canonical form of an arbitrary list of terms (exposed for confluence tests).
std::vector<DeltaTerm> canonicalize_terms(const SpacePtr& space, std::vector<DeltaTerm> terms);

DeltaSymbol partial(const DeltaSymbol& d, std::size_t coord, int order = 1);
DeltaSymbol partial(const DeltaSymbol& d, const std::string& coord);
// Replace every coordinate by a symbol over `target` (a change of chart).
DeltaSymbol substitute(const DeltaSymbol& d, const std::vector<std::optional<Symbol>>& by_index, const SpacePtr& target);
DeltaSymbol substitute_param(const DeltaSymbol& d, Variable param, const Symbol& value);
// Pull a distribution over the map's source back to its target chart (and the converse).
DeltaSymbol to_target(const DeltaSymbol& d, const Diffeomorphism& map);
DeltaSymbol to_source(const DeltaSymbol& d, const Diffeomorphism& map);

// p * d and d * p through the terminating bidifferential series in p.
DeltaSymbol star_poly_left(const Symbol& p, const DeltaSymbol& d);
DeltaSymbol star_poly_right(const DeltaSymbol& d, const Symbol& p);
// Order-n bidifferential term between two distributions.
DeltaSymbol star_term(const DeltaSymbol& a, const DeltaSymbol& b, int n);
// Star product where it closes: a polynomial factor, factors with no canonically
// conjugate dependence, or a factor exp((i/hbar) L) with L affine. Throws NotClosed otherwise.
DeltaSymbol star(const DeltaSymbol& a, const DeltaSymbol& b);

// exp((i/hbar) sum_j beta_j B_j) * prod_j delta(A_j - b_j). The series is expanded term by
// term up to `check_order`, each term is checked to be free of negative hbar powers and
// equal to the Taylor term of the shifted delta, and the resummed shift is returned.
DeltaSymbol exp_shift_star_delta(const std::vector<Symbol>& beta, const std::vector<Symbol>& B_forms,
                                 const std::vector<Symbol>& A_forms, const std::vector<Symbol>& b, int check_order = 3);

enum class Representation { history, causal };

// rho_{a,b}: delta(phi) exp((i/hbar)(b-a).B) delta(A - (a+b)/2) in the history chart,
// or the same object carried to (t, P_t, q, p) by the causal map.
DeltaSymbol build_stargenfunction(const ExtendedSystem& sys, const std::vector<Symbol>& a, const std::vector<Symbol>& b,
                                  Representation rep);
// Labels a_j, b_j as generators named a<suffix>, b<suffix> (a1, b1, ...).
std::vector<Symbol> label_symbols(const ExtendedSystem& sys, const std::string& prefix, const SpacePtr& space);

struct StargenResidual {
  DeltaSymbol left;   // op * rho - left_value rho
  DeltaSymbol right;  // rho * op - right_value rho
  bool hbar_safe;     // no negative hbar power in any residual term
};
StargenResidual verify_stargen(const DeltaSymbol& rho, const Symbol& op, const Symbol& left_value,
                               const Symbol& right_value);

// Integrate over coordinates or generators, applying
//   int dv delta^{(k)}(c v - w) F = (1/|c|) (-1/c)^k F^{(k)}(w/c)
//   int dv v^m exp((i/hbar) beta v) = 2 pi hbar (-i hbar)^m delta^{(m)}(beta)
// with pi carried as the generator "pi".
DeltaSymbol marginalize_degeneracy(const DeltaSymbol& rho, const std::vector<Variable>& vars);

// delta(z(...) - z0), gated on the closure check of z's Heisenberg symbol.
DeltaSymbol observable_stargenfunction(const ExtendedSystem& sys, const std::string& z, const Symbol& z0,
                                       Representation rep, int max_n = 6);

// Formal star chain kept unevaluated (Schroedinger-representation projectors).
struct StarChain {
  struct Factor {
    enum class Kind { star_delta, star_exp } kind;
    Symbol argument;
  };
  std::vector<Factor> factors;
  bool canonical = false;
};
StarChain schrodinger_stargenfunction(const ExtendedSystem& sys, const std::vector<Symbol>& a,
                                      const std::vector<Symbol>& b);
std::string to_string(const StarChain& c);

}  // namespace phasestar
