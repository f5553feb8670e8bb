#pragma once

#include "phasestar/coefficient.hpp"

#include <array>
#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace phasestar {

inline constexpr std::size_t kMaxCoords = 16;

// Ordered coordinate names with a canonical pairing: {coords[pos], coords[mom]} = 1.
class PhaseSpace {
 public:
  static std::shared_ptr<const PhaseSpace> make(std::vector<std::string> coords,
                                                std::vector<std::pair<int, int>> pairs);
  // q_i paired with p_i, coordinates ordered as given.
  static std::shared_ptr<const PhaseSpace> canonical(const std::vector<std::string>& positions,
                                                     const std::vector<std::string>& momenta);

  std::size_t dim() const { return coords_.size(); }
  std::size_t dof() const { return pairs_.size(); }
  const std::vector<std::string>& coords() const { return coords_; }
  const std::string& name(std::size_t i) const { return coords_.at(i); }
  const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }
  std::optional<std::size_t> find(const std::string& name) const;
  std::size_t index(const std::string& name) const;  // throws InputError
  int partner(std::size_t i) const { return partner_[i]; }
  bool is_position(std::size_t i) const { return is_position_[i]; }
  // J^{ij}: +1 for (position, momentum), -1 for (momentum, position), else 0.
  int J(std::size_t i, std::size_t j) const;

  friend bool operator==(const PhaseSpace& a, const PhaseSpace& b) {
    return a.coords_ == b.coords_ && a.pairs_ == b.pairs_;
  }

 private:
  std::vector<std::string> coords_;
  std::vector<std::pair<int, int>> pairs_;
  std::vector<int> partner_;
  std::vector<bool> is_position_;
};

using SpacePtr = std::shared_ptr<const PhaseSpace>;

bool same_space(const SpacePtr& a, const SpacePtr& b);

struct Monomial {
  std::array<std::uint16_t, kMaxCoords> e{};
  std::uint32_t deg = 0;

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.deg == b.deg && a.e == b.e; }
  // Graded lexicographic: true when a precedes b in canonical (descending) order.
  friend bool precedes(const Monomial& a, const Monomial& b) {
    if (a.deg != b.deg) return a.deg > b.deg;
    return a.e > b.e;
  }
  Monomial operator*(const Monomial& o) const;
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const;
};

// Coordinate of the phase space or a coefficient-ring generator, addressed uniformly
// where the distribution calculus integrates over either kind.
struct Variable {
  enum class Kind { coordinate, parameter } kind;
  std::uint32_t index;
  static Variable coord(std::size_t i) { return {Kind::coordinate, static_cast<std::uint32_t>(i)}; }
  static Variable param(std::string_view name) { return {Kind::parameter, ParamNames::intern(name)}; }
};

class Symbol {
 public:
  struct Term {
    Monomial mono;
    Coefficient coeff;
  };

  explicit Symbol(SpacePtr space) : space_(std::move(space)) {}
  Symbol(SpacePtr space, Coefficient c);
  static Symbol coordinate(SpacePtr space, const std::string& name);
  static Symbol coordinate(SpacePtr space, std::size_t index);
  static Symbol constant(SpacePtr space, Coefficient c) { return Symbol(std::move(space), std::move(c)); }
  static Symbol from_terms(SpacePtr space, std::vector<Term> terms);

  const SpacePtr& space() const { return space_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;  // coordinate-free
  Coefficient constant_term() const;
  Coefficient constant_value() const;  // requires is_constant()
  int total_degree() const;  // -1 for zero
  int degree_in(std::size_t coord) const;
  bool depends_on(std::size_t coord) const;
  int degree(Variable v) const;  // -1 if v does not occur; negative parameter powers are rejected
  bool contains(Variable v) const;
  // Coefficient of v^power, with v removed.
  Symbol coefficient_of(Variable v, int power) const;
  Symbol substitute(Variable v, const Symbol& value) const;

  int min_hbar_power() const;
  int max_hbar_power() const;
  Symbol hbar_part(int power) const;
  Symbol with_hbar_sign_flipped() const;
  Symbol conj() const;

  Symbol operator-() const;
  Symbol& operator+=(const Symbol& o);
  Symbol& operator-=(const Symbol& o);
  friend Symbol operator+(Symbol a, const Symbol& b) { return a += b; }
  friend Symbol operator-(Symbol a, const Symbol& b) { return a -= b; }
  friend Symbol operator*(const Symbol& a, const Symbol& b);
  friend Symbol operator*(const Symbol& a, const Coefficient& c);
  friend Symbol operator*(const Coefficient& c, const Symbol& a) { return a * c; }
  friend bool operator==(const Symbol& a, const Symbol& b);
  friend bool operator!=(const Symbol& a, const Symbol& b) { return !(a == b); }

  // Multiply by the monomial x^m (no coefficient).
  Symbol times_monomial(const Monomial& m) const;

  std::complex<double> evaluate(const std::vector<double>& coords, const std::map<std::string, double>& params) const;

 private:
  void canonicalize();
  SpacePtr space_;
  std::vector<Term> terms_;
};

Symbol add(const Symbol& a, const Symbol& b);
Symbol mul(const Symbol& a, const Symbol& b);
Symbol pow(const Symbol& a, int n);
Symbol partial(const Symbol& a, const std::string& coord);
Symbol partial(const Symbol& a, std::size_t coord, int order = 1);
Symbol poisson(const Symbol& a, const Symbol& b);

// Composition: every coordinate of a that occurs must be bound; replacements share one space.
Symbol substitute(const Symbol& a, const std::map<std::string, Symbol>& bindings);
Symbol substitute(const Symbol& a, const std::vector<std::optional<Symbol>>& by_index, const SpacePtr& target);

// Replace generator `name` by a numeric rational or by another coefficient everywhere.
Symbol substitute_param(const Symbol& a, const std::string& name, const Coefficient& value);

void require_same_space(const SpacePtr& a, const SpacePtr& b, const char* what);

}  // namespace phasestar
