#include "phasestar/symbol.hpp"

#include "phasestar/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>

namespace phasestar {

SpacePtr PhaseSpace::make(std::vector<std::string> coords, std::vector<std::pair<int, int>> pairs) {
  if (coords.size() > kMaxCoords) throw InputError("phase space has more than 16 coordinates");
  if (coords.size() != 2 * pairs.size()) throw InputError("every coordinate must belong to exactly one canonical pair");
  auto s = std::make_shared<PhaseSpace>();
  s->partner_.assign(coords.size(), -1);
  s->is_position_.assign(coords.size(), false);
  for (std::size_t i = 0; i < coords.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (coords[i] == coords[j]) throw InputError("duplicate coordinate '" + coords[i] + "'");
  for (auto [q, p] : pairs) {
    if (q < 0 || p < 0 || q >= static_cast<int>(coords.size()) || p >= static_cast<int>(coords.size()) || q == p)
      throw InputError("pair index out of range");
    if (s->partner_[q] != -1 || s->partner_[p] != -1) throw InputError("coordinate paired twice");
    s->partner_[q] = p;
    s->partner_[p] = q;
    s->is_position_[q] = true;
  }
  s->coords_ = std::move(coords);
  s->pairs_ = std::move(pairs);
  return s;
}

SpacePtr PhaseSpace::canonical(const std::vector<std::string>& positions, const std::vector<std::string>& momenta) {
  if (positions.size() != momenta.size()) throw InputError("positions and momenta differ in number");
  std::vector<std::string> coords = positions;
  coords.insert(coords.end(), momenta.begin(), momenta.end());
  std::vector<std::pair<int, int>> pairs;
  int n = static_cast<int>(positions.size());
  for (int i = 0; i < n; ++i) pairs.emplace_back(i, i + n);
  return make(std::move(coords), std::move(pairs));
}

std::optional<std::size_t> PhaseSpace::find(const std::string& name) const {
  for (std::size_t i = 0; i < coords_.size(); ++i)
    if (coords_[i] == name) return i;
  return std::nullopt;
}

std::size_t PhaseSpace::index(const std::string& name) const {
  auto i = find(name);
  if (!i) throw InputError("unknown coordinate '" + name + "'");
  return *i;
}

int PhaseSpace::J(std::size_t i, std::size_t j) const {
  if (partner_[i] != static_cast<int>(j)) return 0;
  return is_position_[i] ? 1 : -1;
}

bool same_space(const SpacePtr& a, const SpacePtr& b) { return a == b || (a && b && *a == *b); }

void require_same_space(const SpacePtr& a, const SpacePtr& b, const char* what) {
  if (!same_space(a, b)) throw SpaceMismatch(std::string(what) + ": operands live on different phase spaces");
}

Monomial Monomial::operator*(const Monomial& o) const {
  Monomial r;
  for (std::size_t i = 0; i < kMaxCoords; ++i) {
    unsigned v = unsigned(e[i]) + o.e[i];
    if (v > 0xffff) throw Error("monomial exponent overflow");
    r.e[i] = static_cast<std::uint16_t>(v);
  }
  r.deg = deg + o.deg;
  return r;
}

std::size_t MonomialHash::operator()(const Monomial& m) const {
  std::uint64_t h = 1469598103934665603ULL;
  for (auto v : m.e) h = (h ^ v) * 1099511628211ULL;
  return static_cast<std::size_t>(h);
}

Symbol::Symbol(SpacePtr space, Coefficient c) : space_(std::move(space)) {
  if (!c.is_zero()) terms_.push_back({Monomial{}, std::move(c)});
}

Symbol Symbol::coordinate(SpacePtr space, std::size_t index) {
  if (index >= space->dim()) throw InputError("coordinate index out of range");
  Monomial m;
  m.e[index] = 1;
  m.deg = 1;
  Symbol s(std::move(space));
  s.terms_.push_back({m, Coefficient(1L)});
  return s;
}

Symbol Symbol::coordinate(SpacePtr space, const std::string& name) {
  auto i = space->index(name);
  return coordinate(std::move(space), i);
}

Symbol Symbol::from_terms(SpacePtr space, std::vector<Term> terms) {
  Symbol s(std::move(space));
  s.terms_ = std::move(terms);
  s.canonicalize();
  return s;
}

void Symbol::canonicalize() {
  std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return precedes(a.mono, b.mono); });
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (auto& t : terms_) {
    if (!out.empty() && out.back().mono == t.mono) {
      out.back().coeff += t.coeff;
    } else {
      out.push_back(std::move(t));
    }
  }
  out.erase(std::remove_if(out.begin(), out.end(), [](const Term& t) { return t.coeff.is_zero(); }), out.end());
  terms_ = std::move(out);
}

bool Symbol::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.deg == 0); }

Coefficient Symbol::constant_term() const {
  if (!terms_.empty() && terms_.back().mono.deg == 0) return terms_.back().coeff;
  return Coefficient{};
}

Coefficient Symbol::constant_value() const {
  if (!is_constant()) throw InputError("symbol depends on phase-space coordinates");
  return constant_term();
}

int Symbol::total_degree() const { return terms_.empty() ? -1 : static_cast<int>(terms_.front().mono.deg); }

int Symbol::degree_in(std::size_t coord) const {
  int d = -1;
  for (const auto& t : terms_) d = std::max(d, static_cast<int>(t.mono.e[coord]));
  return d;
}

bool Symbol::depends_on(std::size_t coord) const {
  for (const auto& t : terms_)
    if (t.mono.e[coord] != 0) return true;
  return false;
}

int Symbol::degree(Variable v) const {
  if (v.kind == Variable::Kind::coordinate) return degree_in(v.index);
  int d = -1;
  for (const auto& t : terms_) {
    if (!t.coeff.contains(v.index)) {
      d = std::max(d, 0);
      continue;
    }
    if (t.coeff.low_degree_in(v.index) < 0)
      throw InputError("parameter '" + ParamNames::name(v.index) + "' occurs with a negative power");
    d = std::max(d, t.coeff.degree_in(v.index));
  }
  return d;
}

bool Symbol::contains(Variable v) const {
  if (v.kind == Variable::Kind::coordinate) return depends_on(v.index);
  for (const auto& t : terms_)
    if (t.coeff.contains(v.index)) return true;
  return false;
}

Symbol Symbol::coefficient_of(Variable v, int power) const {
  std::vector<Term> out;
  if (v.kind == Variable::Kind::coordinate) {
    for (const auto& t : terms_) {
      if (t.mono.e[v.index] != power) continue;
      Term r = t;
      r.mono.e[v.index] = 0;
      r.mono.deg -= power;
      out.push_back(std::move(r));
    }
  } else {
    for (const auto& t : terms_) {
      Coefficient c;
      for (const auto& ct : t.coeff.terms())
        if (ct.mono.exponent(v.index) == power) c += Coefficient(ct.value, ct.mono.without(v.index));
      if (!c.is_zero()) out.push_back({t.mono, std::move(c)});
    }
  }
  return from_terms(space_, std::move(out));
}

Symbol Symbol::substitute(Variable v, const Symbol& value) const {
  require_same_space(space_, value.space_, "substitute");
  int d = degree(v);
  if (d < 0) return *this;
  Symbol result(space_);
  Symbol power(space_, Coefficient(1L));
  for (int k = 0; k <= d; ++k) {
    if (k > 0) power = power * value;
    Symbol c = coefficient_of(v, k);
    if (!c.is_zero()) result += c * power;
  }
  return result;
}

int Symbol::min_hbar_power() const {
  int m = 0;
  bool first = true;
  for (const auto& t : terms_) {
    int v = t.coeff.min_hbar_power();
    m = first ? v : std::min(m, v);
    first = false;
  }
  return m;
}

int Symbol::max_hbar_power() const {
  int m = 0;
  bool first = true;
  for (const auto& t : terms_) {
    int v = t.coeff.max_hbar_power();
    m = first ? v : std::max(m, v);
    first = false;
  }
  return m;
}

Symbol Symbol::hbar_part(int power) const {
  std::vector<Term> out;
  for (const auto& t : terms_) {
    Coefficient c = t.coeff.hbar_part(power);
    if (!c.is_zero()) out.push_back({t.mono, std::move(c)});
  }
  Symbol s(space_);
  s.terms_ = std::move(out);
  return s;
}

Symbol Symbol::with_hbar_sign_flipped() const {
  Symbol s = *this;
  for (auto& t : s.terms_) t.coeff = t.coeff.with_hbar_sign_flipped();
  return s;
}

Symbol Symbol::conj() const {
  Symbol s = *this;
  for (auto& t : s.terms_) t.coeff = t.coeff.conj();
  return s;
}

Symbol Symbol::operator-() const {
  Symbol s = *this;
  for (auto& t : s.terms_) t.coeff = -t.coeff;
  return s;
}

Symbol& Symbol::operator+=(const Symbol& o) {
  require_same_space(space_, o.space_, "add");
  if (o.terms_.empty()) return *this;
  std::vector<Term> out;
  out.reserve(terms_.size() + o.terms_.size());
  auto i = terms_.begin();
  auto j = o.terms_.begin();
  while (i != terms_.end() || j != o.terms_.end()) {
    if (j == o.terms_.end() || (i != terms_.end() && precedes(i->mono, j->mono))) {
      out.push_back(std::move(*i++));
    } else if (i == terms_.end() || precedes(j->mono, i->mono)) {
      out.push_back(*j++);
    } else {
      Coefficient c = i->coeff + j->coeff;
      if (!c.is_zero()) out.push_back({i->mono, std::move(c)});
      ++i;
      ++j;
    }
  }
  terms_ = std::move(out);
  return *this;
}

Symbol& Symbol::operator-=(const Symbol& o) { return *this += -o; }

Symbol operator*(const Symbol& a, const Symbol& b) {
  require_same_space(a.space_, b.space_, "mul");
  Symbol r(a.space_);
  if (a.terms_.empty() || b.terms_.empty()) return r;
  if (a.terms_.size() == 1 || b.terms_.size() == 1) {
    const auto& single = a.terms_.size() == 1 ? a.terms_[0] : b.terms_[0];
    const auto& many = a.terms_.size() == 1 ? b : a;
    r.terms_.reserve(many.terms_.size());
    for (const auto& t : many.terms_) {
      Coefficient c = t.coeff * single.coeff;
      if (!c.is_zero()) r.terms_.push_back({t.mono * single.mono, std::move(c)});
    }
    // Multiplying by one monomial preserves the graded order.
    return r;
  }
  std::unordered_map<Monomial, Coefficient, MonomialHash> acc;
  acc.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& x : a.terms_)
    for (const auto& y : b.terms_) acc[x.mono * y.mono] += x.coeff * y.coeff;
  r.terms_.reserve(acc.size());
  for (auto& [m, c] : acc)
    if (!c.is_zero()) r.terms_.push_back({m, std::move(c)});
  std::sort(r.terms_.begin(), r.terms_.end(), [](const Symbol::Term& p, const Symbol::Term& q) { return precedes(p.mono, q.mono); });
  return r;
}

Symbol operator*(const Symbol& a, const Coefficient& c) {
  Symbol r(a.space_);
  if (c.is_zero()) return r;
  r.terms_.reserve(a.terms_.size());
  for (const auto& t : a.terms_) {
    Coefficient v = t.coeff * c;
    if (!v.is_zero()) r.terms_.push_back({t.mono, std::move(v)});
  }
  return r;
}

bool operator==(const Symbol& a, const Symbol& b) {
  if (!same_space(a.space_, b.space_)) return false;
  if (a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t k = 0; k < a.terms_.size(); ++k)
    if (!(a.terms_[k].mono == b.terms_[k].mono) || a.terms_[k].coeff != b.terms_[k].coeff) return false;
  return true;
}

Symbol Symbol::times_monomial(const Monomial& m) const {
  Symbol r = *this;
  for (auto& t : r.terms_) t.mono = t.mono * m;
  return r;
}

std::complex<double> Symbol::evaluate(const std::vector<double>& coords, const std::map<std::string, double>& params) const {
  if (coords.size() != space_->dim()) throw InputError("evaluate: wrong number of coordinates");
  std::complex<double> sum = 0;
  for (const auto& t : terms_) {
    auto [re, im] = t.coeff.evaluate(params);
    double x = 1;
    for (std::size_t i = 0; i < space_->dim(); ++i)
      if (t.mono.e[i]) x *= std::pow(coords[i], t.mono.e[i]);
    sum += std::complex<double>(re, im) * x;
  }
  return sum;
}

Symbol add(const Symbol& a, const Symbol& b) { return a + b; }
Symbol mul(const Symbol& a, const Symbol& b) { return a * b; }

Symbol pow(const Symbol& a, int n) {
  if (n < 0) throw InputError("negative power of a symbol");
  Symbol r(a.space(), Coefficient(1L)), base = a;
  while (n > 0) {
    if (n & 1) r = r * base;
    n >>= 1;
    if (n) base = base * base;
  }
  return r;
}

Symbol partial(const Symbol& a, const std::string& coord) { return partial(a, a.space()->index(coord)); }

Symbol partial(const Symbol& a, std::size_t coord, int order) {
  if (coord >= a.space()->dim()) throw InputError("partial: coordinate index out of range");
  std::vector<Symbol::Term> out;
  for (const auto& t : a.terms()) {
    int e = t.mono.e[coord];
    if (e < order) continue;
    long f = 1;
    for (int k = 0; k < order; ++k) f *= (e - k);
    Symbol::Term r{t.mono, t.coeff * Coefficient(f)};
    r.mono.e[coord] = static_cast<std::uint16_t>(e - order);
    r.mono.deg -= order;
    out.push_back(std::move(r));
  }
  return Symbol::from_terms(a.space(), std::move(out));
}

Symbol poisson(const Symbol& a, const Symbol& b) {
  require_same_space(a.space(), b.space(), "poisson");
  Symbol r(a.space());
  for (auto [q, p] : a.space()->pairs()) {
    r += partial(a, q) * partial(b, p);
    r -= partial(a, p) * partial(b, q);
  }
  return r;
}

Symbol substitute(const Symbol& a, const std::vector<std::optional<Symbol>>& by_index, const SpacePtr& target) {
  const auto& sp = *a.space();
  std::vector<std::vector<Symbol>> powers(sp.dim());
  for (std::size_t i = 0; i < sp.dim(); ++i) {
    if (i < by_index.size() && by_index[i]) {
      require_same_space(by_index[i]->space(), target, "substitute");
      if (a.depends_on(i)) powers[i].push_back(Symbol(target, Coefficient(1L)));
    } else if (a.depends_on(i)) {
      throw InputError("substitute: coordinate '" + sp.name(i) + "' occurs but is not bound");
    }
  }
  auto power = [&](std::size_t i, int e) -> const Symbol& {
    auto& v = powers[i];
    while (static_cast<int>(v.size()) <= e) v.push_back(v.back() * *by_index[i]);
    return v[e];
  };
  // Horner-style split on the first occurring coordinate keeps the number of full
  // products proportional to the number of distinct exponents.
  std::function<Symbol(const std::vector<const Symbol::Term*>&, std::size_t)> rec =
      [&](const std::vector<const Symbol::Term*>& terms, std::size_t from) -> Symbol {
    std::size_t var = from;
    while (var < sp.dim()) {
      bool any = false;
      for (auto* t : terms)
        if (t->mono.e[var]) {
          any = true;
          break;
        }
      if (any) break;
      ++var;
    }
    if (var == sp.dim()) {
      Coefficient c;
      for (auto* t : terms) c += t->coeff;
      return Symbol(target, c);
    }
    std::map<int, std::vector<const Symbol::Term*>> groups;
    for (auto* t : terms) groups[t->mono.e[var]].push_back(t);
    Symbol out(target);
    for (auto& [e, g] : groups) {
      Symbol inner = rec(g, var + 1);
      out += e == 0 ? inner : inner * power(var, e);
    }
    return out;
  };
  std::vector<const Symbol::Term*> all;
  for (const auto& t : a.terms()) all.push_back(&t);
  if (all.empty()) return Symbol(target);
  return rec(all, 0);
}

Symbol substitute(const Symbol& a, const std::map<std::string, Symbol>& bindings) {
  const auto& sp = *a.space();
  std::vector<std::optional<Symbol>> by_index(sp.dim());
  SpacePtr target;
  for (const auto& [name, s] : bindings) {
    auto i = sp.index(name);
    if (target && !same_space(target, s.space()))
      throw SpaceMismatch("substitute: replacement symbols live on different spaces");
    target = s.space();
    by_index[i] = s;
  }
  if (!target) {
    if (!a.is_constant()) throw InputError("substitute: no bindings given for a non-constant symbol");
    return a;
  }
  return substitute(a, by_index, target);
}

Symbol substitute_param(const Symbol& a, const std::string& name, const Coefficient& value) {
  auto id = ParamNames::intern(name);
  std::vector<Symbol::Term> out;
  for (const auto& t : a.terms()) out.push_back({t.mono, t.coeff.substitute(id, value)});
  return Symbol::from_terms(a.space(), std::move(out));
}

}  // namespace phasestar
