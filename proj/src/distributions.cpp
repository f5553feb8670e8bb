#include "phasestar/distributions.hpp"

#include "phasestar/errors.hpp"
#include "phasestar/moyal.hpp"
#include "phasestar/symbol_io.hpp"

#include <algorithm>
#include <map>

namespace phasestar {

namespace {

using Terms = std::vector<DeltaTerm>;

Coefficient i_over_hbar() {
  return Coefficient(GaussRational(Rational(0), Rational(1)), ParamMonomial::generator(ParamNames::hbar, -1));
}

Rational factorial(int n) {
  Rational f(1);
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// Prefactor of delta^{(k)}(c g) = prefactor * delta^{(k)}(g) for a single-term real c,
// generators counted as positive.
Coefficient delta_scale(const Coefficient& c, int k) {
  if (!c.is_single_term()) throw NotClosed("delta argument scale is not a monomial");
  const auto& t = c.terms()[0];
  if (!t.value.is_real()) throw NotClosed("delta argument with an imaginary scale");
  Rational r = t.value.re;
  Rational v = 1 / abs(r);
  for (int j = 0; j < k; ++j) v /= r;
  return Coefficient(GaussRational(v), ParamMonomial{}) * pow(Coefficient(GaussRational(1), t.mono), -(k + 1));
}

// Rational part of the leading coefficient (used for argument normalization).
Rational leading_rational(const Symbol& s) {
  const auto& c = s.terms().front().coeff.terms().front().value;
  if (!c.is_real()) throw NotClosed("delta argument with an imaginary leading coefficient");
  return c.re;
}

// Coefficient of x when x occurs in g only as the bare monomial x with a single-term
// coordinate-free coefficient.
std::optional<Coefficient> pivot_coefficient(const Symbol& g, std::size_t x) {
  std::optional<Coefficient> c;
  for (const auto& t : g.terms()) {
    if (t.mono.e[x] == 0) continue;
    if (t.mono.e[x] != 1 || t.mono.deg != 1 || !t.coeff.is_single_term() || !t.coeff.terms()[0].value.is_real())
      return std::nullopt;
    c = t.coeff;
  }
  return c;
}

Symbol truncate_caps(const Symbol& s, const std::vector<std::pair<std::uint32_t, int>>& caps) {
  std::vector<Symbol::Term> out;
  for (const auto& t : s.terms()) {
    Coefficient c;
    for (const auto& ct : t.coeff.terms()) {
      bool keep = true;
      for (auto [id, cap] : caps)
        if (ct.mono.exponent(id) > cap) keep = false;
      if (keep) c += Coefficient(ct.value, ct.mono);
    }
    if (!c.is_zero()) out.push_back({t.mono, std::move(c)});
  }
  return Symbol::from_terms(s.space(), std::move(out));
}

std::string delta_key(const DeltaFactor& d) { return to_string(d.arg) + "#" + std::to_string(d.order); }

void sort_deltas(std::vector<DeltaFactor>& ds) {
  std::sort(ds.begin(), ds.end(), [](const DeltaFactor& a, const DeltaFactor& b) { return delta_key(a) < delta_key(b); });
}

void expand_u(const Symbol& F, const std::vector<std::uint32_t>& ids, const std::vector<int>& caps, std::size_t r,
              std::vector<int>& m, std::vector<std::pair<std::vector<int>, Symbol>>& out) {
  if (r == ids.size()) {
    if (!F.is_zero()) out.emplace_back(m, F);
    return;
  }
  for (int e = 0; e <= caps[r]; ++e) {
    Symbol part = F.coefficient_of(Variable{Variable::Kind::parameter, ids[r]}, e);
    if (part.is_zero()) continue;
    m[r] = e;
    expand_u(part, ids, caps, r + 1, m, out);
  }
  m[r] = 0;
}

Terms canonical_term(const SpacePtr& space, DeltaTerm t) {
  if (t.poly.is_zero()) return {};
  std::vector<DeltaFactor> pivotable, opaque;
  for (auto& d : t.deltas) {
    if (d.order < 0) throw InputError("negative delta derivative order");
    if (d.arg.is_zero()) throw NotClosed("delta of an identically vanishing argument");
    if (d.arg.is_constant() && d.arg.constant_value().is_rational()) return {};  // delta of a nonzero number
    Rational r = leading_rational(d.arg);
    if (r != 1) {
      t.poly = t.poly * delta_scale(Coefficient(r), d.order);
      d.arg = d.arg * Coefficient(Rational(1 / r));
    }
    (d.arg.is_constant() ? opaque : pivotable).push_back(std::move(d));
  }
  sort_deltas(pivotable);

  // Triangular pivot choice: repeatedly take a delta with a pivot coordinate that occurs in no
  // other remaining argument; that delta goes last in the elimination order.
  std::vector<std::size_t> remaining(pivotable.size());
  for (std::size_t k = 0; k < remaining.size(); ++k) remaining[k] = k;
  std::vector<std::pair<std::size_t, std::size_t>> order;  // (delta index, pivot coordinate), last-first
  while (!remaining.empty()) {
    bool found = false;
    for (std::size_t ri = 0; ri < remaining.size() && !found; ++ri) {
      const auto& g = pivotable[remaining[ri]].arg;
      for (std::size_t x = 0; x < space->dim() && !found; ++x) {
        if (!g.depends_on(x) || !pivot_coefficient(g, x)) continue;
        bool elsewhere = false;
        for (std::size_t rj = 0; rj < remaining.size(); ++rj)
          if (rj != ri && pivotable[remaining[rj]].arg.depends_on(x)) elsewhere = true;
        if (elsewhere) continue;
        order.emplace_back(remaining[ri], x);
        remaining.erase(remaining.begin() + static_cast<long>(ri));
        found = true;
      }
    }
    if (!found) break;
  }
  std::reverse(order.begin(), order.end());
  for (auto k : remaining) opaque.push_back(pivotable[k]);
  for (std::size_t a = 0; a < opaque.size(); ++a)
    for (std::size_t b = a + 1; b < opaque.size(); ++b)
      if (opaque[a].arg == opaque[b].arg) throw NotClosed("product of deltas with equal arguments: " + to_string(opaque[a].arg));

  std::vector<DeltaFactor> pivoted;
  for (auto [k, x] : order) {
    DeltaFactor d = pivotable[k];
    Coefficient c = *pivot_coefficient(d.arg, x);
    if (!(c == Coefficient(1L))) {
      t.poly = t.poly * delta_scale(c, d.order);
      d.arg = d.arg * c.inverse();
    }
    pivoted.push_back(std::move(d));
  }

  // Solve arg_r = u_r for the pivots, earlier pivots first.
  std::vector<std::uint32_t> uid;
  std::vector<int> caps;
  std::vector<std::pair<std::uint32_t, int>> cap_pairs;
  std::vector<Symbol> sol;
  for (std::size_t r = 0; r < order.size(); ++r) {
    std::size_t x = order[r].second;
    uid.push_back(ParamNames::intern("__u" + std::to_string(r)));
    caps.push_back(pivoted[r].order);
    cap_pairs.emplace_back(uid.back(), pivoted[r].order);
    Symbol rest = pivoted[r].arg - Symbol::coordinate(space, x);
    for (std::size_t s = 0; s < r; ++s) rest = rest.substitute(Variable::coord(order[s].second), sol[s]);
    sol.push_back(Symbol(space, Coefficient(GaussRational(1), ParamMonomial::generator(uid.back()))) - rest);
  }
  Symbol F = t.poly, L = t.phase;
  for (std::size_t r = 0; r < order.size(); ++r) {
    F = F.substitute(Variable::coord(order[r].second), sol[r]);
    L = L.substitute(Variable::coord(order[r].second), sol[r]);
  }
  F = truncate_caps(F, cap_pairs);
  Symbol L0 = L;
  for (auto id : uid) L0 = L0.coefficient_of(Variable{Variable::Kind::parameter, id}, 0);
  Symbol R = L - L0;
  if (!R.is_zero()) {
    int K = 0;
    for (int c : caps) K += c;
    Symbol E(space, Coefficient(1L)), Rp(space, Coefficient(1L));
    Symbol iR = R * i_over_hbar();
    for (int j = 1; j <= K; ++j) {
      Rp = truncate_caps(Rp * iR, cap_pairs);
      E += Rp * Coefficient(Rational(1 / factorial(j)));
    }
    F = truncate_caps(F * E, cap_pairs);
  }

  std::vector<std::pair<std::vector<int>, Symbol>> parts;
  std::vector<int> m(uid.size(), 0);
  expand_u(F, uid, caps, 0, m, parts);
  Terms out;
  for (auto& [ms, Fm] : parts) {
    DeltaTerm nt{Fm, L0, opaque};
    Rational f(1);
    for (std::size_t r = 0; r < ms.size(); ++r) {
      int k = pivoted[r].order, e = ms[r];
      f *= factorial(k) / factorial(k - e);
      if (e % 2) f = -f;
      nt.deltas.push_back({pivoted[r].arg, k - e});
    }
    nt.poly = nt.poly * Coefficient(f);
    sort_deltas(nt.deltas);
    out.push_back(std::move(nt));
  }
  return out;
}

Terms derivative(const SpacePtr& space, const Terms& in, std::size_t x) {
  Terms out;
  for (const auto& t : in) {
    Symbol dp = partial(t.poly, x);
    if (!dp.is_zero()) out.push_back({dp, t.phase, t.deltas});
    Symbol dl = partial(t.phase, x);
    if (!dl.is_zero()) out.push_back({t.poly * dl * i_over_hbar(), t.phase, t.deltas});
    for (std::size_t r = 0; r < t.deltas.size(); ++r) {
      Symbol dg = partial(t.deltas[r].arg, x);
      if (dg.is_zero()) continue;
      DeltaTerm n{t.poly * dg, t.phase, t.deltas};
      n.deltas[r].order += 1;
      out.push_back(std::move(n));
    }
  }
  (void)space;
  return out;
}

Terms multiply(const Terms& a, const Terms& b) {
  Terms out;
  for (const auto& x : a)
    for (const auto& y : b) {
      DeltaTerm t{x.poly * y.poly, x.phase + y.phase, x.deltas};
      t.deltas.insert(t.deltas.end(), y.deltas.begin(), y.deltas.end());
      out.push_back(std::move(t));
    }
  return out;
}

Terms scale(Terms t, const Symbol& p) {
  for (auto& x : t) x.poly = p * x.poly;
  return t;
}

Coefficient series_coefficient(int n, int sign, const Rational& weight, bool flip_odd) {
  Rational v = weight * sign;
  for (int k = 0; k < n; ++k) v /= 2;
  if (flip_odd && n % 2) v = -v;
  GaussRational c;
  switch (n % 4) {
    case 0: c = GaussRational(v); break;
    case 1: c = GaussRational(Rational(0), v); break;
    case 2: c = GaussRational(Rational(-v)); break;
    default: c = GaussRational(Rational(0), Rational(-v)); break;
  }
  return Coefficient(c, ParamMonomial::generator(ParamNames::hbar, n));
}

// sum over (alpha, beta) of (i hbar/2)^n (-1)^{|beta|}/(alpha! beta!) (d_q^a d_p^b p)(d_p^a d_q^b D)
void expand_left(const Symbol& p, const Terms& D, std::size_t pair_index, int order, int sign, const Rational& weight,
                 bool flip_odd, Terms& out) {
  const auto& space = p.space();
  const auto& pairs = space->pairs();
  if (pair_index == pairs.size()) {
    Symbol c = p * series_coefficient(order, sign, weight, flip_odd);
    auto scaled = scale(D, c);
    out.insert(out.end(), scaled.begin(), scaled.end());
    return;
  }
  auto [q, pp] = pairs[pair_index];
  Symbol pa = p;
  Terms Da = D;
  Rational afact(1);
  for (int a = 0;; ++a) {
    if (a > 0) {
      pa = partial(pa, q);
      if (pa.is_zero()) break;
      Da = derivative(space, Da, pp);
      afact *= a;
    }
    Symbol pb = pa;
    Terms Db = Da;
    Rational bfact(1);
    for (int b = 0;; ++b) {
      if (b > 0) {
        pb = partial(pb, pp);
        if (pb.is_zero()) break;
        Db = derivative(space, Db, q);
        bfact *= b;
      }
      if (Db.empty()) break;
      expand_left(pb, Db, pair_index + 1, order + a + b, (b % 2) ? -sign : sign, weight / (afact * bfact), flip_odd, out);
    }
  }
}

// Both sides differentiated; only total order n.
void expand_both(const Terms& A, const Terms& B, const SpacePtr& space, std::size_t pair_index, int remaining, int sign,
                 const Rational& weight, int n, Terms& out) {
  const auto& pairs = space->pairs();
  if (pair_index == pairs.size()) {
    if (remaining != 0) return;
    Symbol c(space, series_coefficient(n, sign, weight, false));
    auto prod = scale(multiply(A, B), c);
    out.insert(out.end(), prod.begin(), prod.end());
    return;
  }
  auto [q, p] = pairs[pair_index];
  Terms Aa = A, Ba = B;
  Rational afact(1);
  for (int a = 0; a <= remaining; ++a) {
    if (a > 0) {
      Aa = derivative(space, Aa, q);
      Ba = derivative(space, Ba, p);
      afact *= a;
    }
    if (Aa.empty() || Ba.empty()) break;
    Terms Ab = Aa, Bb = Ba;
    Rational bfact(1);
    for (int b = 0; a + b <= remaining; ++b) {
      if (b > 0) {
        Ab = derivative(space, Ab, p);
        Bb = derivative(space, Bb, q);
        bfact *= b;
      }
      if (Ab.empty() || Bb.empty()) break;
      expand_both(Ab, Bb, space, pair_index + 1, remaining - a - b, (b % 2) ? -sign : sign, weight / (afact * bfact), n, out);
    }
  }
}

std::vector<bool> dependence(const DeltaSymbol& d) {
  std::vector<bool> dep(d.space()->dim(), false);
  for (std::size_t x = 0; x < dep.size(); ++x) dep[x] = d.depends_on(x);
  return dep;
}

bool coupled(const DeltaSymbol& a, const DeltaSymbol& b) {
  auto da = dependence(a), db = dependence(b);
  for (auto [q, p] : a.space()->pairs())
    if ((da[q] && db[p]) || (da[p] && db[q])) return true;
  return false;
}

// Gradient of L when L is affine with coordinate-free coefficients.
std::optional<std::vector<Symbol>> affine_gradient(const Symbol& L) {
  if (L.total_degree() > 1) return std::nullopt;
  std::vector<Symbol> g;
  for (std::size_t i = 0; i < L.space()->dim(); ++i) g.push_back(partial(L, i));
  return g;
}

// exp((i/hbar) L) as the only content of d (constant polynomial, no deltas).
std::optional<std::pair<Symbol, Symbol>> pure_phase(const DeltaSymbol& d) {
  if (d.terms().size() != 1) return std::nullopt;
  const auto& t = d.terms()[0];
  if (!t.deltas.empty() || !t.poly.is_constant()) return std::nullopt;
  if (!affine_gradient(t.phase)) return std::nullopt;
  return std::make_pair(t.poly, t.phase);
}

DeltaSymbol shift(const DeltaSymbol& d, const std::vector<Symbol>& s) {
  std::vector<std::optional<Symbol>> by(d.space()->dim());
  for (std::size_t j = 0; j < by.size(); ++j) by[j] = Symbol::coordinate(d.space(), j) + s[j];
  return substitute(d, by, d.space());
}

Symbol partial_var(const Symbol& s, Variable v) {
  if (v.kind == Variable::Kind::coordinate) return partial(s, v.index);
  std::vector<Symbol::Term> out;
  for (const auto& t : s.terms()) {
    Coefficient c;
    for (const auto& ct : t.coeff.terms()) {
      int e = ct.mono.exponent(v.index);
      if (e == 0) continue;
      c += Coefficient(ct.value * GaussRational(long(e)), ct.mono * ParamMonomial::generator(v.index, -1));
    }
    if (!c.is_zero()) out.push_back({t.mono, std::move(c)});
  }
  return Symbol::from_terms(s.space(), std::move(out));
}

Terms derivative_var(const Terms& in, Variable v) {
  Terms out;
  for (const auto& t : in) {
    Symbol dp = partial_var(t.poly, v);
    if (!dp.is_zero()) out.push_back({dp, t.phase, t.deltas});
    Symbol dl = partial_var(t.phase, v);
    if (!dl.is_zero()) out.push_back({t.poly * dl * i_over_hbar(), t.phase, t.deltas});
    for (std::size_t r = 0; r < t.deltas.size(); ++r) {
      Symbol dg = partial_var(t.deltas[r].arg, v);
      if (dg.is_zero()) continue;
      DeltaTerm n{t.poly * dg, t.phase, t.deltas};
      n.deltas[r].order += 1;
      out.push_back(std::move(n));
    }
  }
  return out;
}

std::string var_name(const SpacePtr& space, Variable v) {
  return v.kind == Variable::Kind::coordinate ? space->name(v.index) : ParamNames::name(v.index);
}

// Coefficient c of v in g when g = c v + rest with c coordinate-free and single-term.
std::optional<Coefficient> linear_in(const Symbol& g, Variable v) {
  if (v.kind == Variable::Kind::coordinate) return pivot_coefficient(g, v.index);
  if (g.degree(v) != 1) return std::nullopt;
  Symbol c = g.coefficient_of(v, 1);
  if (!c.is_constant()) return std::nullopt;
  Coefficient cv = c.constant_value();
  if (!cv.is_single_term() || !cv.terms()[0].value.is_real()) return std::nullopt;
  return cv;
}

Terms integrate_term(const SpacePtr& space, const DeltaTerm& t, Variable v) {
  const std::string name = var_name(space, v);
  for (std::size_t r = 0; r < t.deltas.size(); ++r) {
    auto c = linear_in(t.deltas[r].arg, v);
    if (!c) continue;
    int k = t.deltas[r].order;
    DeltaTerm rest{t.poly, t.phase, t.deltas};
    rest.deltas.erase(rest.deltas.begin() + static_cast<long>(r));
    Terms F{rest};
    for (int j = 0; j < k; ++j) F = derivative_var(F, v);
    // v -> -(arg - c v)/c
    Symbol vsym = v.kind == Variable::Kind::coordinate
                      ? Symbol::coordinate(space, v.index)
                      : Symbol(space, Coefficient(GaussRational(1), ParamMonomial::generator(v.index)));
    Symbol root = -(t.deltas[r].arg - vsym * *c) * c->inverse();
    // (1/|c|) (-1/c)^k = delta_scale(c, k) * (-1)^k
    Coefficient pref = delta_scale(*c, k) * Coefficient(long(k % 2 ? -1 : 1));
    Terms out;
    for (auto& f : F) {
      DeltaTerm n{f.poly.substitute(v, root) * pref, f.phase.substitute(v, root), {}};
      for (auto& d : f.deltas) n.deltas.push_back({d.arg.substitute(v, root), d.order});
      out.push_back(std::move(n));
    }
    return out;
  }
  for (const auto& d : t.deltas)
    if (d.arg.contains(v)) throw InputError("cannot integrate over '" + name + "': it enters a delta argument non-linearly");
  int ldeg = t.phase.degree(v);
  if (ldeg > 1) throw InputError("cannot integrate over '" + name + "': the phase is not linear in it");
  if (ldeg < 1)
    throw InputError("cannot integrate over '" + name + "': it appears in a non-integrable position (no delta or phase)");
  Symbol beta = t.phase.coefficient_of(v, 1);
  Symbol L0 = t.phase.coefficient_of(v, 0);
  int pdeg = t.poly.degree(v);
  Terms out;
  // 2 pi hbar (-i hbar)^m
  Coefficient two_pi_hbar = Coefficient(2L) * Coefficient::param("pi") * Coefficient::hbar();
  Coefficient minus_i_hbar = Coefficient(GaussRational(Rational(0), Rational(-1)), ParamMonomial::generator(ParamNames::hbar));
  for (int m = 0; m <= std::max(pdeg, 0); ++m) {
    Symbol Pm = t.poly.coefficient_of(v, m);
    if (Pm.is_zero()) continue;
    DeltaTerm n{Pm * (two_pi_hbar * pow(minus_i_hbar, m)), L0, t.deltas};
    n.deltas.push_back({beta, m});
    out.push_back(std::move(n));
  }
  return out;
}

}  // namespace

std::vector<DeltaTerm> canonicalize_terms(const SpacePtr& space, std::vector<DeltaTerm> terms) {
  std::map<std::string, DeltaTerm> merged;
  for (auto& t : terms) {
    require_same_space(t.poly.space(), space, "delta term");
    for (auto& c : canonical_term(space, std::move(t))) {
      std::string key = to_string(c.phase);
      for (const auto& d : c.deltas) key += "|" + delta_key(d);
      auto it = merged.find(key);
      if (it == merged.end()) {
        merged.emplace(std::move(key), std::move(c));
      } else {
        it->second.poly += c.poly;
      }
    }
  }
  std::vector<DeltaTerm> out;
  for (auto& [k, t] : merged)
    if (!t.poly.is_zero()) out.push_back(std::move(t));
  return out;
}

DeltaSymbol::DeltaSymbol(const Symbol& poly) : space_(poly.space()) {
  if (!poly.is_zero()) terms_.push_back({poly, Symbol(space_), {}});
}

DeltaSymbol DeltaSymbol::delta(const Symbol& arg, int order) {
  return from_terms(arg.space(), {{Symbol(arg.space(), Coefficient(1L)), Symbol(arg.space()), {{arg, order}}}});
}

DeltaSymbol DeltaSymbol::phase(const Symbol& linear_form) {
  return from_terms(linear_form.space(), {{Symbol(linear_form.space(), Coefficient(1L)), linear_form, {}}});
}

DeltaSymbol DeltaSymbol::from_terms(SpacePtr space, std::vector<DeltaTerm> terms) {
  DeltaSymbol d(space);
  d.terms_ = canonicalize_terms(space, std::move(terms));
  return d;
}

bool DeltaSymbol::is_polynomial() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].deltas.empty() && terms_[0].phase.is_zero());
}

Symbol DeltaSymbol::as_polynomial() const {
  if (!is_polynomial()) throw NotClosed("distribution is not a polynomial");
  return terms_.empty() ? Symbol(space_) : terms_[0].poly;
}

int DeltaSymbol::min_hbar_power() const {
  int m = 0;
  bool first = true;
  for (const auto& t : terms_) {
    int v = t.poly.min_hbar_power();
    m = first ? v : std::min(m, v);
    first = false;
  }
  return m;
}

bool DeltaSymbol::depends_on(std::size_t coord) const {
  for (const auto& t : terms_) {
    if (t.poly.depends_on(coord) || t.phase.depends_on(coord)) return true;
    for (const auto& d : t.deltas)
      if (d.arg.depends_on(coord)) return true;
  }
  return false;
}

DeltaSymbol DeltaSymbol::operator-() const {
  DeltaSymbol r = *this;
  for (auto& t : r.terms_) t.poly = -t.poly;
  return r;
}

DeltaSymbol operator+(const DeltaSymbol& a, const DeltaSymbol& b) {
  require_same_space(a.space_, b.space_, "delta add");
  auto t = a.terms_;
  t.insert(t.end(), b.terms_.begin(), b.terms_.end());
  return DeltaSymbol::from_terms(a.space_, std::move(t));
}

DeltaSymbol operator*(const DeltaSymbol& a, const DeltaSymbol& b) {
  require_same_space(a.space_, b.space_, "delta product");
  return DeltaSymbol::from_terms(a.space_, multiply(a.terms_, b.terms_));
}

DeltaSymbol operator*(const Symbol& p, const DeltaSymbol& d) {
  require_same_space(p.space(), d.space_, "delta product");
  return DeltaSymbol::from_terms(d.space_, scale(d.terms_, p));
}

bool operator==(const DeltaSymbol& a, const DeltaSymbol& b) { return same_space(a.space_, b.space_) && a.terms_ == b.terms_; }

std::string to_string(const DeltaSymbol& d) {
  if (d.terms().empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : d.terms()) {
    std::string poly = to_string(t.poly);
    bool single = t.poly.terms().size() == 1 && t.poly.terms()[0].coeff.terms().size() == 1 &&
                  (t.poly.terms()[0].coeff.terms()[0].value.is_real() || sgn(t.poly.terms()[0].coeff.terms()[0].value.re) == 0);
    bool neg = single && poly[0] == '-';
    if (neg) poly = poly.substr(1);
    if (!single) poly = "(" + poly + ")";
    std::vector<std::string> factors;
    if (poly != "1") factors.push_back(poly);
    if (!t.phase.is_zero()) factors.push_back("exp((i/hbar)*(" + to_string(t.phase) + "))");
    for (const auto& dl : t.deltas)
      factors.push_back((dl.order == 0 ? std::string("delta") : "delta^" + std::to_string(dl.order)) + "(" + to_string(dl.arg) + ")");
    if (factors.empty()) factors.push_back("1");
    std::string body;
    for (std::size_t k = 0; k < factors.size(); ++k) body += (k ? " * " : "") + factors[k];
    if (first) {
      out += neg ? "-" + body : body;
    } else {
      out += neg ? " - " : " + ";
      out += body;
    }
    first = false;
  }
  return out;
}

DeltaSymbol partial(const DeltaSymbol& d, std::size_t coord, int order) {
  Terms t = d.terms();
  for (int k = 0; k < order; ++k) t = derivative(d.space(), t, coord);
  return DeltaSymbol::from_terms(d.space(), std::move(t));
}

DeltaSymbol partial(const DeltaSymbol& d, const std::string& coord) { return partial(d, d.space()->index(coord)); }

DeltaSymbol substitute(const DeltaSymbol& d, const std::vector<std::optional<Symbol>>& by_index, const SpacePtr& target) {
  Terms out;
  for (const auto& t : d.terms()) {
    DeltaTerm n{substitute(t.poly, by_index, target), substitute(t.phase, by_index, target), {}};
    for (const auto& dl : t.deltas) n.deltas.push_back({substitute(dl.arg, by_index, target), dl.order});
    out.push_back(std::move(n));
  }
  return DeltaSymbol::from_terms(target, std::move(out));
}

DeltaSymbol substitute_param(const DeltaSymbol& d, Variable param, const Symbol& value) {
  Terms out;
  for (const auto& t : d.terms()) {
    DeltaTerm n{t.poly.substitute(param, value), t.phase.substitute(param, value), {}};
    for (const auto& dl : t.deltas) n.deltas.push_back({dl.arg.substitute(param, value), dl.order});
    out.push_back(std::move(n));
  }
  return DeltaSymbol::from_terms(d.space(), std::move(out));
}

DeltaSymbol to_target(const DeltaSymbol& d, const Diffeomorphism& map) {
  require_same_space(d.space(), map.source(), "to_target");
  return substitute(d, {map.inverse().begin(), map.inverse().end()}, map.target());
}

DeltaSymbol to_source(const DeltaSymbol& d, const Diffeomorphism& map) {
  require_same_space(d.space(), map.target(), "to_source");
  return substitute(d, {map.forward().begin(), map.forward().end()}, map.source());
}

DeltaSymbol star_poly_left(const Symbol& p, const DeltaSymbol& d) {
  require_same_space(p.space(), d.space(), "star_poly_left");
  Terms out;
  if (!p.is_zero() && !d.is_zero()) expand_left(p, d.terms(), 0, 0, 1, Rational(1), false, out);
  return DeltaSymbol::from_terms(d.space(), std::move(out));
}

DeltaSymbol star_poly_right(const DeltaSymbol& d, const Symbol& p) {
  require_same_space(p.space(), d.space(), "star_poly_right");
  Terms out;
  if (!p.is_zero() && !d.is_zero()) expand_left(p, d.terms(), 0, 0, 1, Rational(1), true, out);
  return DeltaSymbol::from_terms(d.space(), std::move(out));
}

DeltaSymbol star_term(const DeltaSymbol& a, const DeltaSymbol& b, int n) {
  require_same_space(a.space(), b.space(), "star_term");
  Terms out;
  expand_both(a.terms(), b.terms(), a.space(), 0, n, 1, Rational(1), n, out);
  return DeltaSymbol::from_terms(a.space(), std::move(out));
}

DeltaSymbol star(const DeltaSymbol& a, const DeltaSymbol& b) {
  require_same_space(a.space(), b.space(), "star");
  if (a.is_zero() || b.is_zero()) return DeltaSymbol(a.space());
  if (a.is_polynomial() && b.is_polynomial()) return DeltaSymbol(phasestar::star(a.as_polynomial(), b.as_polynomial()));
  if (a.is_polynomial()) return star_poly_left(a.as_polynomial(), b);
  if (b.is_polynomial()) return star_poly_right(a, b.as_polynomial());
  if (!coupled(a, b)) return a * b;
  const auto& sp = *a.space();
  if (auto ph = pure_phase(a)) {
    // e^{(i/hbar) L} * D = e^{(i/hbar) L} D(x + s),  s_j = -1/2 sum_i dL/dx_i J^{ij}
    auto grad = *affine_gradient(ph->second);
    std::vector<Symbol> s;
    for (std::size_t j = 0; j < sp.dim(); ++j) {
      Symbol v(a.space());
      for (std::size_t i = 0; i < sp.dim(); ++i)
        if (sp.J(i, j)) v += grad[i] * Coefficient(Rational(-sp.J(i, j), 2));
      s.push_back(v);
    }
    return a * shift(b, s);
  }
  if (auto ph = pure_phase(b)) {
    // D * e^{(i/hbar) L} = D(x + s') e^{(i/hbar) L},  s'_i = -1/2 sum_j J^{ij} dL/dx_j
    auto grad = *affine_gradient(ph->second);
    std::vector<Symbol> s;
    for (std::size_t i = 0; i < sp.dim(); ++i) {
      Symbol v(a.space());
      for (std::size_t j = 0; j < sp.dim(); ++j)
        if (sp.J(i, j)) v += grad[j] * Coefficient(Rational(-sp.J(i, j), 2));
      s.push_back(v);
    }
    return shift(a, s) * b;
  }
  throw NotClosed("star product of these distributions does not close in the delta calculus");
}

DeltaSymbol exp_shift_star_delta(const std::vector<Symbol>& beta, const std::vector<Symbol>& B_forms,
                                 const std::vector<Symbol>& A_forms, const std::vector<Symbol>& b, int check_order) {
  if (beta.size() != B_forms.size() || A_forms.size() != b.size() || A_forms.empty())
    throw InputError("exp_shift_star_delta: inconsistent lengths");
  const auto& space = A_forms[0].space();
  Symbol L(space);
  for (std::size_t j = 0; j < beta.size(); ++j) {
    if (!beta[j].is_constant()) throw InputError("exp_shift_star_delta: beta must be coordinate-free");
    L += beta[j] * B_forms[j];
  }
  DeltaSymbol E = DeltaSymbol::phase(L);
  DeltaSymbol D(Symbol(space, Coefficient(1L)));
  for (std::size_t j = 0; j < A_forms.size(); ++j) D = D * DeltaSymbol::delta(A_forms[j] - b[j]);
  auto grad = affine_gradient(L);
  if (!grad) throw NotClosed("exp_shift_star_delta: phase is not affine in the coordinates");
  const auto& sp = *space;
  std::vector<Symbol> s;
  for (std::size_t j = 0; j < sp.dim(); ++j) {
    Symbol v(space);
    for (std::size_t i = 0; i < sp.dim(); ++i)
      if (sp.J(i, j)) v += (*grad)[i] * Coefficient(Rational(-sp.J(i, j), 2));
    s.push_back(v);
  }
  // Order-n term of the series against the Taylor term (1/n!)(s.grad)^n D.
  DeltaSymbol taylor = D;
  for (int n = 0; n <= check_order; ++n) {
    if (n > 0) {
      DeltaSymbol next(space);
      for (std::size_t j = 0; j < sp.dim(); ++j)
        if (!s[j].is_zero()) next = next + s[j] * partial(taylor, j);
      taylor = Symbol(space, Coefficient(Rational(1, n))) * next;
    }
    DeltaSymbol term = star_term(E, D, n);
    if (term.min_hbar_power() < 0)
      throw NotClosed("exp_shift_star_delta: order " + std::to_string(n) + " leaves hbar^" +
                      std::to_string(term.min_hbar_power()) + " (forms are not conjugate)");
    if (term != E * taylor)
      throw NotClosed("exp_shift_star_delta: order " + std::to_string(n) + " term differs from the shifted delta");
  }
  DeltaSymbol out = E * shift(D, s);
  if (out.min_hbar_power() < 0) throw NotClosed("exp_shift_star_delta: negative hbar power in the result");
  return out;
}

std::vector<Symbol> label_symbols(const ExtendedSystem& sys, const std::string& prefix, const SpacePtr& space) {
  std::vector<Symbol> out;
  for (std::size_t j = 0; j < sys.dof(); ++j) {
    std::string name = sys.history_A_name(j);
    out.push_back(Symbol(space, Coefficient::param(prefix + name.substr(1))));
  }
  return out;
}

DeltaSymbol build_stargenfunction(const ExtendedSystem& sys, const std::vector<Symbol>& a, const std::vector<Symbol>& b,
                                  Representation rep) {
  if (a.size() != sys.dof() || b.size() != sys.dof()) throw InputError("build_stargenfunction: one label per degree of freedom");
  const auto& H = sys.history_space;
  auto lift = [&](const Symbol& s) {
    if (!s.is_constant()) throw InputError("labels must be coordinate-free");
    return Symbol(H, s.constant_value());
  };
  DeltaSymbol chain(Symbol(H, Coefficient(1L)));
  for (std::size_t j = 0; j < sys.dof(); ++j) {
    Symbol Bj = Symbol::coordinate(H, sys.history_B_name(j));
    Symbol Aj = Symbol::coordinate(H, sys.history_A_name(j));
    chain = star(chain, exp_shift_star_delta({lift(b[j]) - lift(a[j])}, {Bj}, {Aj}, {lift(b[j])}));
  }
  DeltaSymbol rho = star(DeltaSymbol::delta(Symbol::coordinate(H, "phi")), chain);
  if (rep == Representation::history) return rho;
  if (!sys.T) throw InputError("causal representation requires the classical-history map");
  return to_target(rho, *sys.T);
}

StargenResidual verify_stargen(const DeltaSymbol& rho, const Symbol& op, const Symbol& left_value,
                               const Symbol& right_value) {
  DeltaSymbol l = star_poly_left(op, rho) - left_value * rho;
  DeltaSymbol r = star_poly_right(rho, op) - right_value * rho;
  return {l, r, l.min_hbar_power() >= 0 && r.min_hbar_power() >= 0};
}

DeltaSymbol marginalize_degeneracy(const DeltaSymbol& rho, const std::vector<Variable>& vars) {
  DeltaSymbol cur = rho;
  for (auto v : vars) {
    Terms out;
    for (const auto& t : cur.terms()) {
      auto part = integrate_term(cur.space(), t, v);
      out.insert(out.end(), part.begin(), part.end());
    }
    cur = DeltaSymbol::from_terms(cur.space(), std::move(out));
  }
  return cur;
}

DeltaSymbol observable_stargenfunction(const ExtendedSystem& sys, const std::string& z, const Symbol& z0,
                                       Representation rep, int max_n) {
  Symbol zh = history_observable(sys, Symbol::coordinate(sys.base_space, z));
  auto report = star_exp_classical_report(zh, max_n);
  if (!report.classical)
    throw NotClosed("star exponential of " + z + "(t,A,B) is not classical: star power " +
                    std::to_string(report.first_failure) + " differs from the ordinary power by " + to_string(*report.remainder));
  if (!z0.is_constant()) throw InputError("observable value must be coordinate-free");
  DeltaSymbol g = DeltaSymbol::delta(zh - Symbol(sys.history_space, z0.constant_value()));
  if (rep == Representation::history) return g;
  if (!sys.T) throw InputError("causal representation requires the classical-history map");
  return to_target(g, *sys.T);
}

StarChain schrodinger_stargenfunction(const ExtendedSystem& sys, const std::vector<Symbol>& a, const std::vector<Symbol>& b) {
  if (!sys.histories) throw InputError("system has no quantum histories");
  const auto& E = sys.extended_space;
  StarChain c;
  c.factors.push_back({StarChain::Factor::Kind::star_delta, sys.constraint});
  for (std::size_t j = 0; j < sys.dof(); ++j)
    c.factors.push_back({StarChain::Factor::Kind::star_exp,
                         (Symbol(E, b[j].constant_value()) - Symbol(E, a[j].constant_value())) * sys.histories->B[j]});
  for (std::size_t j = 0; j < sys.dof(); ++j)
    c.factors.push_back({StarChain::Factor::Kind::star_delta, sys.histories->A[j] - Symbol(E, b[j].constant_value())});
  return c;
}

std::string to_string(const StarChain& c) {
  std::string out;
  for (std::size_t k = 0; k < c.factors.size(); ++k) {
    const auto& f = c.factors[k];
    out += k ? " *' " : "";
    out += f.kind == StarChain::Factor::Kind::star_delta ? "delta_*(" + to_string(f.argument) + ")"
                                                         : "exp_*((i/hbar)*(" + to_string(f.argument) + "))";
  }
  return out;
}

}  // namespace phasestar
