#include "phasestar/moyal.hpp"

#include "phasestar/errors.hpp"

#include <algorithm>

namespace phasestar {

namespace {

// Sum over multi-indices (alpha, beta), one pair at a time:
//   (i hbar/2)^{|a|+|b|} (-1)^{|b|} / (a! b!) (d_q^a d_p^b f)(d_p^a d_q^b g)
// `accept` filters the total order n.
template <class Accept>
void expand(const Symbol& f, const Symbol& g, std::size_t pair_index, int order, int sign, Rational weight,
            int max_order, const Accept& accept, Symbol& out) {
  const auto& pairs = f.space()->pairs();
  if (pair_index == pairs.size()) {
    if (!accept(order)) return;
    // (i/2)^order * sign * weight * hbar^order
    Rational half_pow(1);
    for (int k = 0; k < order; ++k) half_pow /= 2;
    Rational v = half_pow * weight * sign;
    GaussRational c;
    switch (order % 4) {
      case 0: c = GaussRational(v); break;
      case 1: c = GaussRational(Rational(0), v); break;
      case 2: c = GaussRational(Rational(-v)); break;
      default: c = GaussRational(Rational(0), Rational(-v)); break;
    }
    Coefficient coeff(c, ParamMonomial::generator(ParamNames::hbar, order));
    out += (f * g) * coeff;
    return;
  }
  auto [q, p] = pairs[pair_index];
  int amax = std::min(f.degree_in(q), g.degree_in(p));
  int bmax = std::min(f.degree_in(p), g.degree_in(q));
  Rational afact(1);
  Symbol fa = f, ga = g;
  for (int a = 0; a <= std::max(amax, 0); ++a) {
    if (a > 0) {
      fa = partial(fa, q);
      ga = partial(ga, p);
      afact *= a;
      if (fa.is_zero() || ga.is_zero()) break;
    }
    Rational bfact(1);
    Symbol fb = fa, gb = ga;
    for (int b = 0; b <= std::max(bmax, 0); ++b) {
      if (b > 0) {
        fb = partial(fb, p);
        gb = partial(gb, q);
        bfact *= b;
        if (fb.is_zero() || gb.is_zero()) break;
      }
      int n = order + a + b;
      if (max_order >= 0 && n > max_order) break;
      expand(fb, gb, pair_index + 1, n, (b % 2) ? -sign : sign, weight / (afact * bfact), max_order, accept, out);
    }
  }
}

}  // namespace

Symbol star(const Symbol& a, const Symbol& b, int max_order) {
  require_same_space(a.space(), b.space(), "star");
  Symbol out(a.space());
  if (a.is_zero() || b.is_zero()) return out;
  expand(a, b, 0, 0, 1, Rational(1), max_order, [](int) { return true; }, out);
  return out;
}

Symbol star_term(const Symbol& a, const Symbol& b, int n) {
  require_same_space(a.space(), b.space(), "star");
  Symbol out(a.space());
  if (a.is_zero() || b.is_zero()) return out;
  expand(a, b, 0, 0, 1, Rational(1), n, [n](int k) { return k == n; }, out);
  return out;
}

Symbol moyal_bracket(const Symbol& a, const Symbol& b) {
  require_same_space(a.space(), b.space(), "moyal_bracket");
  Symbol odd(a.space());
  if (a.is_zero() || b.is_zero()) return odd;
  expand(a, b, 0, 0, 1, Rational(1), -1, [](int k) { return k % 2 == 1; }, odd);
  // 2/(i hbar) = -2 i / hbar
  return odd * Coefficient(GaussRational(Rational(0), Rational(-2)), ParamMonomial::generator(ParamNames::hbar, -1));
}

Symbol star_power(const Symbol& a, int n) {
  if (n < 0) throw InputError("star_power: negative exponent");
  Symbol r(a.space(), Coefficient(1L));
  for (int k = 0; k < n; ++k) r = star(r, a);
  return r;
}

ClassicalityReport star_exp_classical_report(const Symbol& a, int max_n) {
  if (max_n < 2) throw InputError("star_exp_classical_check: max_n must be at least 2");
  ClassicalityReport rep;
  Symbol sp = a, mp = a;
  for (int n = 2; n <= max_n; ++n) {
    sp = star(sp, a);
    mp = mp * a;
    if (sp != mp) {
      rep.classical = false;
      rep.first_failure = n;
      rep.remainder = sp - mp;
      return rep;
    }
  }
  return rep;
}

bool star_exp_classical_check(const Symbol& a, int max_n) { return star_exp_classical_report(a, max_n).classical; }

std::vector<Symbol> star_exp_series(const Symbol& a, int k_order) {
  if (k_order < 0) throw InputError("star_exp_series: negative order");
  std::vector<Symbol> out{Symbol(a.space(), Coefficient(1L))};
  for (int n = 1; n <= k_order; ++n) out.push_back(star(out.back(), a));
  return out;
}

}  // namespace phasestar
