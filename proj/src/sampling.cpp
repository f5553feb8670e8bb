#include "phasestar/sampling.hpp"

#include <map>

namespace phasestar {

namespace {

Rational small_rational(std::mt19937_64& rng, bool nonzero) {
  std::uniform_int_distribution<int> num(-5, 5), den(1, 4);
  int p = num(rng);
  while (nonzero && p == 0) p = num(rng);
  Rational r(p, den(rng));
  r.canonicalize();
  return r;
}

}  // namespace

Symbol random_polynomial(const SpacePtr& space, int max_degree, int terms, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> coord(0, space->dim() - 1);
  std::uniform_int_distribution<int> deg(0, max_degree);
  Symbol s(space);
  for (int t = 0; t < terms; ++t) {
    Symbol m(space, Coefficient(small_rational(rng, true)));
    int d = deg(rng);
    for (int k = 0; k < d; ++k) m = m * Symbol::coordinate(space, coord(rng));
    s += m;
  }
  return s;
}

Diffeomorphism random_affine_canonical(const SpacePtr& space, int steps, std::mt19937_64& rng) {
  const auto& pairs = space->pairs();
  std::vector<Symbol> fwd, inv;  // target coords over source; source coords over target
  for (std::size_t i = 0; i < space->dim(); ++i) {
    fwd.push_back(Symbol::coordinate(space, i));
    inv.push_back(Symbol::coordinate(space, i));
  }
  auto x = [&](std::size_t i) { return Symbol::coordinate(space, i); };
  std::uniform_int_distribution<std::size_t> pick(0, pairs.size() - 1);
  std::uniform_int_distribution<int> kind(0, pairs.size() > 1 ? 3 : 2);
  for (int s = 0; s < steps; ++s) {
    // new = E(old), old = E^{-1}(new), each as a full coordinate list
    std::vector<Symbol> E, Einv;
    for (std::size_t i = 0; i < space->dim(); ++i) {
      E.push_back(x(i));
      Einv.push_back(x(i));
    }
    Coefficient c(small_rational(rng, true));
    auto [q, p] = pairs[pick(rng)];
    switch (kind(rng)) {
      case 0:  // Q = q + c p
        E[q] = x(q) + x(p) * c;
        Einv[q] = x(q) - x(p) * c;
        break;
      case 1:  // P = p + c q
        E[p] = x(p) + x(q) * c;
        Einv[p] = x(p) - x(q) * c;
        break;
      case 2:  // translation
        E[q] = x(q) + Symbol(space, c);
        Einv[q] = x(q) - Symbol(space, c);
        break;
      default: {  // Q1 = q1 + c q2, P2 = p2 - c p1
        auto [q2, p2] = pairs[pick(rng)];
        if (q2 == q) break;
        E[q] = x(q) + x(q2) * c;
        E[p2] = x(p2) - x(p) * c;
        Einv[q] = x(q) - x(q2) * c;
        Einv[p2] = x(p2) + x(p) * c;
      }
    }
    std::vector<std::optional<Symbol>> by_fwd(fwd.begin(), fwd.end()), by_einv(Einv.begin(), Einv.end());
    std::vector<Symbol> nf, ni;
    for (const auto& e : E) nf.push_back(substitute(e, by_fwd, space));
    for (const auto& g : inv) ni.push_back(substitute(g, by_einv, space));
    fwd = std::move(nf);
    inv = std::move(ni);
  }
  std::map<std::string, Symbol> F, I;
  for (std::size_t i = 0; i < space->dim(); ++i) {
    F.emplace(space->name(i), fwd[i]);
    I.emplace(space->name(i), inv[i]);
  }
  return Diffeomorphism(space, space, F, I);
}

}  // namespace phasestar
