#include "phasestar/parametrized.hpp"

#include "phasestar/errors.hpp"
#include "phasestar/moyal.hpp"
#include "phasestar/symbol_io.hpp"

#include <functional>

namespace phasestar {

namespace {

std::string suffix_of(const std::string& position) {
  if (!position.empty() && position[0] == 'q') return position.substr(1);
  return "_" + position;
}

Symbol bracket(const Symbol& a, const Symbol& b, BracketKind kind) {
  return kind == BracketKind::moyal ? moyal_bracket(a, b) : poisson(a, b);
}

Rational factorial(int n) {
  Rational f(1);
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// sum_n s^n/n! c_n with the c_n lifted by `lift` and s a coordinate symbol of the target.
Symbol resum(const std::vector<Symbol>& iterates, const Symbol& s, const std::function<Symbol(const Symbol&)>& lift) {
  Symbol out(s.space());
  Symbol power(s.space(), Coefficient(1L));
  for (std::size_t n = 0; n < iterates.size(); ++n) {
    if (n > 0) power = power * s;
    out += lift(iterates[n]) * power * Coefficient(Rational(1 / factorial(static_cast<int>(n))));
  }
  return out;
}

Histories histories_with(const ExtendedSystem& sys, BracketKind kind, int max_order) {
  Histories h;
  const auto& ext = sys.extended_space;
  Symbol minus_t = -Symbol::coordinate(ext, "t");
  auto lift = [&](const Symbol& s) { return sys.to_extended(s); };
  for (std::size_t j = 0; j < sys.dof(); ++j) {
    auto [q, p] = sys.base_space->pairs()[j];
    h.A.push_back(resum(flow_series(sys.H0, Symbol::coordinate(sys.base_space, q), kind, max_order), minus_t, lift));
    h.B.push_back(resum(flow_series(sys.H0, Symbol::coordinate(sys.base_space, p), kind, max_order), minus_t, lift));
  }
  return h;
}

}  // namespace

Symbol ExtendedSystem::to_extended(const Symbol& base) const {
  std::map<std::string, Symbol> b;
  for (const auto& name : base_space->coords()) b.emplace(name, Symbol::coordinate(extended_space, name));
  return substitute(base, b);
}

Symbol ExtendedSystem::to_history(const Symbol& base) const {
  std::map<std::string, Symbol> b;
  for (std::size_t j = 0; j < dof(); ++j) {
    b.emplace(position_name(j), Symbol::coordinate(history_space, history_A_name(j)));
    b.emplace(momentum_name(j), Symbol::coordinate(history_space, history_B_name(j)));
  }
  return substitute(base, b);
}

const std::string& ExtendedSystem::position_name(std::size_t j) const {
  return base_space->name(base_space->pairs().at(j).first);
}
const std::string& ExtendedSystem::momentum_name(std::size_t j) const {
  return base_space->name(base_space->pairs().at(j).second);
}
std::string ExtendedSystem::history_A_name(std::size_t j) const { return "A" + suffix_of(position_name(j)); }
std::string ExtendedSystem::history_B_name(std::size_t j) const { return "B" + suffix_of(position_name(j)); }

ExtendedSystem parametrize(const Symbol& H0) {
  const auto& base = H0.space();
  for (const char* reserved : {"t", "P_t", "phi"})
    if (base->find(reserved)) throw InputError(std::string("H0 must not depend on the reserved coordinate '") + reserved + "'");
  ExtendedSystem sys{.base_space = base, .extended_space = nullptr, .history_space = nullptr, .H0 = H0, .constraint = Symbol(base)};
  const auto n = base->dof();
  std::vector<std::string> ext{"P_t"}, hist{"phi"};
  for (std::size_t j = 0; j < n; ++j) {
    ext.push_back(base->name(base->pairs()[j].second));
    hist.push_back("B" + suffix_of(base->name(base->pairs()[j].first)));
  }
  ext.push_back("t");
  hist.push_back("t");
  for (std::size_t j = 0; j < n; ++j) {
    ext.push_back(base->name(base->pairs()[j].first));
    hist.push_back("A" + suffix_of(base->name(base->pairs()[j].first)));
  }
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t j = 0; j <= n; ++j) pairs.emplace_back(static_cast<int>(n + 1 + j), static_cast<int>(j));
  sys.extended_space = PhaseSpace::make(ext, pairs);
  sys.history_space = PhaseSpace::make(hist, pairs);
  sys.constraint = Symbol::coordinate(sys.extended_space, "P_t") + sys.to_extended(H0);
  return sys;
}

std::vector<Symbol> flow_series(const Symbol& H0, const Symbol& x, BracketKind kind, int max_order) {
  if (max_order < 1) throw InputError("max_order must be at least 1");
  std::vector<Symbol> it{x};
  for (int n = 1;; ++n) {
    Symbol next = bracket(it.back(), H0, kind);
    if (next.is_zero()) return it;
    if (n >= max_order)
      throw NonTerminatingFlow("history series for " + to_string(x) + " does not terminate within order " +
                                   std::to_string(max_order) + " (last iterate has degree " +
                                   std::to_string(next.total_degree()) + ")",
                               max_order);
    it.push_back(std::move(next));
  }
}

std::vector<Symbol> flow_coefficients(const Symbol& H0, const Symbol& x, BracketKind kind, int order) {
  std::vector<Symbol> it{x};
  for (int n = 1; n <= order; ++n) it.push_back(bracket(it.back(), H0, kind));
  return it;
}

Histories quantum_histories(const ExtendedSystem& sys, int max_order) {
  return histories_with(sys, BracketKind::moyal, max_order);
}

Histories classical_histories(const ExtendedSystem& sys, int max_order) {
  return histories_with(sys, BracketKind::poisson, max_order);
}

Diffeomorphism causal_map(const ExtendedSystem& sys, int max_order) {
  const auto& ext = sys.extended_space;
  const auto& hist = sys.history_space;
  Histories cl = sys.classical_histories ? *sys.classical_histories : classical_histories(sys, max_order);
  Symbol t_hist = Symbol::coordinate(hist, "t");
  auto lift = [&](const Symbol& s) { return sys.to_history(s); };

  std::map<std::string, Symbol> forward, inverse;
  forward.emplace("t", t_hist);
  forward.emplace("P_t", Symbol::coordinate(hist, "phi") - sys.to_history(sys.H0));
  inverse.emplace("t", Symbol::coordinate(ext, "t"));
  inverse.emplace("phi", sys.constraint);
  for (std::size_t j = 0; j < sys.dof(); ++j) {
    auto [q, p] = sys.base_space->pairs()[j];
    forward.emplace(sys.position_name(j),
                    resum(flow_series(sys.H0, Symbol::coordinate(sys.base_space, q), BracketKind::poisson, max_order), t_hist, lift));
    forward.emplace(sys.momentum_name(j),
                    resum(flow_series(sys.H0, Symbol::coordinate(sys.base_space, p), BracketKind::poisson, max_order), t_hist, lift));
    inverse.emplace(sys.history_A_name(j), cl.A[j]);
    inverse.emplace(sys.history_B_name(j), cl.B[j]);
  }
  return Diffeomorphism(hist, ext, forward, inverse);
}

ExtendedSystem with_histories(ExtendedSystem sys, int max_order) {
  sys.histories = quantum_histories(sys, max_order);
  sys.classical_histories = classical_histories(sys, max_order);
  sys.classical_equals_quantum = *sys.histories == *sys.classical_histories;
  sys.T = causal_map(sys, max_order);
  return sys;
}

Symbol history_observable(const ExtendedSystem& sys, const Symbol& base_observable, int max_order) {
  require_same_space(base_observable.space(), sys.base_space, "history_observable");
  auto lift = [&](const Symbol& s) { return sys.to_history(s); };
  return resum(flow_series(sys.H0, base_observable, BracketKind::moyal, max_order), Symbol::coordinate(sys.history_space, "t"), lift);
}

Symbol observable_pullback(const ExtendedSystem& sys, const Symbol& base_observable) {
  if (!sys.T) throw InputError("observable_pullback: system has no causal map");
  return sys.T->to_target(history_observable(sys, base_observable));
}

Symbol observable_time_derivative(const ExtendedSystem& sys, const Symbol& base_observable) {
  Symbol z = history_observable(sys, base_observable);
  Symbol h = sys.to_history(sys.H0);
  return moyal_bracket(z, h) - poisson(z, h);
}

std::vector<VectorFieldComponent> hamiltonian_vector_field(const ExtendedSystem& sys) {
  const auto& ext = sys.extended_space;
  Coefficient lambda = Coefficient::param(sys.multiplier_name);
  Symbol H = sys.to_extended(sys.H0);
  std::vector<VectorFieldComponent> v;
  v.push_back({"t", Symbol(ext, lambda)});
  v.push_back({"P_t", Symbol(ext)});
  for (std::size_t j = 0; j < sys.dof(); ++j) v.push_back({sys.position_name(j), partial(H, sys.momentum_name(j)) * lambda});
  for (std::size_t j = 0; j < sys.dof(); ++j) v.push_back({sys.momentum_name(j), -partial(H, sys.position_name(j)) * lambda});
  return v;
}

ExtendedSystem fixture_coupled_particles(const FixtureParameters& params) {
  auto base = PhaseSpace::canonical({"q1", "q2"}, {"p1", "p2"});
  Symbol H0 = parse_symbol("p1^2/(2*M) + p2^2/(2*m) + k*q1*p2^2", base);
  if (params.M) H0 = substitute_param(H0, "M", Coefficient(*params.M));
  if (params.m) H0 = substitute_param(H0, "m", Coefficient(*params.m));
  if (params.k) H0 = substitute_param(H0, "k", Coefficient(*params.k));
  return with_histories(parametrize(H0));
}

const FixtureReference& fixture_reference() {
  static const FixtureReference ref{
      {{"A1", "q1 - p1*t/M - k*p2^2*t^2/(2*M)"},
       {"A2", "q2 - (p2/m + 2*k*q1*p2)*t + k*p1*p2*t^2/M + k^2*p2^3*t^3/(3*M)"},
       {"B1", "p1 + k*p2^2*t"},
       {"B2", "p2"}},
      {{"t", "t"},
       {"P_t", "phi - B1^2/(2*M) - B2^2/(2*m) - k*A1*B2^2"},
       {"q1", "A1 + B1*t/M - k*B2^2*t^2/(2*M)"},
       {"p1", "B1 - k*B2^2*t"},
       {"q2", "A2 + (B2/m + 2*k*A1*B2)*t + k*B1*B2*t^2/M - k^2*B2^3*t^3/(3*M)"},
       {"p2", "B2"}},
      {{"t", "t"},
       {"phi", "P_t + p1^2/(2*M) + p2^2/(2*m) + k*q1*p2^2"},
       {"A1", "q1 - p1*t/M - k*p2^2*t^2/(2*M)"},
       {"B1", "p1 + k*p2^2*t"},
       {"A2", "q2 - (p2/m + 2*k*q1*p2)*t + k*p1*p2*t^2/M + k^2*p2^3*t^3/(3*M)"},
       {"B2", "p2"}},
      // chart order (P_t, p1, p2, t, q1, q2); A1 stands for the history A1(t, q, p)
      {{1, 2, 2, "1/M"},
       {1, 2, 4, "k*p2^2/M"},
       {1, 3, 3, "1/m + 2*k*A1"},
       {1, 3, 4, "-2*k*p1*p2/M"},
       {1, 3, 5, "2*k*p2"},
       {1, 4, 4, "k^2*p2^4/M"},
       {2, 3, 3, "2*k*t"},
       {2, 3, 4, "2*k*p2"},
       {5, 2, 4, "-1/M"},
       {5, 3, 3, "k*t^2/M"},
       {5, 4, 4, "-k*p2^2/M"},
       {6, 2, 3, "k*t^2/M"},
       {6, 3, 3, "2*k^2*p2*t^3/M"},
       {6, 3, 4, "-1/m - 2*k*A1"},
       {6, 3, 5, "-2*k*t"},
       {6, 4, 4, "2*k*p1*p2/M"},
       {6, 4, 5, "-2*k*p2"}}};
  return ref;
}

}  // namespace phasestar
