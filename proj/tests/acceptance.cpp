// Acceptance gate: one line per criterion, nonzero exit when any selected criterion fails.
//   acceptance            run all criteria
//   acceptance 3 7        run the listed criteria

#include "phasestar/covariant.hpp"
#include "phasestar/distributions.hpp"
#include "phasestar/errors.hpp"
#include "phasestar/grid.hpp"
#include "phasestar/moyal.hpp"
#include "phasestar/parametrized.hpp"
#include "phasestar/sampling.hpp"
#include "phasestar/symbol_io.hpp"
#include "phasestar/wigner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace phasestar;

namespace {

// Pinned tolerances and budgets.
constexpr double kHistoriesSeconds = 1.0;
constexpr int kCovariancePairs = 100;
constexpr double kCovarianceSeconds = 30.0;
constexpr double kCorrectionRelL2 = 1e-3;
constexpr double kScalingExponent = 2.0;
constexpr double kScalingTolerance = 0.02;
constexpr double kCorrectionSeconds = 120.0;
constexpr double kQuadraticMachine = 1e-13;  // relative to max |liouville rhs|
constexpr double kPeriodL2 = 1e-6;
constexpr double kDrift1D = 1e-6;
constexpr double kDrift4D = 1e-4;
constexpr double kMarginal = 1e-6;
constexpr double kCausalL2 = 1e-4;

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char b[64];
  std::snprintf(b, sizeof b, f, v);
  return b;
}

Symbol P(const std::string& text, const SpacePtr& sp, const ParseContext& ctx = {}) { return parse_symbol(text, sp, ctx); }

// ---- 1 ----
Outcome histories() {
  auto base = PhaseSpace::canonical({"q1", "q2"}, {"p1", "p2"});
  auto t0 = Clock::now();
  ExtendedSystem sys = with_histories(parametrize(P("p1^2/(2*M) + p2^2/(2*m) + k*q1*p2^2", base)));
  const Histories& qh = *sys.histories;
  const Histories& ch = *sys.classical_histories;
  double secs = seconds_since(t0);
  const auto& E = sys.extended_space;
  const std::vector<std::string> A{"q1 - p1*t/M - (k/(2*M))*p2^2*t^2",
                                   "q2 - (p2/m + 2*k*q1*p2)*t + (k/M)*p1*p2*t^2 + (k^2/(3*M))*p2^3*t^3"};
  const std::vector<std::string> B{"p1 + k*p2^2*t", "p2"};
  int bad = 0;
  for (std::size_t j = 0; j < 2; ++j) {
    bad += !(qh.A[j] == P(A[j], E));
    bad += !(qh.B[j] == P(B[j], E));
  }
  bool same = qh == ch;
  return {bad == 0 && same && secs < kHistoriesSeconds,
          std::to_string(4 - bad) + "/4 entries exact, classical " + (same ? "identical" : "different") + ", " +
              fmt("%.3f s", secs)};
}

// ---- 2 ----
Outcome algebra() {
  ExtendedSystem sys = fixture_coupled_particles();
  const auto& E = sys.extended_space;
  const auto& h = *sys.histories;
  Symbol one(E, Coefficient(1L));
  int checks = 0, bad = 0;
  auto expect = [&](const Symbol& got, bool unit) {
    ++checks;
    bad += !(unit ? got == one : got.is_zero());
  };
  std::vector<Symbol> all{h.A[0], h.A[1], h.B[0], h.B[1]};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      if (i == j) continue;
      bool unit = (i < 2 && j == i + 2);
      if (i >= 2 && j == i - 2) {
        ++checks;
        bad += !(moyal_bracket(all[i], all[j]) == -one);
        continue;
      }
      expect(moyal_bracket(all[i], all[j]), unit);
    }
  for (const auto& x : all) expect(moyal_bracket(sys.constraint, x), false);
  expect(moyal_bracket(Symbol::coordinate(E, "t"), sys.constraint), true);
  return {bad == 0, std::to_string(checks - bad) + "/" + std::to_string(checks) + " brackets exact"};
}

// ---- 3 ----
// Reference table, chart order (P_t, p1, p2, t, q1, q2), j <= k.
struct Entry {
  int i, j, k;
  const char* value;
};
const Entry kReferenceTable[] = {
    {1, 2, 2, "1/M"},          {5, 2, 4, "-1/M"},          {1, 2, 4, "k*p2^2/M"},       {5, 4, 4, "-k*p2^2/M"},
    {1, 3, 3, "2*k*A1"},       {1, 3, 4, "-2*k*p1*p2/M"},  {6, 4, 4, "2*k*p1*p2/M"},    {1, 3, 5, "2*k*p2"},
    {2, 3, 4, "2*k*p2"},       {6, 4, 5, "-2*k*p2"},       {1, 4, 4, "k^2*p2^4/M"},     {2, 3, 3, "2*k*t"},
    {6, 3, 5, "-2*k*t"},       {5, 3, 3, "k*t^2/M"},       {6, 2, 3, "k*t^2/M"},        {5, 3, 4, "k*p2*t/M"},
    {6, 3, 3, "2*k^2*p2*t^3/M"}, {6, 3, 4, "-1/m - 2*k*A1"},
};

Outcome christoffel_table() {
  ExtendedSystem sys = fixture_coupled_particles();
  const auto& E = sys.extended_space;
  Connection c = christoffel(*sys.T);
  ParseContext ctx;
  ctx.bindings.emplace("A1", sys.histories->A[0]);
  const std::size_t n = E->dim();
  std::vector<bool> listed(n * n * n, false);
  int matched = 0;
  std::string mismatches;
  for (const auto& e : kReferenceTable) {
    std::size_t i = e.i - 1, j = e.j - 1, k = e.k - 1;
    listed[(i * n + j) * n + k] = true;
    if (c(i, j, k) == P(e.value, E, ctx)) {
      ++matched;
    } else {
      mismatches += " Gamma^{" + E->name(i) + "}_{" + E->name(j) + " " + E->name(k) + "}: expected " + e.value +
                    ", computed " + to_string(c(i, j, k)) + ";";
    }
  }
  int extra = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = j; k < n; ++k)
        if (!listed[(i * n + j) * n + k] && !c(i, j, k).is_zero()) ++extra;
  const int total = static_cast<int>(std::size(kReferenceTable));
  return {matched == total && extra == 0, std::to_string(matched) + "/" + std::to_string(total) + " reference entries, " +
                                              std::to_string(extra) + " unlisted nonzero;" + mismatches};
}

// ---- 4 ----
Outcome covariance() {
  ExtendedSystem sys = fixture_coupled_particles();
  const auto& E = sys.extended_space;
  std::mt19937_64 rng(4);
  auto t0 = Clock::now();
  std::vector<std::pair<std::string, Diffeomorphism>> maps;
  maps.emplace_back("identity", Diffeomorphism::identity(E));
  maps.emplace_back("affine", random_affine_canonical(E, 6, rng));
  maps.emplace_back("fixture", *sys.T);
  std::string detail;
  int bad = 0;
  for (const auto& [name, d] : maps) {
    Connection conn = christoffel(d);
    SymplecticMatrix J = jacobian_symplectic(d);
    int map_bad = 0;
    for (int k = 0; k < kCovariancePairs; ++k) {
      Symbol a = random_polynomial(d.target(), 3, 4, rng), b = random_polynomial(d.target(), 3, 4, rng);
      Symbol x = covariant_star_pullback(a, b, d, 2), y = covariant_star_direct(a, b, J, conn, 2);
      for (int h = 0; h <= 2; ++h) map_bad += !(x.hbar_part(h) == y.hbar_part(h));
    }
    bad += map_bad;
    detail += name + " " + std::to_string(map_bad) + " mismatches, ";
  }
  double secs = seconds_since(t0);
  return {bad == 0 && secs < kCovarianceSeconds,
          std::to_string(kCovariancePairs) + " pairs per map: " + detail + fmt("%.1f s", secs)};
}

// ---- 5 ----
Outcome stargen() {
  int checks = 0, bad = 0;
  std::string failed;
  auto expect = [&](bool ok, const std::string& what) {
    ++checks;
    if (!ok) {
      ++bad;
      failed += " " + what;
    }
  };
  {
    auto sp = PhaseSpace::canonical({"q"}, {"p"});
    Symbol a = P("a", sp), b = P("b", sp);
    DeltaSymbol rho = exp_shift_star_delta({b - a}, {P("p", sp)}, {P("q", sp)}, {b}, 4);
    expect(rho == DeltaSymbol::phase(P("(b - a)*p", sp)) * DeltaSymbol::delta(P("q - (a + b)/2", sp)), "shifted-delta");
  }
  ExtendedSystem sys = fixture_coupled_particles();
  const auto& H = sys.history_space;
  const auto& E = sys.extended_space;
  auto a = label_symbols(sys, "a", H), b = label_symbols(sys, "b", H);
  DeltaSymbol rho = build_stargenfunction(sys, a, b, Representation::history);
  DeltaSymbol expected = DeltaSymbol::delta(P("phi", H)) * DeltaSymbol::phase(P("(b1 - a1)*B1 + (b2 - a2)*B2", H)) *
                        DeltaSymbol::delta(P("A1 - (a1 + b1)/2", H)) * DeltaSymbol::delta(P("A2 - (a2 + b2)/2", H));
  expect(rho == expected, "history-rho");

  DeltaSymbol causal = build_stargenfunction(sys, a, b, Representation::causal);
  DeltaSymbol causal_expected =
      DeltaSymbol::delta(P("P_t + p1^2/(2*M) + p2^2/(2*m) + k*q1*p2^2", E)) *
      DeltaSymbol::phase(P("(b1 - a1)*(p1 + k*p2^2*t) + (b2 - a2)*p2", E)) *
      DeltaSymbol::delta(P("q1 - p1*t/M - (k/(2*M))*p2^2*t^2 - (a1 + b1)/2", E)) *
      DeltaSymbol::delta(P("q2 - (p2/m + 2*k*q1*p2)*t + (k/M)*p1*p2*t^2 + (k^2/(3*M))*p2^3*t^3 - (a2 + b2)/2", E));
  expect(causal == causal_expected, "causal-rho");

  Symbol zero(H);
  auto r = verify_stargen(rho, P("phi", H), zero, zero);
  expect(r.left.is_zero() && r.right.is_zero() && r.hbar_safe, "phi-residual");
  for (std::size_t j = 0; j < 2; ++j) {
    auto rj = verify_stargen(rho, Symbol::coordinate(H, sys.history_A_name(j)), a[j], b[j]);
    expect(rj.left.is_zero() && rj.right.is_zero() && rj.hbar_safe, sys.history_A_name(j) + "-residual");
  }
  return {bad == 0, std::to_string(checks - bad) + "/" + std::to_string(checks) + " exact" + (bad ? ", failed:" + failed : "")};
}

// ---- 6 ----
Outcome classicality() {
  ExtendedSystem sys = fixture_coupled_particles();
  const auto& base = sys.base_space;
  auto z = [&](const char* name) { return history_observable(sys, Symbol::coordinate(base, name)); };
  bool q1 = star_exp_classical_check(z("q1"), 6);
  bool p1 = star_exp_classical_check(z("p1"), 6);
  bool p2 = star_exp_classical_check(z("p2"), 6);
  auto rep = star_exp_classical_report(z("q2"), 6);
  bool hbar_dependent = rep.remainder && !rep.remainder->is_zero() && rep.remainder->hbar_part(0).is_zero();
  bool q2_ok = !rep.classical && rep.first_failure == 2 && hbar_dependent;
  std::string detail = std::string("q1 ") + (q1 ? "closed" : "open") + ", p1 " + (p1 ? "closed" : "open") + ", p2 " +
                       (p2 ? "closed" : "open") + "; q2 first fails at star power " + std::to_string(rep.first_failure) +
                       " (required 2), remainder " + (rep.remainder ? to_string(*rep.remainder) : "none");
  return {q1 && p1 && p2 && q2_ok, detail};
}

// ---- grid helpers ----
GridSpec grid4(std::size_t n, double half, Scheme scheme, Boundary b) {
  return GridSpec{{{"q1", -half, half, n}, {"q2", -half, half, n}, {"p1", -half, half, n}, {"p2", -half, half, n}},
                  b, scheme, 1};
}

double gauss4(const std::vector<double>& x) {
  const double c[4] = {0.3, -0.2, 0.25, 0.1};
  double r = 0;
  for (int i = 0; i < 4; ++i) r += (x[i] - c[i]) * (x[i] - c[i]);
  return std::exp(-r) / (kPi * kPi);
}

std::vector<double> sub(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d(a.size());
  for (std::size_t n = 0; n < a.size(); ++n) d[n] = a[n] - b[n];
  return d;
}

double l2(const GridSpec& g, const std::vector<double>& v) { return l2_norm(GridState(g, v)); }

// ---- 7 ----
// Numeric Poisson bracket {u, g} with u's gradient evaluated analytically and g's by fd4.
std::vector<double> numeric_poisson(const Symbol& u, const std::vector<double>& g, const GridSpec& spec,
                                    const std::map<std::string, double>& params) {
  const auto& sp = *u.space();
  std::vector<std::string> names;
  for (const auto& a : spec.axes) names.push_back(a.name);
  Differentiator d(spec);
  std::vector<double> out(g.size(), 0.0), dg(g.size());
  for (auto [q, p] : sp.pairs()) {
    for (int side = 0; side < 2; ++side) {
      std::size_t du = side == 0 ? q : p, dgx = side == 0 ? p : q;
      Symbol grad = partial(u, du);
      if (grad.is_zero()) continue;
      NumericPolynomial gp(grad, names, params);
      d.apply(g.data(), dg.data(), spec.axis(sp.name(dgx)), 1);
      const double sign = side == 0 ? 1.0 : -1.0;
      for (std::size_t n = 0; n < g.size(); ++n) out[n] += sign * gp(spec.point(n)) * dg[n];
    }
  }
  return out;
}

Outcome moyal_correction() {
  auto t0 = Clock::now();
  auto sp = PhaseSpace::canonical({"q1", "q2"}, {"p1", "p2"});
  Symbol H = P("p1^2/(2*M) + p2^2/(2*m) + k*q1*p2^2", sp);
  const double k = 0.2;
  std::map<std::string, double> par{{"M", 1.0}, {"m", 1.0}, {"k", k}};
  GridSpec g = grid4(32, 6, Scheme::fd4, Boundary::zero_padded);
  GridState f = GridState::sample(g, gauss4);
  Differentiator d(g);

  // (hbar^2/24) [2 {2 k p2, d^2 f/dq2 dp1} - {2 k q1, d^2 f/dq2^2}], discretized here on its own.
  std::vector<double> a(g.size()), fq2p1(g.size()), fq2q2(g.size());
  d.apply(f.values.data(), a.data(), g.axis("p1"), 1);
  d.apply(a.data(), fq2p1.data(), g.axis("q2"), 1);
  d.apply(f.values.data(), a.data(), g.axis("q2"), 1);
  d.apply(a.data(), fq2q2.data(), g.axis("q2"), 1);
  auto b1 = numeric_poisson(P("2*k*p2", sp), fq2p1, g, par);
  auto b2 = numeric_poisson(P("2*k*q1", sp), fq2q2, g, par);
  std::vector<double> bracket_form(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) bracket_form[n] = 2 * b1[n] - b2[n];

  GridState cl = liouville_rhs(H, f, par);
  std::vector<double> hs{0.5, 1.0, 2.0}, norms;
  double worst = 0;
  for (double hbar : hs) {
    GridState m = moyal_rhs(H, f, par, hbar);
    auto diff = sub(m.values, cl.values);
    std::vector<double> expect(g.size());
    for (std::size_t n = 0; n < g.size(); ++n) expect[n] = hbar * hbar / 24 * bracket_form[n];
    worst = std::max(worst, l2(g, sub(diff, expect)) / l2(g, expect));
    norms.push_back(l2(g, diff));
  }
  // least-squares slope of log norm against log hbar
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    double x = std::log(hs[i]), y = std::log(norms[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  double nn = static_cast<double>(hs.size());
  double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  double secs = seconds_since(t0);
  bool ok = worst <= kCorrectionRelL2 && std::abs(slope - kScalingExponent) <= kScalingTolerance && secs < kCorrectionSeconds;
  return {ok, "32^4 fd4: relative L2 " + fmt("%.2e", worst) + ", hbar exponent " + fmt("%.4f", slope) + ", " +
                  fmt("%.1f s", secs)};
}

// ---- 8 ----
double gauss2(const std::vector<double>& x, double q0, double p0) {
  return std::exp(-((x[0] - q0) * (x[0] - q0) + (x[1] - p0) * (x[1] - p0))) / kPi;
}

Outcome quadratic() {
  auto sp = PhaseSpace::canonical({"q"}, {"p"});
  Symbol H = P("p^2/2 + q^2/2", sp);
  GridSpec g{{{"q", -10, 10, 256}, {"p", -10, 10, 256}}, Boundary::periodic, Scheme::spectral, 1};
  GridState f0 = GridState::sample(g, [](const std::vector<double>& x) { return gauss2(x, 2.5, -1.0); });
  double scale = 0, gap = 0;
  GridState cl = liouville_rhs(H, f0, {});
  for (double v : cl.values) scale = std::max(scale, std::abs(v));
  for (double hbar : {0.5, 1.0, 2.0}) {
    GridState m = moyal_rhs(H, f0, {}, hbar);
    for (std::size_t n = 0; n < m.values.size(); ++n) gap = std::max(gap, std::abs(m.values[n] - cl.values[n]));
  }
  BracketOperator op(H, g, {}, 1.0, BracketOrder::moyal);
  Rk4 rk(op);
  GridState f = f0;
  const int steps = 10000;
  for (int s = 0; s < steps; ++s) rk.step(f, 2 * kPi / steps);
  f.time = f0.time;
  double err = l2_distance(f, f0);
  return {gap <= kQuadraticMachine * scale && err <= kPeriodL2,
          "max |moyal - liouville| " + fmt("%.1e", gap) + ", 256^2 spectral full period L2 " + fmt("%.2e", err)};
}

// ---- 9 ----
Outcome normalization() {
  std::string detail;
  bool ok = true;
  {
    auto sp = PhaseSpace::canonical({"q"}, {"p"});
    Symbol H = P("p^2/2 + q^2/2 + q^4/20", sp);
    GridSpec g{{{"q", -8, 8, 64}, {"p", -8, 8, 64}}, Boundary::periodic, Scheme::spectral, 1};
    GridState f0 = GridState::sample(g, [](const std::vector<double>& x) { return gauss2(x, 1.5, 0.5); });
    for (auto order : {BracketOrder::moyal, BracketOrder::poisson}) {
      BracketOperator op(H, g, {}, 1.0, order);
      Rk4 rk(op);
      GridState f = f0;
      for (int s = 0; s < 1000; ++s) rk.step(f, 0.001);
      double drift = std::abs(normalize_check(f) - normalize_check(f0));
      ok = ok && drift <= kDrift1D;
      detail += std::string(order == BracketOrder::moyal ? "1-DOF moyal " : "1-DOF liouville ") + fmt("%.1e", drift) + ", ";
    }
  }
  {
    auto sp = PhaseSpace::canonical({"q1", "q2"}, {"p1", "p2"});
    Symbol H = P("p1^2/2 + p2^2/2 + k*q1*p2^2", sp);
    GridSpec g = grid4(32, 6, Scheme::fd4, Boundary::zero_padded);
    GridState f0 = GridState::sample(g, gauss4);
    BracketOperator op(H, g, {{"k", 0.2}}, 1.0, BracketOrder::moyal);
    Rk4 rk(op);
    GridState f = f0;
    for (int s = 0; s < 1000; ++s) rk.step(f, 0.001);
    double drift = std::abs(normalize_check(f) - normalize_check(f0));
    ok = ok && drift <= kDrift4D;
    detail += "fixture 4D fd4 moyal " + fmt("%.1e", drift);
  }
  return {ok, detail + " over 1000 steps"};
}

// ---- 10 ----
Outcome probability_marginals() {
  using cd = std::complex<double>;
  const double hbar = 1.0;
  GridSpec g{{{"A", -10, 10, 128}}, Boundary::periodic, Scheme::spectral, 1};
  auto err_marginal = [&](const Amplitude& C, const GridState& f) {
    auto m = marginal(f, {"A"});
    double e = 0;
    for (std::size_t i = 0; i < m.values.size(); ++i) e = std::max(e, std::abs(m.values[i] - std::norm(C.values()[i])));
    return e;
  };
  auto gaussian = Amplitude::normalized(g, [](const std::vector<double>& x) { return cd(std::exp(-(x[0] - 0.5) * (x[0] - 0.5) / 2), 0); });
  GridState fg = wigner_of_amplitude(gaussian, {"A"}, {"B"}, hbar);
  double eg = err_marginal(gaussian, fg);
  auto odd = Amplitude::normalized(g, [](const std::vector<double>& x) {
    return cd(std::exp(-(x[0] - 2) * (x[0] - 2) / 2) - std::exp(-(x[0] + 2) * (x[0] + 2) / 2), 0);
  });
  GridState fo = wigner_of_amplitude(odd, {"A"}, {"B"}, hbar);
  double eo = err_marginal(odd, fo);
  double lo = 0;
  for (double v : fo.values) lo = std::min(lo, v);
  return {eg <= kMarginal && eo <= kMarginal && lo < 0,
          "gaussian B-marginal error " + fmt("%.1e", eg) + ", odd superposition min f " + fmt("%.3f", lo) +
              ", its marginal over B error " + fmt("%.1e", eo)};
}

// ---- 11 ----
Outcome causal_picture() {
  ExtendedSystem sys = fixture_coupled_particles({Rational(1), Rational(1), Rational(1, 5)});
  GridSpec g = grid4(32, 6, Scheme::spectral, Boundary::periodic);
  std::vector<std::string> names{"q1", "q2", "p1", "p2", "t"};
  const auto& hist = *sys.classical_histories;
  std::vector<NumericPolynomial> A, B;
  for (std::size_t j = 0; j < 2; ++j) {
    A.emplace_back(hist.A[j], names, std::map<std::string, double>{});
    B.emplace_back(hist.B[j], names, std::map<std::string, double>{});
  }
  // Static history-representation Wigner function of a coherent product state (hbar = 1, unit width).
  const double ca[2] = {0.4, -0.3}, cb[2] = {0.5, 0.2};
  auto fW = [&](const double* a, const double* b) {
    double r = 0;
    for (int j = 0; j < 2; ++j) r += (a[j] - ca[j]) * (a[j] - ca[j]) + (b[j] - cb[j]) * (b[j] - cb[j]);
    return std::exp(-r) / (kPi * kPi);
  };
  auto pulled_back = [&](double t) {
    return GridState::sample(g, [&](const std::vector<double>& x) {
      double xt[5] = {x[0], x[1], x[2], x[3], t};
      double a[2] = {A[0](xt), A[1](xt)}, b[2] = {B[0](xt), B[1](xt)};
      return fW(a, b);
    });
  };
  BracketOperator op(sys.H0, g, {}, 1.0, BracketOrder::poisson);
  Rk4 rk(op);
  GridState f = pulled_back(0.0);
  const double dt = 0.01;
  std::string detail;
  bool ok = true;
  int step = 0;
  for (double t : {0.0, 0.5, 1.0}) {
    while (step < static_cast<int>(std::lround(t / dt))) {
      rk.step(f, dt);
      ++step;
    }
    GridState ref = pulled_back(t);
    ref.time = f.time;
    double e = l2_distance(f, ref);
    ok = ok && e <= kCausalL2;
    detail += "t=" + fmt("%.1f", t) + " L2 " + fmt("%.1e", e) + " (rel " + fmt("%.1e", e / l2_norm(ref)) + "), ";
  }
  return {ok, detail + "32^4 spectral, cfl " + fmt("%.2f", cfl_number(sys.H0, g, {}, dt))};
}

// ---- 12 ----
Outcome observable_sector() {
  ExtendedSystem sys = fixture_coupled_particles();
  const auto& base = sys.base_space;
  std::string detail;
  bool ok = true;
  for (const char* z : {"q1", "p1", "p2"}) {
    Symbol d = observable_time_derivative(sys, Symbol::coordinate(base, z));
    ok = ok && d.is_zero();
    detail += std::string(z) + (d.is_zero() ? " 0, " : " nonzero, ");
  }
  Symbol d2 = observable_time_derivative(sys, Symbol::coordinate(base, "q2"));
  bool q2_ok = !d2.is_zero() && d2 == d2.hbar_part(2);
  ok = ok && q2_ok;
  detail += "q2 " + (d2.is_zero() ? std::string("0 (required nonzero hbar^2 multiple)") : to_string(d2));
  return {ok, detail};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "histories", histories},
      {2, "history algebra", algebra},
      {3, "connection table", christoffel_table},
      {4, "covariant star", covariance},
      {5, "stargenfunctions", stargen},
      {6, "star-exponential classicality", classicality},
      {7, "moyal correction", moyal_correction},
      {8, "quadratic degeneracy", quadratic},
      {9, "normalization", normalization},
      {10, "probability marginals", probability_marginals},
      {11, "causal picture", causal_picture},
      {12, "observable sector", observable_sector},
  };
  std::vector<int> pick;
  for (int i = 1; i < argc; ++i) pick.push_back(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& c : all) {
    if (!pick.empty() && std::find(pick.begin(), pick.end(), c.id) == pick.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %2d  %s  %s: %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
