#include "support.hpp"

#include "phasestar/errors.hpp"
#include "phasestar/wigner.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

using namespace phasestar;
using cd = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

GridSpec line(std::size_t n, double half) { return GridSpec{{{"A", -half, half, n}}, Boundary::periodic, Scheme::spectral, 1}; }

// Closed form for C = N (g(a - a0) - g(a + a0)), g(x) = exp(-x^2/(2 s^2)).
double odd_wigner(double A, double B, double a0, double s, double hbar) {
  double n2 = 1.0 / (2 * s * std::sqrt(kPi) * (1 - std::exp(-a0 * a0 / (s * s))));
  double pre = n2 * 2 * s * std::sqrt(kPi) / (2 * kPi * hbar) * std::exp(-s * s * B * B / (hbar * hbar));
  return pre * (std::exp(-(A - a0) * (A - a0) / (s * s)) + std::exp(-(A + a0) * (A + a0) / (s * s)) -
                2 * std::exp(-A * A / (s * s)) * std::cos(2 * a0 * B / hbar));
}

}  // namespace

TEST_CASE("amplitudes are normalized", "[wigner]") {
  auto g = line(64, 8);
  auto C = Amplitude::normalized(g, [](const std::vector<double>& x) { return cd(std::exp(-x[0] * x[0]), 0.3); });
  CHECK(C.norm() == Catch::Approx(1.0).margin(1e-12));
  std::vector<cd> raw(g.size(), cd(1.0, 0.0));
  CHECK_THROWS_AS(Amplitude(g, raw), InputError);
  CHECK_THROWS_AS(Amplitude(g, std::vector<cd>(3)), InputError);
}

TEST_CASE("Gaussian amplitude gives a positive Gaussian with the right marginals", "[wigner]") {
  const double hbar = 0.7, s = 1.1;
  auto g = line(128, 10);
  auto C = Amplitude::normalized(g, [&](const std::vector<double>& x) { return cd(std::exp(-x[0] * x[0] / (2 * s * s)), 0); });
  GridState f = wigner_of_amplitude(C, {"A"}, {"B"}, hbar);
  REQUIRE(f.spec.axes.size() == 2);
  CHECK(f.spec.axes[1].name == "B");
  CHECK(f.spec.axes[1].spacing() == Catch::Approx(kPi * hbar / (g.axes[0].spacing() * 128)));
  double lo = 0;
  for (std::size_t n = 0; n < f.values.size(); ++n) {
    auto x = f.spec.point(n);
    double expect = std::exp(-x[0] * x[0] / (s * s) - s * s * x[1] * x[1] / (hbar * hbar)) / (kPi * hbar);
    CHECK(f.values[n] == Catch::Approx(expect).margin(1e-12));
    lo = std::min(lo, f.values[n]);
  }
  CHECK(lo > -1e-14);
  auto mA = marginal(f, {"A"});
  for (std::size_t i = 0; i < 128; ++i) CHECK(mA.values[i] == Catch::Approx(std::norm(C.values()[i])).margin(1e-12));
  // Fourier companion: |C^(B)|^2 = s/(hbar sqrt(pi)) exp(-s^2 B^2/hbar^2)
  auto mB = marginal(f, {"B"});
  for (std::size_t j = 0; j < mB.values.size(); ++j) {
    double B = mB.spec.axes[0].x(j);
    CHECK(mB.values[j] == Catch::Approx(s / (hbar * std::sqrt(kPi)) * std::exp(-s * s * B * B / (hbar * hbar))).margin(1e-6));
  }
  CHECK(normalize_check(f) == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("odd superposition shows interference against the closed form", "[wigner][oracle]") {
  const double hbar = 1.0, s = 0.8, a0 = 2.0;
  auto g = line(128, 10);
  auto C = Amplitude::normalized(g, [&](const std::vector<double>& x) {
    return cd(std::exp(-(x[0] - a0) * (x[0] - a0) / (2 * s * s)) - std::exp(-(x[0] + a0) * (x[0] + a0) / (2 * s * s)), 0);
  });
  GridState f = wigner_of_amplitude(C, {"A"}, {"B"}, hbar);
  double lo = 0;
  for (std::size_t n = 0; n < f.values.size(); ++n) {
    auto x = f.spec.point(n);
    CHECK(f.values[n] == Catch::Approx(odd_wigner(x[0], x[1], a0, s, hbar)).margin(1e-10));
    lo = std::min(lo, f.values[n]);
  }
  CHECK(lo < -0.1);
  auto mA = marginal(f, {"A"});
  for (std::size_t i = 0; i < 128; ++i) CHECK(mA.values[i] == Catch::Approx(std::norm(C.values()[i])).margin(1e-12));
}

TEST_CASE("history-diagonal probability returns |C|^2", "[wigner]") {
  const double hbar = 1.0;
  auto g = line(64, 8);
  auto C = Amplitude::normalized(g, [](const std::vector<double>& x) { return cd(std::exp(-(x[0] - 1) * (x[0] - 1) / 2), 0); });
  GridState f = wigner_of_amplitude(C, {"A"}, {"B"}, hbar);
  auto sp = PhaseSpace::canonical({"A"}, {"B"});
  const double x = g.axes[0].x(37);
  double p = probability(f, DeltaSymbol::delta(parse_symbol("A - x", sp)), {{"x", x}});
  CHECK(p == Catch::Approx(std::norm(C.values()[37])).margin(1e-12));
}

TEST_CASE("two label dimensions", "[wigner]") {
  GridSpec g{{{"a1", -6, 6, 32}, {"a2", -6, 6, 32}}, Boundary::periodic, Scheme::spectral, 1};
  auto C = Amplitude::normalized(g, [](const std::vector<double>& x) {
    return std::exp(-(x[0] * x[0] + 2 * x[1] * x[1]) / 2) * std::polar(1.0, 0.4 * x[0]);
  });
  GridState f = wigner_of_amplitude(C, {"A1", "A2"}, {"B1", "B2"}, 1.0);
  CHECK(f.spec.axes.size() == 4);
  auto m = marginal(f, {"A1", "A2"});
  for (std::size_t n = 0; n < m.values.size(); n += 13) CHECK(m.values[n] == Catch::Approx(std::norm(C.values()[n])).margin(1e-12));
  CHECK(normalize_check(f) == Catch::Approx(1.0).margin(1e-9));
  CHECK_THROWS_AS(wigner_of_amplitude(C, {"A1"}, {"B1"}, 1.0), InputError);
}
