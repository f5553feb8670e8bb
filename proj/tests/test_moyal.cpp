#include "support.hpp"

#include "phasestar/moyal.hpp"
#include "phasestar/parametrized.hpp"
#include "phasestar/sampling.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace phasestar;
using test::S;

// Expected values below were produced by tests/oracles/moyal_oracle.py, an independent
// sympy expansion of the bidifferential series.

TEST_CASE("star products against the sympy oracle", "[moyal][oracle]") {
  auto s1 = test::space1();
  CHECK(star(S("q^2", s1), S("p^2", s1)) == S("q^2*p^2 + 2*i*hbar*q*p - hbar^2/2", s1));
  CHECK(star(S("q^3", s1), S("p^3", s1)) ==
        S("q^3*p^3 + (9/2)*i*hbar*q^2*p^2 - (9/2)*hbar^2*q*p - (3/4)*i*hbar^3", s1));
  CHECK(moyal_bracket(S("q^3", s1), S("p^3", s1)) == S("9*q^2*p^2 - (3/2)*hbar^2", s1));
  CHECK(moyal_bracket(S("q^2*p", s1), S("q*p^2", s1)) == S("3*q^2*p^2 + hbar^2/2", s1));

  auto s2 = test::space2();
  CHECK(star(S("q1^2*p2 + p1", s2), S("q2*p2^2 - q1*p1", s2)) ==
        S("i*hbar*p1/2 - i*hbar*p2^2*q1^2/2 - i*hbar*p2*q1^2 - p1^2*q1 + p1*p2^2*q2 - p1*p2*q1^3 + p2^3*q1^2*q2", s2));
  Symbol H = S("p1^2/(2*M) + p2^2/(2*m) + k*q1*p2^2", s2);
  CHECK(moyal_bracket(H, S("q1*q2^2", s2)) == S("-4*k*p2*q1^2*q2 - 2*p2*q1*q2/m - p1*q2^2/M", s2));
  CHECK(moyal_bracket(H, S("q2^3", s2)) == S("-6*k*p2*q1*q2^2 - 3*p2*q2^2/m", s2));
}

TEST_CASE("star product basics", "[moyal]") {
  auto s2 = test::space2();
  CHECK(star(S("q1^2", s2), S("p1^2", s2)) == S("q1^2*p1^2 + 2*i*hbar*q1*p1 - hbar^2/2", s2));
  CHECK(star(S("q1", s2), S("p1", s2)) == S("q1*p1 + i*hbar/2", s2));
  CHECK(moyal_bracket(S("q1", s2), S("p1", s2)) == S("1", s2));
  CHECK(moyal_bracket(S("q1", s2), S("p2", s2)).is_zero());
  CHECK(star_power(S("q1 + p1", s2), 2) == S("(q1 + p1)^2", s2));
  CHECK(star(S("q1^2", s2), S("p1^2", s2), 1) == S("q1^2*p1^2 + 2*i*hbar*q1*p1", s2));
  CHECK(star_term(S("q1^2", s2), S("p1^2", s2), 2) == S("-hbar^2/2", s2));
  Symbol H = S("p1^2/(2*M) + p2^2/(2*m) + k*q1*p2^2", s2);
  CHECK(moyal_bracket(S("q1", s2), H) == S("p1/M", s2));
  CHECK(moyal_bracket(S("q1", s2), H) == poisson(S("q1", s2), H));
}

TEST_CASE("star product laws on random polynomials", "[moyal][property]") {
  std::mt19937_64 rng(23);
  auto sp = test::space2();
  for (int trial = 0; trial < 25; ++trial) {
    Symbol a = random_polynomial(sp, 3, 3, rng), b = random_polynomial(sp, 3, 3, rng), c = random_polynomial(sp, 3, 3, rng);
    CAPTURE(to_string(a), to_string(b), to_string(c));
    CHECK(star(star(a, b), c) == star(a, star(b, c)));
    CHECK(star(a, b).hbar_part(0) == a * b);
    CHECK(star(a, b).hbar_part(1) == poisson(a, b) * (Coefficient::i() * Coefficient::hbar() * Coefficient(Rational(1, 2))));
    // Real symbols: conj(a*b) = b*a.
    CHECK(star(a, b).conj() == star(b, a));
    CHECK(moyal_bracket(a, b) == -moyal_bracket(b, a));
    CHECK(moyal_bracket(a, b).hbar_part(0) == poisson(a, b));
    // Bracket is a derivation of the star product.
    CHECK(moyal_bracket(a, star(b, c)) == star(moyal_bracket(a, b), c) + star(b, moyal_bracket(a, c)));
    CHECK((moyal_bracket(a, moyal_bracket(b, c)) + moyal_bracket(b, moyal_bracket(c, a)) +
           moyal_bracket(c, moyal_bracket(a, b)))
              .is_zero());
  }
}

TEST_CASE("quadratic generators act classically", "[moyal][property]") {
  std::mt19937_64 rng(29);
  auto sp = test::space2();
  for (int trial = 0; trial < 20; ++trial) {
    Symbol quad = random_polynomial(sp, 2, 4, rng), a = random_polynomial(sp, 4, 4, rng);
    CHECK(moyal_bracket(quad, a) == poisson(quad, a));
  }
}

TEST_CASE("star exponential classicality on the fixture histories", "[moyal]") {
  ExtendedSystem sys = fixture_coupled_particles();
  Symbol q1h = history_observable(sys, Symbol::coordinate(sys.base_space, "q1"));
  Symbol p1h = history_observable(sys, Symbol::coordinate(sys.base_space, "p1"));
  Symbol q2h = history_observable(sys, Symbol::coordinate(sys.base_space, "q2"));
  Symbol p2h = history_observable(sys, Symbol::coordinate(sys.base_space, "p2"));
  CHECK(star_exp_classical_check(q1h, 6));
  CHECK(star_exp_classical_check(p1h, 6));
  CHECK(star_exp_classical_check(p2h, 6));
  CHECK(star_exp_classical_check(S("q1 + p1", test::space2()), 6));

  // q2's history is linear in A2, so the square is still classical; the cube is not.
  CHECK(star_power(q2h, 2) == pow(q2h, 2));
  auto report = star_exp_classical_report(q2h, 6);
  CHECK_FALSE(report.classical);
  CHECK(report.first_failure == 3);
  REQUIRE(report.remainder);
  const auto& H = sys.history_space;
  CHECK(*report.remainder == S("(1/2)*hbar^2*k^2*B2*t^3/M", H));
  auto series = star_exp_series(q2h, 3);
  REQUIRE(series.size() == 4);
  CHECK(series[0] == Symbol(H, Coefficient(1L)));
  CHECK(series[1] == q2h);
  CHECK(series[3] - pow(q2h, 3) == *report.remainder);
}
