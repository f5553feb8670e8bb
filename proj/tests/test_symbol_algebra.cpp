#include "support.hpp"

#include "phasestar/covariant.hpp"
#include "phasestar/errors.hpp"
#include "phasestar/parametrized.hpp"
#include "phasestar/sampling.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace phasestar;
using test::S;

TEST_CASE("gauss rationals multiply and invert exactly", "[coefficient]") {
  GaussRational a(Rational(1, 2), Rational(3)), b(Rational(-2), Rational(1, 3));
  GaussRational prod = a * b;
  CHECK(prod.re == Rational(-2));
  CHECK(prod.im == Rational(-35, 6));
  CHECK(a * a.inverse() == GaussRational(1L));
  CHECK_THROWS(GaussRational().inverse());
}

TEST_CASE("coefficient ring keeps Laurent hbar powers", "[coefficient]") {
  Coefficient h = Coefficient::hbar();
  Coefficient x = h * Coefficient::hbar(-1);
  CHECK(x == Coefficient(1L));
  Coefficient y = Coefficient::hbar(-2) + Coefficient::i() * Coefficient::hbar(3);
  CHECK(y.min_hbar_power() == -2);
  CHECK(y.max_hbar_power() == 3);
  CHECK(y.hbar_part(3) == Coefficient::i() * Coefficient::hbar(3));
  CHECK(y.with_hbar_sign_flipped() == Coefficient::hbar(-2) - Coefficient::i() * Coefficient::hbar(3));
  CHECK(to_string(y) == "1/hbar^2 + i*hbar^3");
  Coefficient M = Coefficient::param("M");
  CHECK((M * M.inverse()) == Coefficient(1L));
  CHECK_FALSE((M + Coefficient(1L)).invertible());
  auto [re, im] = (M * Coefficient::hbar(2) + Coefficient::i()).evaluate({{"M", 3.0}, {"hbar", 0.5}});
  CHECK(re == Catch::Approx(0.75));
  CHECK(im == 1.0);
  CHECK_THROWS(M.evaluate({}));
}

TEST_CASE("parse and print round trip", "[symbol][io]") {
  auto sp = test::space2();
  for (const char* text : {"q1*p1 + (1/2)*i*hbar", "q1^2*p2 - 3*k*q2 + 1", "-(1/4)*hbar^2*k*q1", "0"}) {
    Symbol s = S(text, sp);
    CHECK(to_string(S(to_string(s), sp)) == to_string(s));
  }
  CHECK(to_string(S("p1*q1 + i*hbar/2", sp)) == "q1*p1 + (1/2)*i*hbar");
  CHECK(to_string(S("(q1 + p1)^2", sp)) == "q1^2 + 2*q1*p1 + p1^2");
  CHECK(S("0.25*q1", sp) == S("q1/4", sp));
  CHECK(parse_rational("1e-3") == Rational(1, 1000));
  CHECK(parse_rational("-2/7") == Rational(-2, 7));
  CHECK_THROWS_AS(S("q1 + * p1", sp), ParseError);
  CHECK_THROWS_AS(S("q1^(1/2)", sp), ParseError);
}

TEST_CASE("space inference pairs q and p suffixes", "[symbol][io]") {
  auto sp = infer_space({"p2^2 + q1*p1", "q2"});
  CHECK(sp->coords() == std::vector<std::string>{"q1", "q2", "p1", "p2"});
  CHECK(sp->J(sp->index("q1"), sp->index("p1")) == 1);
  CHECK(sp->J(sp->index("p2"), sp->index("q2")) == -1);
  CHECK(sp->J(sp->index("q1"), sp->index("p2")) == 0);
}

TEST_CASE("arithmetic on distinct spaces is rejected", "[symbol]") {
  auto a = Symbol::coordinate(test::space1(), "q");
  auto b = Symbol::coordinate(test::space2(), "q1");
  CHECK_THROWS_AS(a + b, SpaceMismatch);
  CHECK_THROWS_AS(a * b, SpaceMismatch);
}

TEST_CASE("partial derivatives and Poisson brackets of the coupled Hamiltonian", "[symbol]") {
  auto sp = test::space2();
  Symbol H = S("p1^2/(2*M) + p2^2/(2*m) + k*q1*p2^2", sp);
  CHECK(poisson(S("q1", sp), H) == S("p1/M", sp));
  CHECK(poisson(S("p2^2", sp), H) == Symbol(sp));
  CHECK(poisson(S("q2", sp), H) == S("p2/m + 2*k*q1*p2", sp));
  CHECK(poisson(S("p1", sp), H) == S("-k*p2^2", sp));
  CHECK(partial(H, "p2") == S("p2/m + 2*k*q1*p2", sp));
  CHECK(partial(S("q1^3*p1", sp), sp->index("q1"), 2) == S("6*q1*p1", sp));
  CHECK(poisson(S("q1", sp), S("p1", sp)) == Symbol(sp, Coefficient(1L)));
}

TEST_CASE("substitution composes polynomials", "[symbol]") {
  auto E = PhaseSpace::canonical({"t", "q1", "q2"}, {"P_t", "p1", "p2"});
  auto Hs = PhaseSpace::canonical({"t", "A1", "A2"}, {"phi", "B1", "B2"});
  Symbol q1 = S("q1", E);
  Symbol image = S("A1 + B1*t/M - (k/(2*M))*B2^2*t^2", Hs);
  CHECK(substitute(q1, {{"q1", image}}) == image);
  Symbol phi_image = S("P_t + p1^2/(2*M) + p2^2/(2*m) + k*q1*p2^2", E);
  CHECK(substitute(S("phi", Hs), {{"phi", phi_image}}) == phi_image);
  CHECK_THROWS_AS(substitute(S("A1*phi", Hs), {{"phi", phi_image}}), InputError);
  CHECK(substitute_param(S("k*q1 + k^2", E), "k", Coefficient(Rational(1, 5))) == S("q1/5 + 1/25", E));
}

TEST_CASE("numeric evaluation", "[symbol]") {
  auto sp = test::space1();
  auto v = S("q^2*p + i*hbar*k", sp).evaluate({2.0, 3.0}, {{"hbar", 0.5}, {"k", 4.0}});
  CHECK(v.real() == 12.0);
  CHECK(v.imag() == 2.0);
}

TEST_CASE("polynomial ring axioms on random elements", "[symbol][property]") {
  std::mt19937_64 rng(7);
  auto sp = test::space2();
  for (int trial = 0; trial < 60; ++trial) {
    Symbol a = random_polynomial(sp, 3, 4, rng), b = random_polynomial(sp, 3, 4, rng), c = random_polynomial(sp, 2, 3, rng);
    CHECK(a + b == b + a);
    CHECK(a * b == b * a);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK((a - a).is_zero());
    CHECK(a * Symbol(sp, Coefficient(1L)) == a);
    CHECK(pow(a, 2) == a * a);
  }
}

TEST_CASE("derivation rules on random elements", "[symbol][property]") {
  std::mt19937_64 rng(11);
  auto sp = test::space2();
  for (int trial = 0; trial < 40; ++trial) {
    Symbol a = random_polynomial(sp, 3, 4, rng), b = random_polynomial(sp, 3, 4, rng), c = random_polynomial(sp, 3, 3, rng);
    for (std::size_t i = 0; i < sp->dim(); ++i) CHECK(partial(a * b, i) == partial(a, i) * b + a * partial(b, i));
    CHECK(poisson(a, b) == -poisson(b, a));
    CHECK(poisson(a, b * c) == poisson(a, b) * c + b * poisson(a, c));
    CHECK((poisson(a, poisson(b, c)) + poisson(b, poisson(c, a)) + poisson(c, poisson(a, b))).is_zero());
  }
}

TEST_CASE("substitution is a ring homomorphism", "[symbol][property]") {
  std::mt19937_64 rng(13);
  auto sp = test::space2();
  auto target = PhaseSpace::canonical({"x1", "x2"}, {"y1", "y2"});
  for (int trial = 0; trial < 30; ++trial) {
    std::map<std::string, Symbol> bind;
    for (const auto& n : sp->coords()) bind.emplace(n, random_polynomial(target, 2, 3, rng));
    Symbol a = random_polynomial(sp, 2, 3, rng), b = random_polynomial(sp, 2, 3, rng);
    CHECK(substitute(a * b, bind) == substitute(a, bind) * substitute(b, bind));
    CHECK(substitute(a + b, bind) == substitute(a, bind) + substitute(b, bind));
  }
}

TEST_CASE("random canonical maps preserve the Poisson bracket", "[symbol][property]") {
  std::mt19937_64 rng(17);
  auto sp = test::space2();
  for (int trial = 0; trial < 10; ++trial) {
    Diffeomorphism d = random_affine_canonical(sp, 5, rng);
    Symbol a = random_polynomial(sp, 3, 4, rng), b = random_polynomial(sp, 3, 4, rng);
    CHECK(d.to_source(poisson(a, b)) == poisson(d.to_source(a), d.to_source(b)));
  }
}
