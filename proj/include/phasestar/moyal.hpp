#pragma once

#include "phasestar/symbol.hpp"

#include <optional>
#include <vector>

namespace phasestar {

// Flat Moyal product with {q,p} = 1. `max_order` truncates the bidifferential series
// (terms of order n carry hbar^n); the default runs it to termination.
Symbol star(const Symbol& a, const Symbol& b, int max_order = -1);

// Terms of the series with exactly order n.
Symbol star_term(const Symbol& a, const Symbol& b, int n);

// (a*b - b*a) / (i hbar), computed from the odd orders only.
Symbol moyal_bracket(const Symbol& a, const Symbol& b);

Symbol star_power(const Symbol& a, int n);

struct ClassicalityReport {
  bool classical = true;
  int first_failure = 0;                 // star power where a*...*a first differs from a^n
  std::optional<Symbol> remainder;       // star_power - a^n at that power
};

ClassicalityReport star_exp_classical_report(const Symbol& a, int max_n);
bool star_exp_classical_check(const Symbol& a, int max_n);

// [a^{*0}, a^{*1}, ..., a^{*k_order}]
std::vector<Symbol> star_exp_series(const Symbol& a, int k_order);

}  // namespace phasestar
