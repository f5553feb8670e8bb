#pragma once

#include "phasestar/symbol.hpp"

#include <functional>
#include <map>
#include <string>
#include <string_view>

namespace phasestar {

// Canonical text: terms in graded-lex order of coordinates, real and imaginary parts
// as separate terms, e.g. "q1*p1 + (1/2)*i*hbar".
std::string to_string(const Symbol& s);
std::string to_string(const Coefficient& c);
std::string to_string(const Rational& r);

struct ParseContext {
  // Names that expand to a whole symbol (e.g. fixture histories A1, B1).
  std::map<std::string, Symbol> bindings;
  std::map<std::string, std::function<Symbol(const std::vector<Symbol>&)>> functions;
};

// Unknown identifiers become coefficient generators; `i` is the imaginary unit.
Symbol parse_symbol(std::string_view text, const SpacePtr& space, const ParseContext& ctx = {});

// Space guessed from identifiers: q<suffix> pairs with p<suffix>. Positions come first.
SpacePtr infer_space(const std::vector<std::string>& texts);

// Exact rational from "3", "-2/7", "0.25", "1e-3".
Rational parse_rational(std::string_view text);

}  // namespace phasestar
