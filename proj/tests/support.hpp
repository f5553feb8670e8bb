#pragma once

#include "phasestar/distributions.hpp"
#include "phasestar/symbol.hpp"
#include "phasestar/symbol_io.hpp"

#include <string>

namespace phasestar::test {

inline SpacePtr space1() { return PhaseSpace::canonical({"q"}, {"p"}); }
inline SpacePtr space2() { return PhaseSpace::canonical({"q1", "q2"}, {"p1", "p2"}); }

inline Symbol S(const std::string& text, const SpacePtr& space, const ParseContext& ctx = {}) {
  return parse_symbol(text, space, ctx);
}

}  // namespace phasestar::test

#include <catch2/catch_amalgamated.hpp>

template <>
struct Catch::StringMaker<phasestar::Symbol> {
  static std::string convert(const phasestar::Symbol& s) { return phasestar::to_string(s); }
};
template <>
struct Catch::StringMaker<phasestar::DeltaSymbol> {
  static std::string convert(const phasestar::DeltaSymbol& s) { return phasestar::to_string(s); }
};
