#pragma once

#include "phasestar/coefficient.hpp"
#include "phasestar/symbol.hpp"

#include <map>
#include <string>
#include <vector>

namespace phasestar {

// Key-value system definition:
//   # comment
//   positions = q1 q2
//   momenta   = p1 p2
//   h0        = p1^2/(2*M) + p2^2/(2*m) + k*q1*p2^2
//   param.M   = 1          (exact value, substituted into h0 on request)
//   max_order = 16
// positions/momenta may be omitted and are then inferred from h0.
struct SystemDefinition {
  std::vector<std::string> positions, momenta;
  std::string h0_text;
  std::map<std::string, Rational> params;
  int max_order = 16;

  SpacePtr space;
  Symbol H0;  // parameters left symbolic

  Symbol H0_with_params() const;
  std::map<std::string, double> numeric_params() const;
};

SystemDefinition parse_system(const std::string& text);
SystemDefinition load_system(const std::string& path);
// "h0=q^3" or "h0=p^2/2+q^2/2; param.k=1" on one line.
SystemDefinition parse_inline_system(const std::string& text);

}  // namespace phasestar
