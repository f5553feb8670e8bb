#include "phasestar/system_file.hpp"

#include "phasestar/errors.hpp"
#include "phasestar/symbol_io.hpp"

#include <fstream>
#include <sstream>

namespace phasestar {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

struct Raw {
  std::vector<std::string> positions, momenta;
  std::string h0_text;
  std::map<std::string, Rational> params;
  int max_order = 16;
};

SystemDefinition finish(Raw d) {
  if (d.h0_text.empty()) throw InputError("system definition has no h0");
  if (d.positions.size() != d.momenta.size()) throw InputError("positions and momenta differ in count");
  if (d.max_order < 1 || d.max_order > 64) throw InputError("max_order must lie in [1, 64]");
  SpacePtr space = d.positions.empty() ? infer_space({d.h0_text}) : PhaseSpace::canonical(d.positions, d.momenta);
  if (d.positions.empty())
    for (auto [q, p] : space->pairs()) {
      d.positions.push_back(space->name(q));
      d.momenta.push_back(space->name(p));
    }
  Symbol H0 = parse_symbol(d.h0_text, space);
  return SystemDefinition{.positions = std::move(d.positions),
                          .momenta = std::move(d.momenta),
                          .h0_text = std::move(d.h0_text),
                          .params = std::move(d.params),
                          .max_order = d.max_order,
                          .space = space,
                          .H0 = std::move(H0)};
}

void assign(Raw& d, const std::string& key, const std::string& value, int line) {
  auto where = [&] { return line > 0 ? " (line " + std::to_string(line) + ")" : std::string(); };
  if (key == "positions") {
    d.positions = words(value);
  } else if (key == "momenta") {
    d.momenta = words(value);
  } else if (key == "h0") {
    d.h0_text = value;
  } else if (key == "max_order") {
    try {
      d.max_order = std::stoi(value);
    } catch (const std::exception&) {
      throw InputError("max_order is not an integer" + where());
    }
  } else if (key.rfind("param.", 0) == 0 && key.size() > 6) {
    d.params[key.substr(6)] = parse_rational(value);
  } else {
    throw InputError("unknown key '" + key + "'" + where());
  }
}

}  // namespace

Symbol SystemDefinition::H0_with_params() const {
  Symbol h = H0;
  for (const auto& [name, v] : params)
    h = substitute_param(h, name, Coefficient(v));
  return h;
}

std::map<std::string, double> SystemDefinition::numeric_params() const {
  std::map<std::string, double> out;
  for (const auto& [name, v] : params) out[name] = v.get_d();
  return out;
}

SystemDefinition parse_system(const std::string& text) {
  Raw d;
  std::istringstream is(text);
  int line = 0;
  for (std::string raw; std::getline(is, raw);) {
    ++line;
    auto hash = raw.find('#');
    std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    auto eq = s.find('=');
    if (eq == std::string::npos) throw InputError("expected key = value (line " + std::to_string(line) + ")");
    assign(d, trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line);
  }
  return finish(std::move(d));
}

SystemDefinition load_system(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot read system file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_system(ss.str());
}

SystemDefinition parse_inline_system(const std::string& text) {
  Raw d;
  std::istringstream is(text);
  for (std::string part; std::getline(is, part, ';');) {
    part = trim(part);
    if (part.empty()) continue;
    auto eq = part.find('=');
    if (eq == std::string::npos) throw InputError("inline system entries are key=value separated by ';'");
    assign(d, trim(part.substr(0, eq)), trim(part.substr(eq + 1)), 0);
  }
  return finish(std::move(d));
}

}  // namespace phasestar
