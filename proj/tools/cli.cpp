#include "cli.hpp"

#include "phasestar/distributions.hpp"
#include "phasestar/errors.hpp"
#include "phasestar/grid.hpp"
#include "phasestar/moyal.hpp"
#include "phasestar/parametrized.hpp"
#include "phasestar/sampling.hpp"
#include "phasestar/snapshot.hpp"
#include "phasestar/symbol_io.hpp"
#include "phasestar/system_file.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

namespace phasestar::cli {

using nlohmann::json;

namespace {

struct Row {
  std::string suite, tag, identity, status, residual;
};

struct LoadedSystem {
  std::string label;
  bool fixture = false;
  int max_order = kDefaultMaxOrder;
  std::map<std::string, Rational> params;
  ExtendedSystem sys;
};

LoadedSystem load(const std::string& fixture, const std::string& system, bool histories = true) {
  if (!fixture.empty() && !system.empty()) throw InputError("give either --fixture or --system, not both");
  if (!fixture.empty()) {
    if (fixture != "coupled") throw InputError("unknown fixture '" + fixture + "' (available: coupled)");
    return LoadedSystem{.label = "fixture:coupled", .fixture = true, .max_order = kDefaultMaxOrder, .params = {},
                        .sys = fixture_coupled_particles()};
  }
  if (system.empty()) throw InputError("a system is required (--fixture coupled or --system <file|h0=...>)");
  SystemDefinition def = std::filesystem::exists(system) ? load_system(system) : parse_inline_system(system);
  ExtendedSystem sys = histories ? with_histories(parametrize(def.H0), def.max_order) : parametrize(def.H0);
  return LoadedSystem{.label = "h0 = " + to_string(def.H0), .fixture = false, .max_order = def.max_order,
                      .params = def.params, .sys = std::move(sys)};
}

void check(std::vector<Row>& rows, const std::string& suite, const std::string& tag, const std::string& identity,
           const Symbol& lhs, const Symbol& rhs) {
  Symbol r = lhs - rhs;
  rows.push_back({suite, tag, identity, r.is_zero() ? "pass" : "fail", to_string(r)});
}

void note(std::vector<Row>& rows, const std::string& suite, const std::string& tag, const std::string& identity,
          const std::string& detail) {
  rows.push_back({suite, tag, identity, "info", detail});
}

void suite_algebra(const LoadedSystem& L, std::vector<Row>& rows) {
  const auto& s = L.sys;
  const auto& E = s.extended_space;
  const auto& H = *s.histories;
  Symbol one(E, Coefficient(1L)), zero(E);
  const std::size_t n = s.dof();
  auto A = [&](std::size_t j) { return s.history_A_name(j); };
  auto B = [&](std::size_t j) { return s.history_B_name(j); };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      check(rows, "algebra", "heisenberg-algebra", "[" + A(i) + ", " + B(j) + "]_M = " + (i == j ? "1" : "0"),
            moyal_bracket(H.A[i], H.B[j]), i == j ? one : zero);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      check(rows, "algebra", "heisenberg-algebra", "[" + A(i) + ", " + A(j) + "]_M = 0", moyal_bracket(H.A[i], H.A[j]), zero);
      check(rows, "algebra", "heisenberg-algebra", "[" + B(i) + ", " + B(j) + "]_M = 0", moyal_bracket(H.B[i], H.B[j]), zero);
    }
  for (std::size_t j = 0; j < n; ++j) {
    check(rows, "algebra", "constraint-commutes", "[phi, " + A(j) + "]_M = 0", moyal_bracket(s.constraint, H.A[j]), zero);
    check(rows, "algebra", "constraint-commutes", "[phi, " + B(j) + "]_M = 0", moyal_bracket(s.constraint, H.B[j]), zero);
  }
  check(rows, "algebra", "time-conjugate", "[t, phi]_M = 1", moyal_bracket(Symbol::coordinate(E, "t"), s.constraint), one);
}

void suite_histories(const LoadedSystem& L, std::vector<Row>& rows) {
  const auto& s = L.sys;
  const auto& E = s.extended_space;
  const auto& H = *s.histories;
  if (L.fixture) {
    for (const auto& [name, text] : fixture_reference().histories) {
      std::size_t j = 0;
      bool isA = name[0] == 'A';
      for (; j < s.dof(); ++j)
        if ((isA ? s.history_A_name(j) : s.history_B_name(j)) == name) break;
      check(rows, "histories", "history-table", name + " = " + text, isA ? H.A[j] : H.B[j], parse_symbol(text, E));
    }
  }
  // A(t = 0) = q, B(t = 0) = p
  const Variable t = Variable::coord(E->index("t"));
  for (std::size_t j = 0; j < s.dof(); ++j) {
    check(rows, "histories", "initial-data", s.history_A_name(j) + "(t=0) = " + s.position_name(j), H.A[j].substitute(t, Symbol(E)),
          Symbol::coordinate(E, s.position_name(j)));
    check(rows, "histories", "initial-data", s.history_B_name(j) + "(t=0) = " + s.momentum_name(j), H.B[j].substitute(t, Symbol(E)),
          Symbol::coordinate(E, s.momentum_name(j)));
  }
  if (L.fixture) {
    rows.push_back({"histories", "classical-histories", "classical histories equal quantum histories",
                    s.classical_equals_quantum ? "pass" : "fail", s.classical_equals_quantum ? "0" : "differ"});
  } else {
    note(rows, "histories", "classical-histories", "classical histories equal quantum histories",
         s.classical_equals_quantum ? "yes" : "no (quantum corrections present)");
  }
}

void suite_christoffel(const LoadedSystem& L, std::vector<Row>& rows) {
  const auto& s = L.sys;
  if (!s.T) throw InputError("system has no classical-history map");
  const auto& T = *s.T;
  const auto& E = T.target();
  Connection conn = christoffel(T);
  SymplecticMatrix J = jacobian_symplectic(T);
  auto canon = SymplecticMatrix::canonical(E);
  rows.push_back({"christoffel", "symplectic-invariance", "J' = J (canonical)", J == canon ? "pass" : "fail", J == canon ? "0" : "differs"});
  const std::size_t n = E->dim();
  auto label = [&](std::size_t i, std::size_t j, std::size_t k) {
    return "Gamma^{" + E->name(i) + "}_{" + E->name(j) + " " + E->name(k) + "}";
  };
  if (L.fixture) {
    ParseContext ctx;
    ctx.bindings.emplace("A1", s.histories->A[0]);
    std::vector<bool> listed(n * n * n, false);
    for (const auto& g : fixture_reference().connection) {
      std::size_t i = g.i - 1, j = g.j - 1, k = g.k - 1;
      listed[(i * n + j) * n + k] = true;
      check(rows, "christoffel", "connection-table", label(i, j, k) + " = " + g.value, conn(i, j, k), parse_symbol(g.value, E, ctx));
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j; k < n; ++k)
          if (!listed[(i * n + j) * n + k] && !conn(i, j, k).is_zero())
            check(rows, "christoffel", "connection-table", label(i, j, k) + " = 0", conn(i, j, k), Symbol(E));
  }
  bool symmetric = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        if (!(conn(i, j, k) == conn(i, k, j))) symmetric = false;
  rows.push_back({"christoffel", "connection-symmetry", "Gamma^i_{jk} = Gamma^i_{kj}", symmetric ? "pass" : "fail", symmetric ? "0" : "asymmetric"});
}

std::string render(const DeltaSymbol& d) { return to_string(d); }

void suite_stargen(const LoadedSystem& L, std::vector<Row>& rows) {
  const auto& s = L.sys;
  const auto& H = s.history_space;
  auto a = label_symbols(s, "a", H), b = label_symbols(s, "b", H);
  DeltaSymbol rho = build_stargenfunction(s, a, b, Representation::history);
  note(rows, "stargen", "fundamental-stargenfunction", "rho_{a,b} (history chart)", render(rho));
  auto residual_row = [&](const std::string& identity, const StargenResidual& r) {
    bool ok = r.left.is_zero() && r.right.is_zero() && r.hbar_safe;
    rows.push_back({"stargen", "stargenvalue-residual", identity, ok ? "pass" : "fail",
                    render(r.left) + " | " + render(r.right)});
  };
  Symbol zero(H);
  residual_row("phi * rho = rho * phi = 0", verify_stargen(rho, Symbol::coordinate(H, "phi"), zero, zero));
  for (std::size_t j = 0; j < s.dof(); ++j) {
    std::string An = s.history_A_name(j);
    std::string suffix = An.substr(1);
    residual_row(An + " * rho = a" + suffix + " rho, rho * " + An + " = b" + suffix + " rho",
                 verify_stargen(rho, Symbol::coordinate(H, An), a[j], b[j]));
  }
  if (s.T) {
    DeltaSymbol causal = build_stargenfunction(s, a, b, Representation::causal);
    note(rows, "stargen", "causal-stargenfunction", "rho'_{a,b} (causal chart)", render(causal));
    // The causal form is the delta product written with classical histories over (t, P_t, q, p).
    const auto& E = s.extended_space;
    auto ae = label_symbols(s, "a", E), be = label_symbols(s, "b", E);
    DeltaSymbol lit = DeltaSymbol::delta(s.constraint);
    Symbol L0(E);
    for (std::size_t j = 0; j < s.dof(); ++j) {
      L0 += (be[j] - ae[j]) * s.classical_histories->B[j];
      lit = lit * DeltaSymbol::delta(s.classical_histories->A[j] - (ae[j] + be[j]) * Coefficient(Rational(1, 2)));
    }
    lit = lit * DeltaSymbol::phase(L0);
    bool same = lit == causal;
    rows.push_back({"stargen", "causal-stargenfunction", "rho' = delta(phi) exp((i/hbar)(b-a).B) delta(A - (a+b)/2) over (t,P_t,q,p)",
                    same ? "pass" : "fail", same ? "0" : render(lit - causal)});
  }
  for (std::size_t j = 0; j < s.dof(); ++j) {
    const std::string& z = s.position_name(j);
    try {
      auto g = observable_stargenfunction(s, z, Symbol(H, Coefficient::param("x")), Representation::history);
      note(rows, "stargen", "observable-stargenfunction", "delta(" + z + "(t,A,B) - x)", render(g));
    } catch (const NotClosed& e) {
      note(rows, "stargen", "observable-stargenfunction", "delta(" + z + "(t,A,B) - x)", e.what());
    }
  }
}

void suite_covariance(const LoadedSystem& L, std::vector<Row>& rows, int pairs) {
  const auto& s = L.sys;
  const auto& E = s.extended_space;
  std::mt19937_64 rng(20240501);
  std::vector<std::pair<std::string, Diffeomorphism>> maps;
  maps.emplace_back("identity", Diffeomorphism::identity(E));
  maps.emplace_back("affine-canonical", random_affine_canonical(E, 6, rng));
  if (s.T) maps.emplace_back("history-map", *s.T);
  for (const auto& [name, d] : maps) {
    Connection conn = christoffel(d);
    SymplecticMatrix J = jacobian_symplectic(d);
    int bad = 0;
    std::string first;
    for (int k = 0; k < pairs; ++k) {
      Symbol a = random_polynomial(d.target(), 3, 4, rng), b = random_polynomial(d.target(), 3, 4, rng);
      Symbol x = covariant_star_pullback(a, b, d, 2), y = covariant_star_direct(a, b, J, conn, 2);
      for (int h = 0; h <= 2; ++h) {
        Symbol r = x.hbar_part(h) - y.hbar_part(h);
        if (!r.is_zero()) {
          if (!bad) first = "hbar^" + std::to_string(h) + ": " + to_string(r);
          ++bad;
        }
      }
    }
    rows.push_back({"covariance", "covariant-star", name + ": pullback star = direct covariant star through hbar^2 (" +
                                                        std::to_string(pairs) + " random pairs)",
                    bad ? "fail" : "pass", bad ? first : "0"});
  }
}

void print_rows(const std::string& label, const std::vector<Row>& rows, bool as_json, std::ostream& out) {
  int passed = 0, failed = 0;
  for (const auto& r : rows) {
    if (r.status == "pass") ++passed;
    if (r.status == "fail") ++failed;
  }
  if (as_json) {
    json j;
    j["system"] = label;
    j["passed"] = passed;
    j["failed"] = failed;
    j["ok"] = failed == 0;
    j["rows"] = json::array();
    for (const auto& r : rows)
      j["rows"].push_back({{"suite", r.suite}, {"tag", r.tag}, {"identity", r.identity}, {"status", r.status}, {"residual", r.residual}});
    out << j.dump(2) << "\n";
    return;
  }
  out << "system: " << label << "\n";
  for (const auto& r : rows) {
    std::string st = r.status == "pass" ? "PASS" : r.status == "fail" ? "FAIL" : "INFO";
    out << st << "  " << r.suite << "  [" << r.tag << "]  " << r.identity;
    if (r.status == "fail") out << "\n      residual: " << r.residual;
    if (r.status == "info") out << "\n      " << r.residual;
    out << "\n";
  }
  out << "summary: " << passed << " passed, " << failed << " failed\n";
}

// Expression context for star/mbracket: plain q/p spaces, or the fixture's extended chart with
// A1, A2, B1, B2, phi and H0 bound to their symbols.
struct ExprSpace {
  SpacePtr space;
  ParseContext ctx;
};

ExprSpace expr_space(const std::string& fixture, const std::vector<std::string>& texts) {
  if (fixture.empty()) return {infer_space(texts), {}};
  auto L = load(fixture, "");
  ExprSpace e{L.sys.extended_space, {}};
  for (std::size_t j = 0; j < L.sys.dof(); ++j) {
    e.ctx.bindings.emplace(L.sys.history_A_name(j), L.sys.histories->A[j]);
    e.ctx.bindings.emplace(L.sys.history_B_name(j), L.sys.histories->B[j]);
  }
  e.ctx.bindings.emplace("phi", L.sys.constraint);
  e.ctx.bindings.emplace("H0", L.sys.to_extended(L.sys.H0));
  return e;
}

Symbol with_hbar(const Symbol& s, const std::string& hbar) {
  if (hbar.empty()) return s;
  return s.substitute(Variable{Variable::Kind::parameter, ParamNames::hbar}, Symbol(s.space(), Coefficient(parse_rational(hbar))));
}

// ---- evolve ----

struct EvolveConfig {
  json raw;
  std::string representation, evolution;
  GridSpec grid;
  double hbar = 1, dt = 0, t0 = 0;
  long steps = 0, snapshot_every = 0;
  std::vector<std::pair<std::string, std::string>> slices;
  json initial;
};

template <class T>
T need(const json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("config: missing '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError(std::string("config: '") + key + "' has the wrong type");
  }
}

EvolveConfig parse_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot read config " + path);
  EvolveConfig c;
  try {
    c.raw = json::parse(is);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }
  const json& j = c.raw;
  c.representation = j.value("representation", std::string("schrodinger"));
  if (c.representation != "schrodinger" && c.representation != "causal")
    throw InputError("config: representation must be schrodinger or causal");
  c.evolution = j.value("evolution", std::string(c.representation == "causal" ? "liouville" : "moyal"));
  if (c.evolution != "moyal" && c.evolution != "liouville") throw InputError("config: evolution must be moyal or liouville");
  const json& g = need<json>(j, "grid");
  c.grid.boundary = parse_boundary(g.value("boundary", std::string("periodic")));
  c.grid.scheme = parse_scheme(g.value("scheme", std::string("spectral")));
  c.grid.threads = g.value("threads", 1u);
  for (const auto& a : need<json>(g, "axes"))
    c.grid.axes.push_back(Axis{need<std::string>(a, "name"), need<double>(a, "min"), need<double>(a, "max"), need<std::size_t>(a, "points")});
  c.grid.validate();
  c.hbar = j.value("hbar", 1.0);
  c.t0 = j.value("t0", 0.0);
  c.dt = need<double>(j, "dt");
  c.steps = need<long>(j, "steps");
  c.snapshot_every = j.value("snapshot_every", c.steps);
  if (!(c.hbar > 0) || !(c.dt > 0) || c.steps < 0 || c.snapshot_every <= 0)
    throw InputError("config: hbar and dt must be positive, steps non-negative, snapshot_every positive");
  for (const auto& s : j.value("slices", json::array())) {
    if (!s.is_array() || s.size() != 2) throw InputError("config: each slice is a pair of axis names");
    c.slices.emplace_back(s[0].get<std::string>(), s[1].get<std::string>());
  }
  c.initial = need<json>(j, "initial");
  return c;
}

// Wigner function of a product of coherent Gaussians centred at (q_j, p_j) with width s.
GridState initial_state(const EvolveConfig& c, const SpacePtr& base) {
  const json& in = c.initial;
  std::string type = need<std::string>(in, "type");
  double s = in.value("width", 1.0), hb = c.hbar;
  std::map<std::string, double> center;
  if (in.contains("center"))
    for (auto& [k, v] : in["center"].items()) center[k] = v.get<double>();
  std::vector<std::pair<std::size_t, std::size_t>> axes;  // (q axis, p axis)
  for (auto [q, p] : base->pairs()) axes.emplace_back(c.grid.axis(base->name(q)), c.grid.axis(base->name(p)));
  auto cq = [&](std::size_t pair) { return center.count(base->name(base->pairs()[pair].first)) ? center.at(base->name(base->pairs()[pair].first)) : 0.0; };
  auto cp = [&](std::size_t pair) { return center.count(base->name(base->pairs()[pair].second)) ? center.at(base->name(base->pairs()[pair].second)) : 0.0; };
  if (type == "gaussian") {
    return GridState::sample(c.grid, [&](const std::vector<double>& x) {
      double v = 1;
      for (std::size_t k = 0; k < axes.size(); ++k) {
        double dq = x[axes[k].first] - cq(k), dp = x[axes[k].second] - cp(k);
        v *= std::exp(-dq * dq / (s * s) - s * s * dp * dp / (hb * hb)) / (std::numbers::pi * hb);
      }
      return v;
    });
  }
  if (type == "odd-superposition") {
    if (axes.size() != 1) throw InputError("odd-superposition initial data is one degree of freedom only");
    double a0 = need<double>(in, "separation") / 2;
    double N2 = 1 / (2 * (1 - std::exp(-a0 * a0 / (s * s))));
    return GridState::sample(c.grid, [&](const std::vector<double>& x) {
      double A = x[axes[0].first] - cq(0), B = x[axes[0].second] - cp(0);
      return N2 / (std::numbers::pi * hb) *
             (std::exp(-(A - a0) * (A - a0) / (s * s)) + std::exp(-(A + a0) * (A + a0) / (s * s)) -
              2 * std::exp(-A * A / (s * s)) * std::cos(2 * a0 * B / hb)) *
             std::exp(-s * s * B * B / (hb * hb));
    });
  }
  throw InputError("config: unknown initial type '" + type + "' (gaussian, odd-superposition)");
}

std::string describe_term(const BracketOperator::Term& t, const SpacePtr&, const GridSpec& g) {
  std::ostringstream os;
  os << "(" << to_string(t.coefficient) << ") * d";
  for (std::size_t a = 0; a < t.orders.size(); ++a)
    for (int k = 0; k < t.orders[a]; ++k) os << "/d" << g.axes[a].name;
  os << " f";
  return os.str();
}

int cmd_evolve(const std::string& config_path, const std::string& out_dir, const std::string& hbar_flag, bool as_json,
               std::ostream& out, std::ostream& err) {
  EvolveConfig c = parse_config(config_path);
  if (!hbar_flag.empty()) c.hbar = parse_rational(hbar_flag).get_d();
  const json& sj = need<json>(c.raw, "system");
  LoadedSystem L = load(sj.value("fixture", std::string()),
                        sj.contains("file") ? sj["file"].get<std::string>() : sj.value("inline", std::string()), false);
  std::map<std::string, double> params;
  for (const auto& [k, v] : L.params) params[k] = v.get_d();
  if (c.raw.contains("params"))
    for (auto& [k, v] : c.raw["params"].items()) params[k] = v.get<double>();
  const Symbol& H0 = L.sys.H0;

  BracketOperator moyal(H0, c.grid, params, c.hbar, BracketOrder::moyal);
  BracketOperator liouville(H0, c.grid, params, c.hbar, BracketOrder::poisson);
  const BracketOperator& op = c.evolution == "moyal" ? moyal : liouville;
  double cfl = cfl_number(H0, c.grid, params, c.dt);
  if (cfl > 1.0) err << "warning: CFL number " << cfl << " exceeds 1; the run may be unstable\n";

  std::filesystem::create_directories(out_dir);
  GridState f = initial_state(c, L.sys.base_space);
  f.time = c.t0;
  const double n0 = normalize_check(f);

  auto rhs_gap = [&](const GridState& g) {
    std::vector<double> m, l;
    moyal.apply(g, m);
    liouville.apply(g, l);
    double d = 0, ln = 0;
    for (std::size_t k = 0; k < m.size(); ++k) {
      d += (m[k] - l[k]) * (m[k] - l[k]);
      ln += l[k] * l[k];
    }
    double dv = c.grid.cell_volume();
    return std::make_pair(std::sqrt(d * dv), std::sqrt(ln * dv));
  };

  json snaps = json::array();
  auto snapshot = [&](long step) {
    char name[64];
    std::snprintf(name, sizeof name, "snap_%06ld.psg", step);
    write_snapshot((std::filesystem::path(out_dir) / name).string(), f);
    json s{{"file", name}, {"step", step}, {"time", f.time}, {"norm", normalize_check(f)}, {"checksum", hex64(checksum(f))}};
    json sl = json::array();
    for (const auto& [x, y] : c.slices) {
      char sn[128];
      std::snprintf(sn, sizeof sn, "slice_%06ld_%s_%s.dat", step, x.c_str(), y.c_str());
      write_gnuplot_slice((std::filesystem::path(out_dir) / sn).string(), f, x, y);
      sl.push_back(sn);
    }
    s["slices"] = sl;
    snaps.push_back(s);
  };

  auto [gap0, lnorm0] = rhs_gap(f);
  snapshot(0);
  Rk4 rk(op);
  int code = kPass;
  std::string abort_message;
  long done = 0;
  try {
    for (long k = 1; k <= c.steps; ++k) {
      rk.step(f, c.dt);
      done = k;
      if (k % c.snapshot_every == 0 || k == c.steps) snapshot(k);
    }
  } catch (const NumericalAbort& e) {
    code = kNumericalAbort;
    abort_message = e.what();
  }
  auto [gap1, lnorm1] = rhs_gap(f);

  json terms = json::array();
  for (const auto& t : moyal.terms()) {
    int order = 0;
    for (int o : t.orders) order += o;
    if (order > 1) terms.push_back(describe_term(t, H0.space(), c.grid));
  }
  json manifest{
      {"config", c.raw},
      {"system", L.label},
      {"representation", c.representation},
      {"evolution", c.evolution},
      {"grid",
       {{"boundary", to_string(c.grid.boundary)},
        {"scheme", to_string(c.grid.scheme)},
        {"axes", [&] {
           json a = json::array();
           for (const auto& x : c.grid.axes)
             a.push_back({{"name", x.name}, {"min", x.min}, {"max", x.max}, {"points", x.points}, {"spacing", x.spacing()}});
           return a;
         }()}}},
      {"hbar", c.hbar},
      {"dt", c.dt},
      {"steps", c.steps},
      {"steps_completed", done},
      {"cfl", cfl},
      {"snapshots", snaps},
      {"summary",
       {{"norm_initial", n0},
        {"norm_final", normalize_check(f)},
        {"norm_drift", normalize_check(f) - n0},
        {"moyal_minus_liouville_l2_initial", gap0},
        {"moyal_minus_liouville_relative_initial", lnorm0 > 0 ? gap0 / lnorm0 : 0.0},
        {"moyal_minus_liouville_l2_final", gap1},
        {"moyal_minus_liouville_relative_final", lnorm1 > 0 ? gap1 / lnorm1 : 0.0},
        {"correction_terms", terms}}}};
  if (code == kNumericalAbort) manifest["abort"] = abort_message;
  std::ofstream(std::filesystem::path(out_dir) / "manifest.json") << manifest.dump(2) << "\n";
  if (as_json) {
    out << manifest["summary"].dump(2) << "\n";
  } else {
    out << "steps: " << done << "/" << c.steps << "  t = " << f.time << "\n";
    out << "norm drift: " << normalize_check(f) - n0 << "\n";
    out << "moyal - liouville (relative, initial): " << (lnorm0 > 0 ? gap0 / lnorm0 : 0.0) << "\n";
    for (const auto& t : terms) out << "correction term: " << t.get<std::string>() << "\n";
  }
  if (code == kNumericalAbort) err << "numerical abort: " << abort_message << "\n";
  return code;
}

void emit_error(const std::string& kind, const std::string& message, std::optional<int> order, bool as_json,
                std::ostream& out, std::ostream& err) {
  if (as_json) {
    json e{{"kind", kind}, {"message", message}};
    if (order) e["order"] = *order;
    out << json{{"error", e}}.dump(2) << "\n";
  } else {
    err << "error (" << kind << "): " << message << "\n";
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Phase-space star calculus for parametrized systems"};
  app.require_subcommand(1);
  bool as_json = false;
  std::string hbar;
  app.add_flag("--json", as_json, "JSON output");
  app.add_option("--hbar", hbar, "numeric hbar (rational or decimal)");

  std::string fixture, system, suite = "all", config, out_dir = "run";
  std::vector<std::string> exprs;
  int pairs = 20;

  auto* verify = app.add_subcommand("verify", "run identity suites");
  verify->add_option("--fixture", fixture, "built-in system (coupled)");
  verify->add_option("--system", system, "system file or inline h0=...");
  verify->add_option("--suite", suite, "algebra|histories|christoffel|stargen|covariance|all")
      ->check(CLI::IsMember({"algebra", "histories", "christoffel", "stargen", "covariance", "all"}));
  verify->add_option("--pairs", pairs, "random pairs per map in the covariance suite")->check(CLI::PositiveNumber);

  auto* star_cmd = app.add_subcommand("star", "print a * b");
  auto* mbr_cmd = app.add_subcommand("mbracket", "print the Moyal bracket [a, b]_M");
  for (auto* c : {star_cmd, mbr_cmd}) {
    c->add_option("exprs", exprs, "two expressions")->expected(2)->required();
    c->add_option("--fixture", fixture, "bind A1, A2, B1, B2, phi, H0 from a built-in system");
  }

  auto* chr = app.add_subcommand("christoffel", "connection of a coordinate map");
  chr->add_option("--fixture", fixture, "built-in system (coupled)");
  chr->add_option("--system", system, "system file or inline h0=...");

  auto* hist = app.add_subcommand("histories", "quantum and classical histories");
  hist->add_option("--fixture", fixture, "built-in system (coupled)");
  hist->add_option("--system", system, "system file or inline h0=...");

  auto* cmap = app.add_subcommand("causal-map", "classical-history map between the charts");
  cmap->add_option("--fixture", fixture, "built-in system (coupled)");
  cmap->add_option("--system", system, "system file or inline h0=...");

  auto* evolve = app.add_subcommand("evolve", "grid evolution with snapshots and manifest");
  evolve->add_option("--config", config, "JSON run configuration")->required();
  evolve->add_option("--out", out_dir, "output directory");

  for (auto* c : app.get_subcommands({})) c->fallthrough();
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kPass;
  } catch (const CLI::ParseError& e) {
    emit_error("usage", e.what(), std::nullopt, as_json, out, err);
    return kInputError;
  }

  try {
    if (*verify) {
      LoadedSystem L = load(fixture, system);
      std::vector<Row> rows;
      bool all = suite == "all";
      if (all || suite == "histories") suite_histories(L, rows);
      if (all || suite == "algebra") suite_algebra(L, rows);
      if (all || suite == "christoffel") suite_christoffel(L, rows);
      if (all || suite == "stargen") suite_stargen(L, rows);
      if (all || suite == "covariance") suite_covariance(L, rows, pairs);
      print_rows(L.label, rows, as_json, out);
      for (const auto& r : rows)
        if (r.status == "fail") return kIdentityFailure;
      return kPass;
    }
    if (*star_cmd || *mbr_cmd) {
      ExprSpace e = expr_space(fixture, exprs);
      Symbol a = parse_symbol(exprs[0], e.space, e.ctx), b = parse_symbol(exprs[1], e.space, e.ctx);
      Symbol r = with_hbar(*star_cmd ? star(a, b) : moyal_bracket(a, b), hbar);
      if (as_json)
        out << json{{"result", to_string(r)}}.dump() << "\n";
      else
        out << to_string(r) << "\n";
      return kPass;
    }
    if (*chr) {
      LoadedSystem L = load(fixture, system);
      const auto& T = *L.sys.T;
      Connection conn = christoffel(T);
      const auto& E = T.target();
      json rows = json::array();
      for (std::size_t i = 0; i < E->dim(); ++i)
        for (std::size_t j = 0; j < E->dim(); ++j)
          for (std::size_t k = j; k < E->dim(); ++k) {
            if (conn(i, j, k).is_zero()) continue;
            std::string lhs = "Gamma^{" + E->name(i) + "}_{" + E->name(j) + " " + E->name(k) + "}";
            if (as_json)
              rows.push_back({{"i", E->name(i)}, {"j", E->name(j)}, {"k", E->name(k)}, {"value", to_string(conn(i, j, k))}});
            else
              out << lhs << " = " << to_string(conn(i, j, k)) << "\n";
          }
      if (as_json) out << json{{"system", L.label}, {"connection", rows}}.dump(2) << "\n";
      return kPass;
    }
    if (*hist) {
      LoadedSystem L = load(fixture, system);
      const auto& s = L.sys;
      json j;
      for (std::size_t k = 0; k < s.dof(); ++k) {
        j["quantum"][s.history_A_name(k)] = to_string(s.histories->A[k]);
        j["quantum"][s.history_B_name(k)] = to_string(s.histories->B[k]);
        j["classical"][s.history_A_name(k)] = to_string(s.classical_histories->A[k]);
        j["classical"][s.history_B_name(k)] = to_string(s.classical_histories->B[k]);
      }
      j["classical_equals_quantum"] = s.classical_equals_quantum;
      if (as_json) {
        out << j.dump(2) << "\n";
      } else {
        for (std::size_t k = 0; k < s.dof(); ++k) {
          out << s.history_A_name(k) << " = " << to_string(s.histories->A[k]) << "\n";
          out << s.history_B_name(k) << " = " << to_string(s.histories->B[k]) << "\n";
        }
        out << "classical histories " << (s.classical_equals_quantum ? "coincide" : "differ") << "\n";
      }
      return kPass;
    }
    if (*cmap) {
      LoadedSystem L = load(fixture, system);
      const auto& T = *L.sys.T;
      json j;
      for (std::size_t i = 0; i < T.target()->dim(); ++i) j["forward"][T.target()->name(i)] = to_string(T.forward()[i]);
      for (std::size_t i = 0; i < T.source()->dim(); ++i) j["inverse"][T.source()->name(i)] = to_string(T.inverse()[i]);
      if (as_json) {
        out << j.dump(2) << "\n";
      } else {
        for (std::size_t i = 0; i < T.target()->dim(); ++i)
          out << T.target()->name(i) << " = " << to_string(T.forward()[i]) << "\n";
        for (std::size_t i = 0; i < T.source()->dim(); ++i)
          out << T.source()->name(i) << " = " << to_string(T.inverse()[i]) << "\n";
      }
      return kPass;
    }
    if (*evolve) return cmd_evolve(config, out_dir, hbar, as_json, out, err);
  } catch (const NonTerminatingFlow& e) {
    emit_error("non-terminating-flow", e.what(), e.order(), as_json, out, err);
    return kInputError;
  } catch (const ParseError& e) {
    emit_error("parse", e.what(), std::nullopt, as_json, out, err);
    return kInputError;
  } catch (const InputError& e) {
    emit_error("input", e.what(), std::nullopt, as_json, out, err);
    return kInputError;
  } catch (const NumericalAbort& e) {
    emit_error("numerical-abort", e.what(), std::nullopt, as_json, out, err);
    return kNumericalAbort;
  } catch (const NotClosed& e) {
    emit_error("not-closed", e.what(), std::nullopt, as_json, out, err);
    return kIdentityFailure;
  }
  return kPass;
}

}  // namespace phasestar::cli
