#pragma once

#include "phasestar/distributions.hpp"
#include "phasestar/symbol.hpp"

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace phasestar {

enum class Boundary { periodic, zero_padded };
enum class Scheme { spectral, fd4 };

std::string to_string(Boundary b);
std::string to_string(Scheme s);
Boundary parse_boundary(const std::string& s);
Scheme parse_scheme(const std::string& s);

// Sample i sits at min + i*spacing with spacing = (max - min)/points; for periodic grids
// max is identified with min.
struct Axis {
  std::string name;
  double min = 0;
  double max = 1;
  std::size_t points = 0;
  double spacing() const { return (max - min) / static_cast<double>(points); }
  double x(std::size_t i) const { return min + static_cast<double>(i) * spacing(); }
};

struct GridSpec {
  std::vector<Axis> axes;
  Boundary boundary = Boundary::periodic;
  Scheme scheme = Scheme::spectral;
  unsigned threads = 1;  // slab count for data-parallel loops; results do not depend on it

  void validate() const;  // throws InputError
  std::size_t size() const;
  std::size_t axis(const std::string& name) const;  // throws SpaceMismatch
  std::optional<std::size_t> find(const std::string& name) const;
  double cell_volume() const;
  // Row-major strides, last axis fastest.
  std::vector<std::size_t> strides() const;
  std::vector<double> point(std::size_t flat) const;
  friend bool operator==(const GridSpec& a, const GridSpec& b);
};

struct GridState {
  GridSpec spec;
  std::vector<double> values;
  double time = 0;
  std::optional<std::vector<double>> measure_weight;

  explicit GridState(GridSpec s);
  GridState(GridSpec s, std::vector<double> v, double t = 0);
  // Sample a function of the grid point.
  template <class F>
  static GridState sample(const GridSpec& s, F&& fn) {
    GridState g(s);
    for (std::size_t n = 0; n < g.values.size(); ++n) g.values[n] = fn(s.point(n));
    return g;
  }
};

// Real polynomial with numeric coefficients (parameters and hbar substituted).
class NumericPolynomial {
 public:
  NumericPolynomial() = default;
  // Coordinates of `s` are mapped to the given variable order; every coordinate s
  // depends on must appear there. Imaginary coefficients above 1e-14 throw InputError.
  NumericPolynomial(const Symbol& s, const std::vector<std::string>& variables, const std::map<std::string, double>& params);
  double operator()(const double* x) const;
  double operator()(const std::vector<double>& x) const { return (*this)(x.data()); }
  bool is_zero() const { return terms_.empty(); }

 private:
  struct Term {
    double c;
    std::vector<std::pair<std::size_t, int>> powers;
  };
  std::vector<Term> terms_;
};

// Derivatives along grid axes by the spec's scheme. Spectral plans are built once (FFTW_ESTIMATE,
// so plans and results are reproducible run to run).
class Differentiator {
 public:
  explicit Differentiator(const GridSpec& spec);
  ~Differentiator();
  Differentiator(const Differentiator&) = delete;
  Differentiator& operator=(const Differentiator&) = delete;

  // out = d^order f / dx_axis^order; out may alias in. Uses internal scratch buffers, so one
  // Differentiator must not be shared between threads.
  void apply(const double* in, double* out, std::size_t axis, int order) const;
  // Mixed derivative with per-axis orders.
  void apply(const double* in, double* out, const std::vector<int>& orders) const;
  const GridSpec& spec() const { return spec_; }

 private:
  struct Plans;
  GridSpec spec_;
  std::unique_ptr<Plans> plans_;
  void fd4(const double* in, double* out, std::size_t axis) const;
  void spectral(const double* in, double* out, std::size_t axis, int order) const;
};

class RhsOperator {
 public:
  virtual ~RhsOperator() = default;
  virtual void apply(const GridState& f, std::vector<double>& out) const = 0;
  virtual const GridSpec& spec() const = 0;
};

enum class BracketOrder { poisson, moyal };

// [H, f] as a finite sum of c(x) * D^gamma f with c sampled from analytic derivatives of H.
// Poisson keeps the first-order terms; Moyal keeps every odd order the polynomial allows.
class BracketOperator : public RhsOperator {
 public:
  BracketOperator(const Symbol& H, const GridSpec& spec, const std::map<std::string, double>& params, double hbar,
                  BracketOrder order);
  void apply(const GridState& f, std::vector<double>& out) const override;
  const GridSpec& spec() const override { return diff_.spec(); }

  struct Term {
    Symbol coefficient;        // symbolic, hbar and parameters unset
    double factor;             // numeric prefactor, hbar included
    std::vector<int> orders;   // derivative orders of f per grid axis
    std::vector<double> coef;  // coefficient sampled on the grid
  };
  const std::vector<Term>& terms() const { return terms_; }

 private:
  Differentiator diff_;
  std::vector<Term> terms_;
  mutable std::vector<double> scratch_;
};

GridState moyal_rhs(const Symbol& H, const GridState& f, const std::map<std::string, double>& params, double hbar);
GridState liouville_rhs(const Symbol& H, const GridState& f, const std::map<std::string, double>& params);

// Workspace-carrying RK4 stepper; throws NumericalAbort on the first non-finite value.
class Rk4 {
 public:
  explicit Rk4(const RhsOperator& rhs) : rhs_(rhs) {}
  void step(GridState& f, double dt);

 private:
  const RhsOperator& rhs_;
  std::vector<double> k_, acc_;
  std::optional<GridState> stage_;
};

GridState step_rk4(const RhsOperator& rhs, const GridState& f, double dt);

// Largest |velocity| * dt / spacing over the grid for a Hamiltonian flow; RK4 with
// fd4 or spectral derivatives stays stable below roughly 1 (documented heuristic).
double cfl_number(const Symbol& H, const GridSpec& spec, const std::map<std::string, double>& params, double dt);

// Sum of f * dmu over the grid (rectangle rule; equal to the trapezoid rule on periodic
// grids and on zero-padded data that vanishes at the edges). measure_weight is applied when present.
double normalize_check(const GridState& f);

// Interpolate the state on the hyperplane axis = value (trigonometric for spectral
// periodic grids, 4-point Lagrange otherwise). The axis is removed.
GridState slice(const GridState& f, const std::string& axis, double value);
// Integrate out every axis not listed in `keep`.
GridState marginal(const GridState& f, const std::vector<std::string>& keep);

// integral of f * rho dmu where rho is 1 or a product of unit-coefficient deltas
// delta(x_i - c_i) in distinct grid axes, with c_i numeric once `params` are set.
double probability(const GridState& f, const DeltaSymbol& rho, const std::map<std::string, double>& params = {});

double l2_norm(const GridState& f);
double l2_distance(const GridState& a, const GridState& b);

}  // namespace phasestar
