#include "phasestar/grid.hpp"

#include "phasestar/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

namespace phasestar {

namespace {

// Runs fn(begin, end) over [0, n) split into `slabs` contiguous ranges. Each output element
// is produced by exactly one range, so the result is independent of the split.
template <class F>
void parallel_for(std::size_t n, unsigned slabs, F&& fn) {
  if (slabs <= 1 || n < 2 * slabs) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  std::size_t chunk = (n + slabs - 1) / slabs;
  for (std::size_t b = 0; b < n; b += chunk) pool.emplace_back([&, b] { fn(b, std::min(n, b + chunk)); });
  for (auto& t : pool) t.join();
}

// [outer][n][inner] view of a row-major array along one axis.
struct AxisView {
  std::size_t outer = 1, n = 1, inner = 1;
  AxisView(const GridSpec& s, std::size_t axis) {
    n = s.axes[axis].points;
    for (std::size_t a = 0; a < axis; ++a) outer *= s.axes[a].points;
    for (std::size_t a = axis + 1; a < s.axes.size(); ++a) inner *= s.axes[a].points;
  }
};

void check_finite(const std::vector<double>& v, double time) {
  for (std::size_t n = 0; n < v.size(); ++n)
    if (!std::isfinite(v[n])) {
      std::ostringstream os;
      os << "non-finite value at flat index " << n << " (t = " << time << ")";
      throw NumericalAbort(os.str());
    }
}

std::vector<double> weighted(const GridState& f) {
  std::vector<double> v = f.values;
  if (f.measure_weight)
    for (std::size_t n = 0; n < v.size(); ++n) v[n] *= (*f.measure_weight)[n];
  return v;
}

// Weights w_i with f(value) = sum_i w_i f_i along one axis: trigonometric interpolation on
// spectral grids, 4-point Lagrange otherwise.
std::vector<double> interpolation_weights(const GridSpec& spec, std::size_t axis, double value) {
  const auto& ax = spec.axes[axis];
  const std::size_t n = ax.points;
  std::vector<double> w(n, 0.0);
  if (spec.scheme == Scheme::spectral) {
    const double L = ax.max - ax.min;
    for (std::size_t i = 0; i < n; ++i) {
      double d = 2.0 * std::numbers::pi * (value - ax.x(i)) / L;
      double s = 1;
      for (std::size_t m = 1; m <= (n - 1) / 2; ++m) s += 2 * std::cos(static_cast<double>(m) * d);
      if (n % 2 == 0) s += std::cos(static_cast<double>(n / 2) * d);
      w[i] = s / static_cast<double>(n);
    }
    return w;
  }
  const bool periodic = spec.boundary == Boundary::periodic;
  const long N = static_cast<long>(n);
  double u = (value - ax.min) / ax.spacing();
  long i0 = static_cast<long>(std::floor(u)) - 1;
  for (long j = 0; j < 4; ++j) {
    double lj = 1;
    for (long m = 0; m < 4; ++m)
      if (m != j) lj *= (u - static_cast<double>(i0 + m)) / static_cast<double>(j - m);
    long idx = i0 + j;
    if (idx < 0 || idx >= N) {
      if (!periodic) continue;
      idx = ((idx % N) + N) % N;
    }
    w[static_cast<std::size_t>(idx)] += lj;
  }
  return w;
}

// sum_i w_i v[o][i][c] -> [o][c]
std::vector<double> contract(const GridSpec& spec, const std::vector<double>& vals, std::size_t axis,
                             const std::vector<double>& w) {
  AxisView v(spec, axis);
  std::vector<double> out(v.outer * v.inner, 0.0);
  for (std::size_t o = 0; o < v.outer; ++o)
    for (std::size_t i = 0; i < v.n; ++i) {
      if (w[i] == 0) continue;
      const double* row = vals.data() + (o * v.n + i) * v.inner;
      double* dst = out.data() + o * v.inner;
      for (std::size_t c = 0; c < v.inner; ++c) dst[c] += w[i] * row[c];
    }
  return out;
}

}  // namespace

std::string to_string(Boundary b) { return b == Boundary::periodic ? "periodic" : "zero-padded"; }
std::string to_string(Scheme s) { return s == Scheme::spectral ? "spectral" : "fd4"; }

Boundary parse_boundary(const std::string& s) {
  if (s == "periodic") return Boundary::periodic;
  if (s == "zero-padded" || s == "zero_padded") return Boundary::zero_padded;
  throw InputError("unknown boundary '" + s + "' (periodic, zero-padded)");
}

Scheme parse_scheme(const std::string& s) {
  if (s == "spectral") return Scheme::spectral;
  if (s == "fd4") return Scheme::fd4;
  throw InputError("unknown derivative scheme '" + s + "' (spectral, fd4)");
}

void GridSpec::validate() const {
  if (axes.empty()) throw InputError("grid has no axes");
  std::set<std::string> names;
  for (const auto& a : axes) {
    if (a.points < 8) throw InputError("axis '" + a.name + "' needs at least 8 points");
    if (!(a.max > a.min) || !std::isfinite(a.max - a.min)) throw InputError("axis '" + a.name + "' has a non-positive length");
    if (!names.insert(a.name).second) throw InputError("duplicate grid axis '" + a.name + "'");
  }
  if (scheme == Scheme::spectral && boundary != Boundary::periodic)
    throw InputError("spectral derivatives require a periodic boundary");
  if (threads == 0) throw InputError("thread count must be positive");
}

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.points;
  return n;
}

std::optional<std::size_t> GridSpec::find(const std::string& name) const {
  for (std::size_t k = 0; k < axes.size(); ++k)
    if (axes[k].name == name) return k;
  return std::nullopt;
}

std::size_t GridSpec::axis(const std::string& name) const {
  auto k = find(name);
  if (!k) throw SpaceMismatch("grid has no axis '" + name + "'");
  return *k;
}

double GridSpec::cell_volume() const {
  double v = 1;
  for (const auto& a : axes) v *= a.spacing();
  return v;
}

std::vector<std::size_t> GridSpec::strides() const {
  std::vector<std::size_t> s(axes.size(), 1);
  for (std::size_t k = axes.size(); k-- > 1;) s[k - 1] = s[k] * axes[k].points;
  return s;
}

std::vector<double> GridSpec::point(std::size_t flat) const {
  std::vector<double> x(axes.size());
  for (std::size_t k = axes.size(); k-- > 0;) {
    x[k] = axes[k].x(flat % axes[k].points);
    flat /= axes[k].points;
  }
  return x;
}

bool operator==(const GridSpec& a, const GridSpec& b) {
  if (a.axes.size() != b.axes.size() || a.boundary != b.boundary || a.scheme != b.scheme) return false;
  for (std::size_t k = 0; k < a.axes.size(); ++k) {
    const auto &x = a.axes[k], &y = b.axes[k];
    if (x.name != y.name || x.min != y.min || x.max != y.max || x.points != y.points) return false;
  }
  return true;
}

GridState::GridState(GridSpec s) : spec(std::move(s)) {
  spec.validate();
  values.assign(spec.size(), 0.0);
}

GridState::GridState(GridSpec s, std::vector<double> v, double t) : spec(std::move(s)), values(std::move(v)), time(t) {
  spec.validate();
  if (values.size() != spec.size()) throw InputError("grid values do not match the grid size");
}

NumericPolynomial::NumericPolynomial(const Symbol& s, const std::vector<std::string>& variables,
                                     const std::map<std::string, double>& params) {
  const auto& sp = *s.space();
  std::vector<std::optional<std::size_t>> slot(sp.dim());
  for (std::size_t i = 0; i < sp.dim(); ++i)
    for (std::size_t v = 0; v < variables.size(); ++v)
      if (variables[v] == sp.name(i)) slot[i] = v;
  for (const auto& t : s.terms()) {
    auto [re, im] = t.coeff.evaluate(params);
    if (std::abs(im) > 1e-14 * std::max(1.0, std::abs(re)))
      throw InputError("polynomial has an imaginary coefficient; a real Hamiltonian is required");
    Term term{re, {}};
    for (std::size_t i = 0; i < sp.dim(); ++i) {
      if (t.mono.e[i] == 0) continue;
      if (!slot[i]) throw SpaceMismatch("coordinate '" + sp.name(i) + "' has no grid axis");
      term.powers.emplace_back(*slot[i], t.mono.e[i]);
    }
    terms_.push_back(std::move(term));
  }
}

double NumericPolynomial::operator()(const double* x) const {
  double s = 0;
  for (const auto& t : terms_) {
    double v = t.c;
    for (auto [i, e] : t.powers)
      for (int k = 0; k < e; ++k) v *= x[i];
    s += v;
  }
  return s;
}

struct Differentiator::Plans {
  struct AxisPlan {
    fftw_plan r2c = nullptr, c2r = nullptr;
    std::size_t half = 0;
  };
  std::vector<AxisPlan> axes;
  std::vector<double> scratch;
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  ~Plans() {
    for (auto& a : axes) {
      if (a.r2c) fftw_destroy_plan(a.r2c);
      if (a.c2r) fftw_destroy_plan(a.c2r);
    }
    fftw_free(real);
    fftw_free(spec);
  }
};

Differentiator::Differentiator(const GridSpec& spec) : spec_(spec), plans_(std::make_unique<Plans>()) {
  spec_.validate();
  if (spec_.scheme != Scheme::spectral) return;
  std::size_t total = spec_.size(), cmax = 0;
  for (std::size_t a = 0; a < spec_.axes.size(); ++a) {
    AxisView v(spec_, a);
    cmax = std::max(cmax, v.outer * (v.n / 2 + 1) * v.inner);
  }
  plans_->real = fftw_alloc_real(total);
  plans_->spec = fftw_alloc_complex(cmax);
  for (std::size_t a = 0; a < spec_.axes.size(); ++a) {
    AxisView v(spec_, a);
    std::size_t half = v.n / 2 + 1;
    fftw_iodim dim{static_cast<int>(v.n), static_cast<int>(v.inner), static_cast<int>(v.inner)};
    fftw_iodim many_r[2] = {{static_cast<int>(v.outer), static_cast<int>(v.n * v.inner), static_cast<int>(half * v.inner)},
                            {static_cast<int>(v.inner), 1, 1}};
    fftw_iodim many_c[2] = {{static_cast<int>(v.outer), static_cast<int>(half * v.inner), static_cast<int>(v.n * v.inner)},
                            {static_cast<int>(v.inner), 1, 1}};
    Plans::AxisPlan p;
    p.half = half;
    p.r2c = fftw_plan_guru_dft_r2c(1, &dim, 2, many_r, plans_->real, plans_->spec, FFTW_ESTIMATE);
    p.c2r = fftw_plan_guru_dft_c2r(1, &dim, 2, many_c, plans_->spec, plans_->real, FFTW_ESTIMATE);
    if (!p.r2c || !p.c2r) throw Error("FFTW could not create a plan for axis '" + spec_.axes[a].name + "'");
    plans_->axes.push_back(p);
  }
}

Differentiator::~Differentiator() = default;

void Differentiator::fd4(const double* in, double* out, std::size_t axis) const {
  AxisView v(spec_, axis);
  const double inv = 1.0 / (12.0 * spec_.axes[axis].spacing());
  const bool periodic = spec_.boundary == Boundary::periodic;
  const long n = static_cast<long>(v.n);
  auto& tmp = plans_->scratch;
  tmp.resize(spec_.size());
  parallel_for(v.outer, spec_.threads, [&](std::size_t ob, std::size_t oe) {
    for (std::size_t o = ob; o < oe; ++o) {
      const double* base = in + o * v.n * v.inner;
      double* dst = tmp.data() + o * v.n * v.inner;
      auto at = [&](long i, std::size_t c) -> double {
        if (i < 0 || i >= n) {
          if (!periodic) return 0.0;
          i = ((i % n) + n) % n;
        }
        return base[static_cast<std::size_t>(i) * v.inner + c];
      };
      auto edge = [&](long i) {
        for (std::size_t c = 0; c < v.inner; ++c)
          dst[static_cast<std::size_t>(i) * v.inner + c] =
              (8.0 * (at(i + 1, c) - at(i - 1, c)) - (at(i + 2, c) - at(i - 2, c))) * inv;
      };
      for (long i = 0; i < std::min(2L, n); ++i) edge(i);
      for (long i = 2; i < n - 2; ++i) {
        const double* m2 = base + static_cast<std::size_t>(i - 2) * v.inner;
        const double* m1 = m2 + v.inner;
        const double* p1 = m1 + 2 * v.inner;
        const double* p2 = p1 + v.inner;
        double* d = dst + static_cast<std::size_t>(i) * v.inner;
        for (std::size_t c = 0; c < v.inner; ++c) d[c] = (8.0 * (p1[c] - m1[c]) - (p2[c] - m2[c])) * inv;
      }
      for (long i = std::max(2L, n - 2); i < n; ++i) edge(i);
    }
  });
  std::copy(tmp.begin(), tmp.end(), out);
}

void Differentiator::spectral(const double* in, double* out, std::size_t axis, int order) const {
  AxisView v(spec_, axis);
  const auto& p = plans_->axes[axis];
  const double L = spec_.axes[axis].max - spec_.axes[axis].min;
  std::copy(in, in + spec_.size(), plans_->real);
  fftw_execute(p.r2c);
  // (i k)^order / n per retained mode
  std::vector<std::complex<double>> mult(p.half);
  for (std::size_t m = 0; m < p.half; ++m) {
    double k = 2.0 * std::numbers::pi * static_cast<double>(m) / L;
    std::complex<double> ik(0.0, k), f(1.0, 0.0);
    for (int d = 0; d < order; ++d) f *= ik;
    if (v.n % 2 == 0 && m == v.n / 2 && order % 2 == 1) f = 0.0;
    mult[m] = f / static_cast<double>(v.n);
  }
  auto* c = reinterpret_cast<std::complex<double>*>(plans_->spec);
  for (std::size_t o = 0; o < v.outer; ++o)
    for (std::size_t m = 0; m < p.half; ++m) {
      auto* row = c + (o * p.half + m) * v.inner;
      for (std::size_t i = 0; i < v.inner; ++i) row[i] *= mult[m];
    }
  fftw_execute(p.c2r);
  std::copy(plans_->real, plans_->real + spec_.size(), out);
}

void Differentiator::apply(const double* in, double* out, std::size_t axis, int order) const {
  if (axis >= spec_.axes.size()) throw SpaceMismatch("derivative axis out of range");
  if (order == 0) {
    if (in != out) std::copy(in, in + spec_.size(), out);
    return;
  }
  if (spec_.scheme == Scheme::spectral) {
    spectral(in, out, axis, order);
    return;
  }
  fd4(in, out, axis);
  for (int k = 1; k < order; ++k) fd4(out, out, axis);
}

void Differentiator::apply(const double* in, double* out, const std::vector<int>& orders) const {
  const double* src = in;
  bool any = false;
  for (std::size_t a = 0; a < orders.size(); ++a) {
    if (orders[a] == 0) continue;
    apply(src, out, a, orders[a]);
    src = out;
    any = true;
  }
  if (!any && in != out) std::copy(in, in + spec_.size(), out);
}

BracketOperator::BracketOperator(const Symbol& H, const GridSpec& spec, const std::map<std::string, double>& params,
                                 double hbar, BracketOrder order)
    : diff_(spec) {
  const auto& sp = *H.space();
  std::vector<std::string> names;
  for (const auto& a : spec.axes) names.push_back(a.name);
  std::vector<std::size_t> axis_of(sp.dim());
  for (std::size_t i = 0; i < sp.dim(); ++i) axis_of[i] = spec.axis(sp.name(i));
  auto values = params;
  values["hbar"] = hbar;

  // Enumerate (alpha, beta) pair by pair; coefficient (i hbar/2)^{n-1} (-1)^{|beta|}/(alpha! beta!) for odd n.
  struct Partial {
    Symbol h;
    std::vector<int> orders;
    int n;
    int sign;
    Rational weight;
  };
  std::vector<Partial> stack{{H, std::vector<int>(spec.axes.size(), 0), 0, 1, Rational(1)}};
  for (auto [q, p] : sp.pairs()) {
    std::vector<Partial> next;
    for (const auto& s : stack) {
      Symbol ha = s.h;
      Rational afact(1);
      for (int a = 0;; ++a) {
        if (a > 0) {
          ha = partial(ha, q);
          afact *= a;
        }
        if (ha.is_zero()) break;
        Symbol hb = ha;
        Rational bfact(1);
        for (int b = 0;; ++b) {
          if (b > 0) {
            hb = partial(hb, p);
            bfact *= b;
          }
          if (hb.is_zero()) break;
          Partial t{hb, s.orders, s.n + a + b, (b % 2) ? -s.sign : s.sign, Rational(s.weight / (afact * bfact))};
          t.orders[axis_of[p]] += a;
          t.orders[axis_of[q]] += b;
          if (order == BracketOrder::poisson && t.n > 1) break;
          next.push_back(std::move(t));
        }
        if (order == BracketOrder::poisson && s.n + a > 1) break;
      }
    }
    stack = std::move(next);
  }
  for (auto& s : stack) {
    if (s.n % 2 == 0) continue;
    if (order == BracketOrder::poisson && s.n != 1) continue;
    Rational w = s.weight * s.sign;
    for (int k = 0; k < (s.n - 1) / 2; ++k) w *= Rational(-1, 4);
    double f = w.get_d() * std::pow(hbar, s.n - 1);
    NumericPolynomial poly(s.h, names, values);
    Term t{s.h * Coefficient(GaussRational(w), ParamMonomial::generator(ParamNames::hbar, s.n - 1)), f, s.orders,
           std::vector<double>(spec.size())};
    for (std::size_t n = 0; n < t.coef.size(); ++n) t.coef[n] = f * poly(spec.point(n));
    terms_.push_back(std::move(t));
  }
}

void BracketOperator::apply(const GridState& f, std::vector<double>& out) const {
  if (!(f.spec == spec())) throw SpaceMismatch("state grid differs from the operator grid");
  out.assign(f.values.size(), 0.0);
  auto& d = scratch_;
  d.resize(f.values.size());
  for (const auto& t : terms_) {
    diff_.apply(f.values.data(), d.data(), t.orders);
    parallel_for(out.size(), spec().threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t n = b; n < e; ++n) out[n] += t.coef[n] * d[n];
    });
  }
}

GridState moyal_rhs(const Symbol& H, const GridState& f, const std::map<std::string, double>& params, double hbar) {
  BracketOperator op(H, f.spec, params, hbar, BracketOrder::moyal);
  GridState r(f.spec);
  op.apply(f, r.values);
  r.time = f.time;
  return r;
}

GridState liouville_rhs(const Symbol& H, const GridState& f, const std::map<std::string, double>& params) {
  BracketOperator op(H, f.spec, params, 1.0, BracketOrder::poisson);
  GridState r(f.spec);
  op.apply(f, r.values);
  r.time = f.time;
  return r;
}

void Rk4::step(GridState& f, double dt) {
  if (!(dt > 0)) throw InputError("time step must be positive");
  const std::size_t N = f.values.size();
  if (!stage_ || !(stage_->spec == f.spec)) stage_.emplace(f.spec);
  acc_.assign(N, 0.0);
  const double w[4] = {1.0 / 6, 1.0 / 3, 1.0 / 3, 1.0 / 6};
  const double c[4] = {0.0, 0.5, 0.5, 1.0};
  for (int s = 0; s < 4; ++s) {
    if (s == 0) {
      rhs_.apply(f, k_);
    } else {
      for (std::size_t n = 0; n < N; ++n) stage_->values[n] = f.values[n] + c[s] * dt * k_[n];
      stage_->time = f.time + c[s] * dt;
      rhs_.apply(*stage_, k_);
    }
    for (std::size_t n = 0; n < N; ++n) acc_[n] += w[s] * k_[n];
  }
  for (std::size_t n = 0; n < N; ++n) f.values[n] += dt * acc_[n];
  f.time += dt;
  check_finite(f.values, f.time);
}

GridState step_rk4(const RhsOperator& rhs, const GridState& f, double dt) {
  GridState g = f;
  Rk4 rk(rhs);
  rk.step(g, dt);
  return g;
}

double cfl_number(const Symbol& H, const GridSpec& spec, const std::map<std::string, double>& params, double dt) {
  const auto& sp = *H.space();
  std::vector<std::string> names;
  for (const auto& a : spec.axes) names.push_back(a.name);
  std::vector<std::pair<NumericPolynomial, double>> vel;  // velocity along axis, 1/spacing
  for (auto [q, p] : sp.pairs()) {
    vel.emplace_back(NumericPolynomial(partial(H, p), names, params), 1.0 / spec.axes[spec.axis(sp.name(q))].spacing());
    vel.emplace_back(NumericPolynomial(partial(H, q), names, params), 1.0 / spec.axes[spec.axis(sp.name(p))].spacing());
  }
  double worst = 0;
  for (std::size_t n = 0; n < spec.size(); ++n) {
    auto x = spec.point(n);
    double s = 0;
    for (const auto& [v, inv] : vel) s += std::abs(v(x)) * inv;
    worst = std::max(worst, s * dt);
  }
  return worst;
}

double normalize_check(const GridState& f) {
  double s = 0;
  for (double v : weighted(f)) s += v;
  return s * f.spec.cell_volume();
}

GridState slice(const GridState& f, const std::string& axis_name, double value) {
  std::size_t axis = f.spec.axis(axis_name);
  if (f.spec.axes.size() == 1) throw InputError("cannot slice the only axis; use probability()");
  GridSpec s = f.spec;
  s.axes.erase(s.axes.begin() + static_cast<long>(axis));
  return GridState(s, contract(f.spec, weighted(f), axis, interpolation_weights(f.spec, axis, value)), f.time);
}

GridState marginal(const GridState& f, const std::vector<std::string>& keep) {
  for (const auto& k : keep) f.spec.axis(k);
  if (keep.empty()) throw InputError("marginal needs at least one kept axis");
  GridSpec cur = f.spec;
  std::vector<double> vals = weighted(f);
  for (std::size_t a = cur.axes.size(); a-- > 0;) {
    if (std::find(keep.begin(), keep.end(), cur.axes[a].name) != keep.end()) continue;
    vals = contract(cur, vals, a, std::vector<double>(cur.axes[a].points, cur.axes[a].spacing()));
    cur.axes.erase(cur.axes.begin() + static_cast<long>(a));
  }
  return GridState(cur, std::move(vals), f.time);
}

double probability(const GridState& f, const DeltaSymbol& rho, const std::map<std::string, double>& params) {
  if (rho.is_zero()) return 0.0;
  if (rho.terms().size() != 1) throw InputError("probability: observable distribution is not a single separable term");
  const auto& t = rho.terms()[0];
  if (!t.poly.is_constant() || !t.phase.is_zero())
    throw InputError("probability: observable distribution must be a constant times deltas");
  auto [scale, im] = t.poly.constant_value().evaluate(params);
  if (std::abs(im) > 1e-14) throw InputError("probability: complex prefactor");
  const auto& sp = *rho.space();
  std::vector<std::pair<std::string, double>> cuts;
  for (const auto& d : t.deltas) {
    if (d.order != 0) throw InputError("probability: derivative deltas are not supported");
    std::optional<std::size_t> coord;
    for (const auto& term : d.arg.terms()) {
      if (term.mono.deg == 0) continue;
      if (term.mono.deg != 1 || coord || !(term.coeff == Coefficient(1L)))
        throw InputError("probability: delta argument " + to_string(d.arg) + " is not a coordinate slice");
      for (std::size_t i = 0; i < sp.dim(); ++i)
        if (term.mono.e[i]) coord = i;
    }
    if (!coord) throw InputError("probability: delta argument has no coordinate");
    auto [c, ci] = d.arg.constant_term().evaluate(params);
    if (std::abs(ci) > 1e-14) throw InputError("probability: complex slice position");
    for (const auto& [nm, v] : cuts)
      if (nm == sp.name(*coord)) throw InputError("probability: two deltas on one coordinate");
    cuts.emplace_back(sp.name(*coord), -c);
  }
  GridSpec cur = f.spec;
  std::vector<double> vals = weighted(f);
  for (const auto& [name, value] : cuts) {
    std::size_t a = cur.axis(name);
    vals = contract(cur, vals, a, interpolation_weights(cur, a, value));
    cur.axes.erase(cur.axes.begin() + static_cast<long>(a));
  }
  double s = 0;
  for (double v : vals) s += v;
  for (const auto& ax : cur.axes) s *= ax.spacing();
  return scale * s;
}

double l2_norm(const GridState& f) {
  double s = 0;
  for (double v : f.values) s += v * v;
  return std::sqrt(s * f.spec.cell_volume());
}

double l2_distance(const GridState& a, const GridState& b) {
  if (!(a.spec == b.spec)) throw SpaceMismatch("l2_distance: grids differ");
  double s = 0;
  for (std::size_t n = 0; n < a.values.size(); ++n) s += (a.values[n] - b.values[n]) * (a.values[n] - b.values[n]);
  return std::sqrt(s * a.spec.cell_volume());
}

}  // namespace phasestar
