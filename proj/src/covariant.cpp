#include "phasestar/covariant.hpp"

#include "phasestar/errors.hpp"
#include "phasestar/moyal.hpp"
#include "phasestar/symbol_io.hpp"

#include <unordered_map>

namespace phasestar {

namespace {

std::vector<Symbol> by_coordinate(const SpacePtr& keys, const SpacePtr& values, const std::map<std::string, Symbol>& m,
                                  const char* branch) {
  std::vector<Symbol> out;
  for (const auto& name : keys->coords()) {
    auto it = m.find(name);
    if (it == m.end()) throw InputError(std::string(branch) + " branch lacks coordinate '" + name + "'");
    require_same_space(it->second.space(), values, branch);
    out.push_back(it->second);
  }
  if (m.size() != keys->dim()) throw InputError(std::string(branch) + " branch binds unknown coordinates");
  return out;
}

std::vector<std::optional<Symbol>> as_bindings(const std::vector<Symbol>& v) { return {v.begin(), v.end()}; }

}  // namespace

Diffeomorphism::Diffeomorphism(SpacePtr source, SpacePtr target, const std::map<std::string, Symbol>& forward,
                               const std::map<std::string, Symbol>& inverse)
    : source_(std::move(source)), target_(std::move(target)) {
  if (source_->dim() != target_->dim()) throw InputError("diffeomorphism between spaces of different dimension");
  forward_ = by_coordinate(target_, source_, forward, "forward");
  inverse_ = by_coordinate(source_, target_, inverse, "inverse");
  for (std::size_t i = 0; i < target_->dim(); ++i)
    if (to_target(forward_[i]) != Symbol::coordinate(target_, i))
      throw InputError("map is not invertible: forward(inverse) differs from identity at '" + target_->name(i) + "'");
  for (std::size_t b = 0; b < source_->dim(); ++b)
    if (to_source(inverse_[b]) != Symbol::coordinate(source_, b))
      throw InputError("map is not invertible: inverse(forward) differs from identity at '" + source_->name(b) + "'");
}

Diffeomorphism Diffeomorphism::identity(const SpacePtr& space) {
  std::map<std::string, Symbol> id;
  for (std::size_t i = 0; i < space->dim(); ++i) id.emplace(space->name(i), Symbol::coordinate(space, i));
  return Diffeomorphism(space, space, id, id);
}

Symbol Diffeomorphism::to_source(const Symbol& over_target) const {
  require_same_space(over_target.space(), target_, "to_source");
  return substitute(over_target, as_bindings(forward_), source_);
}

Symbol Diffeomorphism::to_target(const Symbol& over_source) const {
  require_same_space(over_source.space(), source_, "to_target");
  return substitute(over_source, as_bindings(inverse_), target_);
}

SymplecticMatrix SymplecticMatrix::canonical(const SpacePtr& space) {
  SymplecticMatrix m{space, {}};
  for (std::size_t i = 0; i < space->dim(); ++i) {
    m.J.emplace_back();
    for (std::size_t j = 0; j < space->dim(); ++j) m.J[i].push_back(Symbol(space, Coefficient(long(space->J(i, j)))));
  }
  return m;
}

Connection::Connection(SpacePtr space) : space_(std::move(space)), n_(space_->dim()), g_(n_ * n_ * n_, Symbol(space_)) {}

bool Connection::is_zero() const {
  for (const auto& s : g_)
    if (!s.is_zero()) return false;
  return true;
}

SymplecticMatrix jacobian_symplectic(const Diffeomorphism& d) {
  const auto n = d.target()->dim();
  SymplecticMatrix m{d.target(), std::vector<std::vector<Symbol>>(n, std::vector<Symbol>(n, Symbol(d.target())))};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      Symbol v = d.to_target(poisson(d.forward()[i], d.forward()[j]));
      m.J[j][i] = -v;
      m.J[i][j] = std::move(v);
    }
  return m;
}

Connection christoffel(const Diffeomorphism& d) {
  const auto n = d.target()->dim();
  Connection conn(d.target());
  // dO'^i/dO^b rewritten over the target.
  std::vector<std::vector<Symbol>> jac(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t b = 0; b < n; ++b) jac[i].push_back(d.to_target(partial(d.forward()[i], b)));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j; k < n; ++k) {
      std::vector<Symbol> second;
      bool any = false;
      for (std::size_t b = 0; b < n; ++b) {
        second.push_back(partial(partial(d.inverse()[b], j), k));
        any = any || !second.back().is_zero();
      }
      if (!any) continue;
      for (std::size_t i = 0; i < n; ++i) {
        Symbol g(d.target());
        for (std::size_t b = 0; b < n; ++b)
          if (!second[b].is_zero()) g += jac[i][b] * second[b];
        conn.at(i, j, k) = g;
        conn.at(i, k, j) = std::move(g);
      }
    }
  return conn;
}

std::vector<Symbol> covariant_gradient(const Symbol& a) {
  std::vector<Symbol> g;
  for (std::size_t i = 0; i < a.space()->dim(); ++i) g.push_back(partial(a, i));
  return g;
}

std::vector<std::vector<Symbol>> covariant_hessian(const Symbol& a, const Connection& conn) {
  require_same_space(a.space(), conn.space(), "covariant_hessian");
  const auto n = a.space()->dim();
  auto grad = covariant_gradient(a);
  std::vector<std::vector<Symbol>> h(n, std::vector<Symbol>(n, Symbol(a.space())));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      Symbol v = partial(grad[i], j);
      for (std::size_t k = 0; k < n; ++k)
        if (!conn(k, i, j).is_zero() && !grad[k].is_zero()) v -= conn(k, i, j) * grad[k];
      h[j][i] = v;
      h[i][j] = std::move(v);
    }
  return h;
}

Symbol covariant_star_pullback(const Symbol& a, const Symbol& b, const Diffeomorphism& d, int max_order) {
  return d.to_target(star(d.to_source(a), d.to_source(b), max_order));
}

Symbol covariant_star_direct(const Symbol& a, const Symbol& b, const SymplecticMatrix& J, const Connection& conn,
                             int hbar_order) {
  if (hbar_order < 0 || hbar_order > 2) throw InputError("covariant_star_direct: hbar_order must be 0, 1 or 2");
  require_same_space(a.space(), b.space(), "covariant_star_direct");
  const auto n = a.space()->dim();
  Symbol out = a * b;
  if (hbar_order == 0) return out;
  auto ga = covariant_gradient(a), gb = covariant_gradient(b);
  Symbol first(a.space());
  for (std::size_t i = 0; i < n; ++i) {
    if (ga[i].is_zero()) continue;
    for (std::size_t j = 0; j < n; ++j)
      if (!J.J[i][j].is_zero() && !gb[j].is_zero()) first += ga[i] * J.J[i][j] * gb[j];
  }
  // i hbar / 2
  out += first * Coefficient(GaussRational(Rational(0), Rational(1, 2)), ParamMonomial::generator(ParamNames::hbar, 1));
  if (hbar_order == 1) return out;
  auto ha = covariant_hessian(a, conn), hb = covariant_hessian(b, conn);
  // (DDa)_{ik} J^{ij} J^{kl} (DDb)_{jl}, with jb^i_l = J^{ij} (DDb)_{jl} formed first.
  std::vector<std::vector<Symbol>> jb(n, std::vector<Symbol>(n, Symbol(a.space())));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t j = 0; j < n; ++j)
        if (!J.J[i][j].is_zero() && !hb[j][l].is_zero()) jb[i][l] += J.J[i][j] * hb[j][l];
  Symbol second(a.space());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      if (ha[i][k].is_zero()) continue;
      Symbol inner(a.space());
      for (std::size_t l = 0; l < n; ++l)
        if (!J.J[k][l].is_zero() && !jb[i][l].is_zero()) inner += J.J[k][l] * jb[i][l];
      if (!inner.is_zero()) second += ha[i][k] * inner;
    }
  // (1/2)(i hbar/2)^2 = -hbar^2/8
  out += second * Coefficient(GaussRational(Rational(-1, 8)), ParamMonomial::generator(ParamNames::hbar, 2));
  return out;
}

namespace {

Symbol det_rec(const std::vector<std::vector<Symbol>>& m, std::size_t row, std::uint32_t used,
               std::unordered_map<std::uint32_t, Symbol>& memo, const SpacePtr& space) {
  const auto n = m.size();
  if (row == n) return Symbol(space, Coefficient(1L));
  if (auto it = memo.find(used); it != memo.end()) return it->second;
  Symbol acc(space);
  int sign = 1;
  for (std::size_t c = 0; c < n; ++c) {
    if (used & (1u << c)) continue;
    if (!m[row][c].is_zero()) {
      Symbol minor = det_rec(m, row + 1, used | (1u << c), memo, space);
      Symbol term = m[row][c] * minor;
      if (sign > 0) {
        acc += term;
      } else {
        acc -= term;
      }
    }
    sign = -sign;
  }
  memo.emplace(used, acc);
  return acc;
}

Symbol pf_rec(const std::vector<std::vector<Symbol>>& m, std::uint32_t remaining,
              std::unordered_map<std::uint32_t, Symbol>& memo, const SpacePtr& space) {
  if (remaining == 0) return Symbol(space, Coefficient(1L));
  if (auto it = memo.find(remaining); it != memo.end()) return it->second;
  std::size_t first = __builtin_ctz(remaining);
  std::uint32_t rest = remaining & ~(1u << first);
  Symbol acc(space);
  int sign = 1;
  for (std::size_t j = first + 1; j < m.size(); ++j) {
    if (!(rest & (1u << j))) continue;
    if (!m[first][j].is_zero()) {
      Symbol term = m[first][j] * pf_rec(m, rest & ~(1u << j), memo, space);
      if (sign > 0) {
        acc += term;
      } else {
        acc -= term;
      }
    }
    sign = -sign;
  }
  memo.emplace(remaining, acc);
  return acc;
}

}  // namespace

Symbol determinant(const std::vector<std::vector<Symbol>>& m, const SpacePtr& space) {
  std::unordered_map<std::uint32_t, Symbol> memo;
  return det_rec(m, 0, 0, memo, space);
}

Symbol pfaffian(const std::vector<std::vector<Symbol>>& m, const SpacePtr& space) {
  if (m.size() % 2) throw InputError("pfaffian of an odd-dimensional matrix");
  std::unordered_map<std::uint32_t, Symbol> memo;
  return pf_rec(m, (m.size() == 32 ? 0u : (1u << m.size())) - 1, memo, space);
}

Symbol measure_factor(const SymplecticMatrix& J) {
  if (J.J.size() % 2) throw InputError("measure_factor: odd dimension");
  return determinant(J.J, J.space);
}

}  // namespace phasestar
