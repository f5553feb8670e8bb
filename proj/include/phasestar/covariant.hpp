#pragma once

#include "phasestar/symbol.hpp"

#include <map>
#include <string>
#include <vector>

namespace phasestar {

// Polynomial coordinate change between two phase spaces. `forward` gives every target
// coordinate as a polynomial in source coordinates, `inverse` every source coordinate
// in target coordinates. Construction verifies both compositions are the identity.
class Diffeomorphism {
 public:
  Diffeomorphism(SpacePtr source, SpacePtr target, const std::map<std::string, Symbol>& forward,
                 const std::map<std::string, Symbol>& inverse);
  static Diffeomorphism identity(const SpacePtr& space);

  const SpacePtr& source() const { return source_; }
  const SpacePtr& target() const { return target_; }
  const std::vector<Symbol>& forward() const { return forward_; }
  const std::vector<Symbol>& inverse() const { return inverse_; }

  // a'(O'(O)): a symbol over the target rewritten over the source.
  Symbol to_source(const Symbol& over_target) const;
  // a(O(O')): a symbol over the source rewritten over the target.
  Symbol to_target(const Symbol& over_source) const;

 private:
  SpacePtr source_, target_;
  std::vector<Symbol> forward_, inverse_;
};

struct SymplecticMatrix {
  SpacePtr space;
  std::vector<std::vector<Symbol>> J;

  static SymplecticMatrix canonical(const SpacePtr& space);
  friend bool operator==(const SymplecticMatrix& a, const SymplecticMatrix& b) { return a.J == b.J; }
};

class Connection {
 public:
  explicit Connection(SpacePtr space);
  const SpacePtr& space() const { return space_; }
  std::size_t dim() const { return n_; }
  const Symbol& operator()(std::size_t i, std::size_t j, std::size_t k) const { return g_[(i * n_ + j) * n_ + k]; }
  Symbol& at(std::size_t i, std::size_t j, std::size_t k) { return g_[(i * n_ + j) * n_ + k]; }
  bool is_zero() const;
  friend bool operator==(const Connection& a, const Connection& b) { return a.g_ == b.g_; }

 private:
  SpacePtr space_;
  std::size_t n_;
  std::vector<Symbol> g_;
};

// J'^{ij} = {O'^i, O'^j} over the source, expressed over the target.
SymplecticMatrix jacobian_symplectic(const Diffeomorphism& d);

// Gamma'^i_{jk} = dO'^i/dO^b d^2 O^b / dO'^j dO'^k, expressed over the target.
Connection christoffel(const Diffeomorphism& d);

std::vector<Symbol> covariant_gradient(const Symbol& a);
// Hessian minus Gamma^k_{ij} d_k a.
std::vector<std::vector<Symbol>> covariant_hessian(const Symbol& a, const Connection& conn);

// Reference semantics of the covariant product: pull both factors back to the flat
// source chart, multiply there, and rewrite the product over the target.
Symbol covariant_star_pullback(const Symbol& a, const Symbol& b, const Diffeomorphism& d, int max_order = -1);

// a b + (i hbar/2) da J db + (1/2)(i hbar/2)^2 (DDa) J J (DDb), truncated at hbar^hbar_order.
Symbol covariant_star_direct(const Symbol& a, const Symbol& b, const SymplecticMatrix& J, const Connection& conn,
                             int hbar_order);

Symbol determinant(const std::vector<std::vector<Symbol>>& m, const SpacePtr& space);
Symbol pfaffian(const std::vector<std::vector<Symbol>>& m, const SpacePtr& space);
// det J' (its inverse square root is the grid measure weight).
Symbol measure_factor(const SymplecticMatrix& J);

}  // namespace phasestar
