#pragma once

#include "phasestar/covariant.hpp"
#include "phasestar/symbol.hpp"

#include <optional>
#include <string>
#include <vector>

namespace phasestar {

struct Histories {
  std::vector<Symbol> A;  // one per degree of freedom, over the extended space
  std::vector<Symbol> B;
  friend bool operator==(const Histories& x, const Histories& y) { return x.A == y.A && x.B == y.B; }
};

enum class BracketKind { moyal, poisson };

// Parametrized extension of a Hamiltonian H0(q, p).
//   extended space (P_t, p..., t, q...) with {t, P_t} = 1
//   history space  (phi, B..., t, A...) with {t, phi} = 1, {A_j, B_j} = 1
struct ExtendedSystem {
  SpacePtr base_space;
  SpacePtr extended_space;
  SpacePtr history_space;
  Symbol H0;
  Symbol constraint;
  std::string multiplier_name = "lambda";
  std::optional<Histories> histories;
  std::optional<Histories> classical_histories;
  std::optional<Diffeomorphism> T;  // history chart -> causal chart (t, P_t, q, p)
  bool classical_equals_quantum = false;

  // Rename base coordinates into the extended chart (q -> q, p -> p) or the history chart (q -> A, p -> B).
  Symbol to_extended(const Symbol& base) const;
  Symbol to_history(const Symbol& base) const;
  std::size_t dof() const { return base_space->dof(); }
  const std::string& position_name(std::size_t j) const;
  const std::string& momentum_name(std::size_t j) const;
  std::string history_A_name(std::size_t j) const;
  std::string history_B_name(std::size_t j) const;
};

inline constexpr int kDefaultMaxOrder = 16;

ExtendedSystem parametrize(const Symbol& H0);

// F(t) = sum_n t^n/n! ad^n(x), ad(X) = [X, H0]; A = F(-t), B = G(-t).
Histories quantum_histories(const ExtendedSystem& sys, int max_order = kDefaultMaxOrder);
Histories classical_histories(const ExtendedSystem& sys, int max_order = kDefaultMaxOrder);

// [x, ad x, ad^2 x, ...] over the base space, up to the last nonzero iterate.
// Throws NonTerminatingFlow when ad^{max_order}(x) is still nonzero.
std::vector<Symbol> flow_series(const Symbol& H0, const Symbol& x, BracketKind kind, int max_order);

// Truncated flow (no termination requirement): coefficients of t^n/n!, n = 0..order.
std::vector<Symbol> flow_coefficients(const Symbol& H0, const Symbol& x, BracketKind kind, int order);

Diffeomorphism causal_map(const ExtendedSystem& sys, int max_order = kDefaultMaxOrder);

// Fill histories, classical histories and T.
ExtendedSystem with_histories(ExtendedSystem sys, int max_order = kDefaultMaxOrder);

// Heisenberg-picture symbol z(t, A, B) over the history space (quantum flow).
Symbol history_observable(const ExtendedSystem& sys, const Symbol& base_observable, int max_order = kDefaultMaxOrder);
// z(t, A, B) composed with T: a symbol over the extended chart.
Symbol observable_pullback(const ExtendedSystem& sys, const Symbol& base_observable);
// [z(t,A,B), H0(A,B)]_M - {z(t,A,B), H0(A,B)} over the history space.
Symbol observable_time_derivative(const ExtendedSystem& sys, const Symbol& base_observable);

struct VectorFieldComponent {
  std::string coordinate;
  Symbol value;
};
// lambda (1, 0, dH0/dp, -dH0/dq) on (t, P_t, q..., p...).
std::vector<VectorFieldComponent> hamiltonian_vector_field(const ExtendedSystem& sys);

struct FixtureParameters {
  std::optional<Rational> M, m, k;
};

// H0 = p1^2/(2M) + p2^2/(2m) + k q1 p2^2, fully populated.
ExtendedSystem fixture_coupled_particles(const FixtureParameters& params = {});

// Reference forms for the coupled-particle fixture, as parseable text.
struct FixtureReference {
  // A1, A2, B1, B2 over the extended chart
  std::vector<std::pair<std::string, std::string>> histories;
  // causal chart coordinate -> expression over the history chart, and the converse
  std::vector<std::pair<std::string, std::string>> map_forward;
  std::vector<std::pair<std::string, std::string>> map_inverse;
  // nonzero Gamma^i_{jk} (j <= k) over the extended chart, 1-based indices in chart order
  struct Gamma {
    int i, j, k;
    std::string value;
  };
  std::vector<Gamma> connection;
};
const FixtureReference& fixture_reference();

}  // namespace phasestar
