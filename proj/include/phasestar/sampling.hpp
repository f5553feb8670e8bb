#pragma once

#include "phasestar/covariant.hpp"
#include "phasestar/symbol.hpp"

#include <random>

namespace phasestar {

// Random polynomial with up to `terms` monomials of total degree <= max_degree and small
// rational coefficients p/q, |p| <= 5, 1 <= q <= 4. Deterministic for a given engine state.
Symbol random_polynomial(const SpacePtr& space, int max_degree, int terms, std::mt19937_64& rng);

// Composition of `steps` random shears, pair mixings and translations: a linear canonical
// map of the space onto itself.
Diffeomorphism random_affine_canonical(const SpacePtr& space, int steps, std::mt19937_64& rng);

}  // namespace phasestar
