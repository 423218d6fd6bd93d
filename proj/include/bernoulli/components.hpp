#pragma once

#include <utility>

#include "bernoulli/field.hpp"

namespace bernoulli {

// Number of 4-connected components of the active mask restricted to 3-d
// radius > R0.
int count_components_outside(const ScalarField2D& field, double R0);

// Splits the positivity set outside B_{R0} into its upper and lower
// components (value-preserving, mutually disjoint, summing to the input
// there). Throws ComponentCountError unless exactly two components exist.
std::pair<ScalarField2D, ScalarField2D> decompose_components(const ScalarField2D& field,
                                                             double R0);

}  // namespace bernoulli
