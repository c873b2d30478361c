#pragma once

#include "sparsetask/core.hpp"

namespace sparsetask {

// Euclidean projections onto the constraint sets of the learning problem.
// Each returns its input unchanged (bitwise) when the input is already
// feasible; all throw std::invalid_argument on non-finite input or a
// non-positive radius.

/// Projection onto {u : ||u||_1 <= alpha} by sort-and-threshold.
[[nodiscard]] Vector project_l1_ball(const Vector& v, double alpha);

/// Projection onto {u : ||u||_2 <= radius}.
[[nodiscard]] Vector project_l2_ball(const Vector& v, double radius);

/// Rescales every column with norm above one back onto the unit sphere.
[[nodiscard]] Dictionary project_dictionary(const Matrix& atoms);

/// Global rescale onto {D : ||D||_F <= radius}.
[[nodiscard]] Matrix project_frobenius_ball(const Matrix& atoms, double radius);

/// l1-ball projection of the whole matrix treated as one long vector.
[[nodiscard]] Matrix project_aggregate_l1(const Matrix& codes, double budget);

/// Projects a matrix of atoms onto the set named by `constraint`.
[[nodiscard]] Matrix project_atoms(const Matrix& atoms, AtomConstraint constraint);

/// Projects a code matrix onto the set named by `constraint`.
[[nodiscard]] Matrix project_codes(const Matrix& codes, double alpha, CodeConstraint constraint);

}  // namespace sparsetask
