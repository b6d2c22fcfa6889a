#pragma once

#include "lazytensor/model.hpp"

namespace lazytensor {

struct SubsolveResult {
  Vector point;
  int inner_iterations = 0;
  double model_value_at_point = 0.0;
  double model_grad_norm = 0.0;
  AcceptanceCheck certificate;
};

inline constexpr int kDefaultInnerBudget = 10000;

/// Finds y with M(y) <= f(anchor) and |grad M(y)| <= sigma/(2 p!) |y - anchor|^p.
///
/// p = 1 takes the closed-form step -T/sigma. p = 2 solves the cubic
/// subproblem near-exactly through an eigendecomposition and the secular
/// equation. p = 3 runs monotone backtracking gradient descent from the
/// anchor. Any candidate that misses a predicate in floating point is polished
/// by the same descent. Throws SubsolveFailure when `budget` inner iterations
/// do not produce a certified point.
SubsolveResult subsolve(const RegularizedModel& model, int budget = kDefaultInnerBudget);

/// Root r >= max(0, -2 lambda_min / sigma) of
///   phi(r) = |(diag(eigenvalues) + (sigma/2) r I)^{-1} g_rotated| - r,
/// or the left end of that interval when phi is already <= 0 there (the hard
/// case). Throws NumericalError after 200 iterations without convergence.
double secular_root(const Vector& eigenvalues, const Vector& g_rotated, double sigma);

/// Minimizer of the cubic-regularized quadratic <g,s> + 1/2 s^T B s + sigma/6 |s|^3
/// for symmetric B, through secular_root. In the hard case the boundary step
/// along the lowest eigenvector takes the sign with the smaller model value
/// (ties go to the lexicographically smaller vector).
Vector cubic_regularized_step(const Vector& g, const Matrix& b, double sigma);

}  // namespace lazytensor
