#pragma once

#include "lazytensor/multilinear.hpp"
#include "lazytensor/problems.hpp"

namespace lazytensor {

/// Regularization and finite-difference stepsize for one outer iteration.
struct FdSchedule {
  double sigma = 0.0;
  double h = 0.0;
  /// Closed-form stepsize before any floor was applied.
  double h_formula = 0.0;
  double epsilon = 0.0;
  int p = 0;
  int n = 0;
  int m = 0;
  bool floored = false;
};

/// sigma = 11 (p+1) L m.
double regularization(double lipschitz_estimate, int m, int p);

/// h = 4/(sigma sqrt(n)) * [sigma^p eps^((p+1)/p) / ((8(p+1))^p 2^7 3^(1/p) sigma^(1/p))]^(1/(p+1)).
double fd_stepsize(double sigma, double eps, int p, int n);

/// Unfloored schedule for the current Lipschitz estimate.
FdSchedule schedule(double lipschitz_estimate, int m, int p, int n, double eps);

/// 2^-26 (1 + |z|_inf): the smallest stepsize that still resolves a forward
/// difference at z.
double stepsize_floor(const Vector& z);

/// Raises h to stepsize_floor(z) when the closed form falls below it and
/// marks the schedule as floored.
FdSchedule apply_floor(FdSchedule s, const Vector& z);

/// T = sum_i ((grad^{p-1} f(z + h e_i) - grad^{p-1} f(z)) / h) (x) e_i.
/// Costs n + 1 oracle calls.
RankOneSum build_fd_tensor(const ProblemOracle& problem, OracleCounter& counter, const Vector& z, double h, int p);

/// Same as above with grad^{p-1} f(z) already known, so only the n probes are
/// charged to `counter`.
RankOneSum build_fd_tensor(const ProblemOracle& problem, OracleCounter& counter, const Vector& z,
                           const SymmetricTensor& base, double h, int p);

/// Operator-norm distance between P_sym(T) and the exact grad^p f(z). Uses an
/// uncounted oracle query; diagnostics only.
double fd_error(const ProblemOracle& problem, const Vector& z, const RankOneSum& tensor,
                const NormOptions& options = {});

}  // namespace lazytensor
