#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "lazytensor/multilinear.hpp"
#include "lazytensor/problems.hpp"
#include "lazytensor/subsolver.hpp"

namespace lazytensor {

/// Why a lazy run stopped: all m steps done, an eps-stationary point found,
/// or the decrease test failed.
enum class StepStatus { kSuccess, kSolution, kHalt };

std::string_view to_string(StepStatus status);
StepStatus step_status_from_string(std::string_view text);

struct LazyStepRecord {
  int t = 0;
  /// f and |grad f| at the new iterate x_{t+1}.
  double f = 0.0;
  double grad_norm = 0.0;
  double step_norm = 0.0;
  int inner_iterations = 0;
  /// f(x_0) - f(x~_{t+1}) against the required decrease.
  double decrease = 0.0;
  double threshold = 0.0;
  bool subsolve_failed = false;
};

struct LazyRunState {
  Vector x_t;
  Vector x_tilde;
  double f_tilde = 0.0;
  int t = 0;
  double f_x0 = 0.0;
  std::vector<LazyStepRecord> trace;
};

struct LazyResult {
  Vector point;
  double f_point = 0.0;
  StepStatus status = StepStatus::kHalt;
  LazyRunState state;
  /// Steps that completed both oracle calls.
  int full_steps = 0;
  bool subsolve_failure = false;
  std::int64_t oracle_calls = 0;
};

/// eps^((p+1)/p) (t+1) / (2^6 3^(1/p) sigma^(1/p) (p+1)!)
double decrease_threshold(double sigma, double eps, int p, int t);

/// Up to m regularized steps from x, all reusing the tensor T and sigma.
/// Every step spends one oracle call on {f, ..., grad^{p-1} f} at x_t and one
/// on {f, grad f} at x_{t+1}. A subsolver failure ends the run with kHalt and
/// marks the last trace record.
LazyResult lazy_tensor_steps(const ProblemOracle& problem, OracleCounter& counter, const Vector& x,
                             const RankOneSum& tensor, double sigma, int m, double eps,
                             int inner_budget = kDefaultInnerBudget);

}  // namespace lazytensor
