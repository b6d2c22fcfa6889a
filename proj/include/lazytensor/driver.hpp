#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lazytensor/lazy.hpp"
#include "lazytensor/problems.hpp"

namespace lazytensor {

struct DriverConfig {
  int p = 2;
  /// Lazy steps per tensor; unset means optimal_m(p, n).
  std::optional<int> m;
  double eps = 1e-4;
  double L0 = 1.0;
  /// Outer iteration cap; unset means 10 * ceil(iteration_bound) when the
  /// problem's Lipschitz constant and lower bound are known, else 10^6.
  std::optional<std::int64_t> max_outer;
  int inner_budget = kDefaultInnerBudget;
  bool h_floor = true;
  std::uint64_t seed = 0;
  /// Starting point; unset means the problem's canonical start.
  std::optional<Vector> x0;
};

struct OuterIterationRecord {
  std::int64_t k = 0;
  double L_k = 0.0;
  double sigma_k = 0.0;
  double h_k = 0.0;
  StepStatus alpha_k = StepStatus::kHalt;
  double f_zk = 0.0;
  double grad_norm_zk = 0.0;
  std::int64_t oracle_calls_cum = 0;
  int lazy_steps = 0;
  bool h_floored = false;
  bool subsolve_failure = false;
  std::vector<LazyStepRecord> lazy_trace;
};

struct RunReport {
  std::string problem;
  int n = 0;
  DriverConfig config;
  /// m and max_outer as actually used.
  int m = 0;
  std::int64_t max_outer = 0;
  std::vector<OuterIterationRecord> records;
  bool terminated = false;
  /// Index of the eps-stationary iterate; equals records.size() when terminated.
  std::int64_t k_eps = -1;
  int success_count = 0;
  int halt_count = 0;
  Vector final_point;
  double final_f = 0.0;
  double final_grad_norm = 0.0;
  double f_z0 = 0.0;
  std::int64_t oracle_calls = 0;
  bool any_h_floored = false;
  int subsolve_failures = 0;
};

/// Adaptive outer loop: stationarity check, finite-difference tensor at z_k,
/// up to m lazy steps, then L halves on success, doubles on halt and stays on
/// solution.
RunReport run(const ProblemOracle& problem, const DriverConfig& config);

/// 1 + 2^7 (3 * 11 (p+1) L_max)^(1/p) (p+1)! df eps^(-(p+1)/p) / m^((p-1)/p) + log2(L_max / L0)
double iteration_bound(double L_max, double f0_minus_flow, int p, int m, double eps, double L0);

/// 1 for p = 1, else (p-1) n + 1.
int optimal_m(int p, int n);

}  // namespace lazytensor
