#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lazytensor/driver.hpp"

namespace lazytensor {

struct ScalingFit {
  double slope = 0.0;
  /// Set when all counts are equal; slope is then reported as 0.
  bool degenerate = false;
};

/// Least-squares slope of log(count) against log(1/eps). Needs at least three
/// pairs with strictly decreasing eps and positive counts.
ScalingFit fit_scaling_exponent(const std::vector<std::pair<double, double>>& pairs);

enum class BenchMode { kRun, kSweepEps, kSweepM, kVerifyFd };

struct ExperimentSpec {
  BenchMode mode = BenchMode::kRun;
  std::string problem = "quadratic";
  int n = 4;
  DriverConfig driver;
  std::vector<double> eps_grid;
  /// Entries <= 0 stand for optimal_m.
  std::vector<int> m_grid;
  std::vector<double> h_grid{1e-1, 1e-2, 1e-3};
  std::optional<std::string> out;
  std::string format = "csv";
};

struct SweepRow {
  double eps = 0.0;
  int m = 0;
  std::int64_t k = 0;
  std::int64_t oracle_calls = 0;
  double final_grad_norm = 0.0;
  bool terminated = false;
};

struct FdCheckRow {
  int p = 0;
  int n = 0;
  double h = 0.0;
  double fd_error = 0.0;
  /// L sqrt(n) h / 2, absent when the problem has no known L.
  std::optional<double> bound;
};

/// Runs each eps (sweep-eps) or each m (sweep-m) from the same start point.
std::vector<SweepRow> sweep_eps(const ProblemOracle& problem, const DriverConfig& base,
                                const std::vector<double>& eps_grid);
std::vector<SweepRow> sweep_m(const ProblemOracle& problem, const DriverConfig& base, const std::vector<int>& m_grid);

/// fd_error at one point per h, the point drawn uniformly from [-1,1]^n with
/// `seed` unless x0 is supplied.
std::vector<FdCheckRow> verify_fd(const ProblemOracle& problem, int p, const std::vector<double>& h_grid,
                                  std::uint64_t seed, const std::optional<Vector>& x0 = std::nullopt);

std::string sweep_csv(const std::vector<SweepRow>& rows, bool by_m);
std::string verify_fd_csv(const std::vector<FdCheckRow>& rows);

/// Command line entry point. Subcommands: run, sweep-eps, sweep-m, verify-fd.
/// Returns 0 on solution, 2 when an outer iteration cap was hit (or an FD
/// bound was exceeded), 1 on usage errors.
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace lazytensor
