#include "lazytensor/driver.hpp"

#include <algorithm>
#include <cmath>

#include "lazytensor/errors.hpp"
#include "lazytensor/fdtensor.hpp"

namespace lazytensor {

namespace {

constexpr std::int64_t kUnknownConstantCap = 1'000'000;
constexpr double kCapCeiling = 1e9;

void validate(const ProblemOracle& problem, const DriverConfig& cfg) {
  detail::require(cfg.p >= 1 && cfg.p <= 3, "p must lie in 1..3");
  detail::require(!cfg.m || *cfg.m >= 1, "m must be >= 1");
  detail::require(cfg.eps > 0.0 && std::isfinite(cfg.eps), "eps must be positive");
  detail::require(cfg.L0 > 0.0 && std::isfinite(cfg.L0), "L0 must be positive");
  detail::require(!cfg.max_outer || *cfg.max_outer >= 1, "max_outer must be >= 1");
  detail::require(cfg.inner_budget >= 1, "inner budget must be >= 1");
  detail::require(!cfg.x0 || cfg.x0->size() == problem.dim(), "x0 dimension does not match problem");
  // The stationarity test needs grad f even when p = 1.
  if (problem.max_order() < std::max(1, cfg.p - 1)) {
    throw UnsupportedOrder("problem '" + problem.name() + "' cannot serve derivatives of order " +
                           std::to_string(std::max(1, cfg.p - 1)));
  }
}

std::int64_t default_cap(const ProblemOracle& problem, const DriverConfig& cfg, int m, double f_z0) {
  const auto lipschitz = problem.lipschitz(cfg.p);
  const auto f_low = problem.f_low();
  if (!lipschitz || !f_low) return kUnknownConstantCap;
  const double l_max = std::max(cfg.L0, 2.0 * *lipschitz);
  const double bound = iteration_bound(l_max, std::max(0.0, f_z0 - *f_low), cfg.p, m, cfg.eps, cfg.L0);
  return static_cast<std::int64_t>(std::min(kCapCeiling, std::max(1.0, 10.0 * std::ceil(bound))));
}

}  // namespace

double iteration_bound(double L_max, double f0_minus_flow, int p, int m, double eps, double L0) {
  detail::require(L_max > 0.0 && L0 > 0.0 && eps > 0.0, "iteration_bound needs positive L_max, L0 and eps");
  detail::require(f0_minus_flow >= 0.0, "f(z0) - f_low must be nonnegative");
  detail::require(p >= 1 && p <= 3 && m >= 1, "iteration_bound needs p in 1..3 and m >= 1");
  const double pd = p;
  const double middle = 128.0 * std::pow(3.0 * 11.0 * (pd + 1.0) * L_max, 1.0 / pd) * factorial(p + 1) *
                        f0_minus_flow * std::pow(eps, -(pd + 1.0) / pd) / std::pow(static_cast<double>(m), (pd - 1.0) / pd);
  return 1.0 + middle + std::log2(L_max / L0);
}

int optimal_m(int p, int n) {
  detail::require(p >= 1 && n >= 1, "optimal_m needs p >= 1 and n >= 1");
  return p == 1 ? 1 : (p - 1) * n + 1;
}

RunReport run(const ProblemOracle& problem, const DriverConfig& config) {
  validate(problem, config);
  const int n = problem.dim();
  const int p = config.p;

  RunReport report;
  report.problem = problem.name();
  report.n = n;
  report.config = config;
  report.m = config.m.value_or(optimal_m(p, n));

  OrderSet step1_orders = OrderSet::up_to(std::max(1, p - 1));
  OracleCounter counter;
  Vector z = config.x0.value_or(problem.start());
  double lipschitz_estimate = config.L0;

  // Step 1 data for z_k. After a lazy run ends in solution the gradient at
  // z_{k+1} is already known and no fresh query is made.
  Derivatives current = evaluate(problem, counter, z, step1_orders);
  double f_z = current.value();
  double grad_norm = current.gradient().norm();
  report.f_z0 = f_z;
  report.max_outer = config.max_outer.value_or(default_cap(problem, config, report.m, f_z));

  bool need_query = false;
  for (std::int64_t k = 0;; ++k) {
    if (need_query) {
      current = evaluate(problem, counter, z, step1_orders);
      f_z = current.value();
      grad_norm = current.gradient().norm();
    }
    if (grad_norm <= config.eps) {
      report.terminated = true;
      report.k_eps = k;
      break;
    }
    if (k >= report.max_outer) break;

    OuterIterationRecord rec;
    rec.k = k;
    rec.L_k = lipschitz_estimate;
    rec.f_zk = f_z;
    rec.grad_norm_zk = grad_norm;

    FdSchedule sched = schedule(lipschitz_estimate, report.m, p, n, config.eps);
    if (config.h_floor) sched = apply_floor(sched, z);
    rec.sigma_k = sched.sigma;
    rec.h_k = sched.h;
    rec.h_floored = sched.floored;

    const RankOneSum tensor = build_fd_tensor(problem, counter, z, current.at(p - 1), sched.h, p);
    LazyResult lazy = lazy_tensor_steps(problem, counter, z, tensor, sched.sigma, report.m, config.eps,
                                        config.inner_budget);

    rec.alpha_k = lazy.status;
    rec.lazy_steps = lazy.full_steps;
    rec.subsolve_failure = lazy.subsolve_failure;
    rec.lazy_trace = std::move(lazy.state.trace);
    rec.oracle_calls_cum = counter.calls();

    switch (lazy.status) {
      case StepStatus::kHalt:
        lipschitz_estimate *= 2.0;
        ++report.halt_count;
        break;
      case StepStatus::kSuccess:
        lipschitz_estimate /= 2.0;
        ++report.success_count;
        break;
      case StepStatus::kSolution:
        break;
    }
    report.any_h_floored = report.any_h_floored || rec.h_floored;
    if (rec.subsolve_failure) ++report.subsolve_failures;

    z = std::move(lazy.point);
    if (lazy.status == StepStatus::kSolution) {
      f_z = lazy.f_point;
      grad_norm = rec.lazy_trace.back().grad_norm;
      need_query = false;
    } else {
      need_query = true;
    }
    report.records.push_back(std::move(rec));
  }

  report.final_point = z;
  report.final_f = f_z;
  report.final_grad_norm = grad_norm;
  report.oracle_calls = counter.calls();
  return report;
}

}  // namespace lazytensor
