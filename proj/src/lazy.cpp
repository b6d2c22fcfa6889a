#include "lazytensor/lazy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lazytensor/errors.hpp"
#include "lazytensor/model.hpp"

namespace lazytensor {

std::string_view to_string(StepStatus status) {
  switch (status) {
    case StepStatus::kSuccess: return "success";
    case StepStatus::kSolution: return "solution";
    case StepStatus::kHalt: return "halt";
  }
  return "halt";
}

StepStatus step_status_from_string(std::string_view text) {
  if (text == "success") return StepStatus::kSuccess;
  if (text == "solution") return StepStatus::kSolution;
  if (text == "halt") return StepStatus::kHalt;
  throw std::invalid_argument("unknown step status '" + std::string(text) + "'");
}

double decrease_threshold(double sigma, double eps, int p, int t) {
  detail::require(sigma > 0.0 && eps > 0.0, "sigma and eps must be positive");
  detail::require(p >= 1 && p <= 3, "p must lie in 1..3");
  detail::require(t >= 0, "t must be >= 0");
  const double pd = p;
  return std::pow(eps, (pd + 1.0) / pd) * (t + 1) /
         (64.0 * std::pow(3.0, 1.0 / pd) * std::pow(sigma, 1.0 / pd) * factorial(p + 1));
}

LazyResult lazy_tensor_steps(const ProblemOracle& problem, OracleCounter& counter, const Vector& x,
                             const RankOneSum& tensor, double sigma, int m, double eps, int inner_budget) {
  detail::require(m >= 1, "m must be >= 1");
  detail::require(sigma > 0.0 && std::isfinite(sigma), "sigma must be positive");
  detail::require(eps > 0.0, "eps must be positive");
  const int p = tensor.order();
  detail::require(tensor.dim() == problem.dim() && x.size() == problem.dim(), "dimension mismatch");
  const OrderSet snapshot_orders = OrderSet::up_to(p - 1);
  const OrderSet check_orders{0, 1};

  const std::int64_t calls_at_entry = counter.calls();
  LazyResult result;
  LazyRunState& state = result.state;
  state.x_t = x;
  state.x_tilde = x;
  state.t = 0;

  auto finish = [&](Vector point, double f_point, StepStatus status) {
    result.point = std::move(point);
    result.f_point = f_point;
    result.status = status;
    result.oracle_calls = counter.calls() - calls_at_entry;
    return result;
  };

  while (true) {
    if (state.t == m) return finish(state.x_tilde, state.f_tilde, StepStatus::kSuccess);

    const Derivatives snapshot = evaluate(problem, counter, state.x_t, snapshot_orders);
    const double f_t = snapshot.value();
    if (state.t == 0) {
      state.f_x0 = f_t;
      state.f_tilde = f_t;
    }
    std::vector<SymmetricTensor> derivs;
    for (int q = 1; q < p; ++q) derivs.push_back(snapshot.at(q));
    const RegularizedModel model(state.x_t, f_t, std::move(derivs), tensor, sigma);

    LazyStepRecord record;
    record.t = state.t;
    SubsolveResult step;
    try {
      step = subsolve(model, inner_budget);
    } catch (const SubsolveFailure& failure) {
      record.subsolve_failed = true;
      record.inner_iterations = failure.iterations();
      record.f = f_t;
      record.threshold = decrease_threshold(sigma, eps, p, state.t);
      record.decrease = state.f_x0 - state.f_tilde;
      state.trace.push_back(record);
      result.subsolve_failure = true;
      return finish(state.x_tilde, state.f_tilde, StepStatus::kHalt);
    }

    const Derivatives next = evaluate(problem, counter, step.point, check_orders);
    ++result.full_steps;
    const double f_next = next.value();
    const double grad_norm = next.gradient().norm();
    // First-seen tie-breaking: x~ only moves on strict improvement.
    if (f_next < state.f_tilde) {
      state.x_tilde = step.point;
      state.f_tilde = f_next;
    }
    record.f = f_next;
    record.grad_norm = grad_norm;
    record.step_norm = step.certificate.step_norm;
    record.inner_iterations = step.inner_iterations;
    record.threshold = decrease_threshold(sigma, eps, p, state.t);
    record.decrease = state.f_x0 - state.f_tilde;
    state.trace.push_back(record);

    if (grad_norm <= eps) return finish(step.point, f_next, StepStatus::kSolution);
    if (!(record.decrease >= record.threshold)) return finish(state.x_tilde, state.f_tilde, StepStatus::kHalt);
    state.x_t = step.point;
    ++state.t;
  }
}

}  // namespace lazytensor
