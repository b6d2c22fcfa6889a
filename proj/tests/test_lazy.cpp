#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lazytensor/errors.hpp"
#include "lazytensor/fdtensor.hpp"
#include "lazytensor/lazy.hpp"

using namespace lazytensor;

namespace {

RankOneSum constant_first_order(const Vector& t) {
  std::vector<SymmetricTensor> slices;
  for (int i = 0; i < t.size(); ++i) slices.push_back(SymmetricTensor::scalar(t[i], static_cast<int>(t.size())));
  return RankOneSum(std::move(slices));
}

}  // namespace

TEST(DecreaseThreshold, FirstOrderValue) {
  const double v = decrease_threshold(22.0, 1e-2, 1, 0);
  EXPECT_NEAR(v, 1e-4 / (64.0 * 3.0 * 22.0 * 2.0), 1e-22);
  EXPECT_NEAR(v, 1.1837e-8, 1e-12);
}

TEST(DecreaseThreshold, LinearInT) {
  for (int p = 1; p <= 3; ++p) {
    const double base = decrease_threshold(5.0, 1e-3, p, 0);
    EXPECT_DOUBLE_EQ(decrease_threshold(5.0, 1e-3, p, 1), 2 * base);
    EXPECT_DOUBLE_EQ(decrease_threshold(5.0, 1e-3, p, 4), 5 * base);
  }
}

TEST(DecreaseThreshold, VanishesForLargeSigma) {
  EXPECT_LT(decrease_threshold(1e300, 1e-2, 1, 0), 1e-300);
  EXPECT_THROW(decrease_threshold(0.0, 1e-2, 1, 0), ContractViolation);
  EXPECT_THROW(decrease_threshold(1.0, 1e-2, 1, -1), ContractViolation);
}

TEST(StepStatus, RoundTrip) {
  for (auto s : {StepStatus::kSuccess, StepStatus::kSolution, StepStatus::kHalt}) {
    EXPECT_EQ(step_status_from_string(to_string(s)), s);
  }
  EXPECT_THROW(step_status_from_string("done"), std::invalid_argument);
}

TEST(LazySteps, SolutionAfterOneStep) {
  const auto quad = builtin_problem("quadratic", 2);
  OracleCounter counter;
  const Vector x = Vector(Eigen::Vector2d(0.1, -0.2));
  // Exact gradient as T and sigma = 1 lands on the minimizer.
  const auto result = lazy_tensor_steps(quad, counter, x, constant_first_order(x), 1.0, 1, 1e-3);
  EXPECT_EQ(result.status, StepStatus::kSolution);
  EXPECT_LE(result.point.norm(), 1e-12);
  EXPECT_EQ(result.full_steps, 1);
  EXPECT_EQ(counter.calls(), 2);
}

TEST(LazySteps, ScriptedFirstOrderRecursion) {
  const auto quad = builtin_problem("quadratic", 2);
  const Vector x0 = Vector(Eigen::Vector2d(10, 0));
  const double sigma = 4.0;
  const int m = 3;
  OracleCounter counter;
  const auto tensor = build_fd_tensor(quad, counter, x0, 1e-6, 1);
  const std::int64_t before = counter.calls();
  const auto result = lazy_tensor_steps(quad, counter, x0, tensor, sigma, m, 1e-12);

  // The lazy p = 1 step is x_{t+1} = x_t - T / sigma with T frozen at x0.
  Vector t(2);
  for (int i = 0; i < 2; ++i) t[i] = tensor.slice(i).value();
  Vector x = x0;
  double best = 0.5 * x0.squaredNorm();
  ASSERT_EQ(result.state.trace.size(), static_cast<std::size_t>(m));
  for (int step = 0; step < m; ++step) {
    x -= t / sigma;
    const double f = 0.5 * x.squaredNorm();
    best = std::min(best, f);
    EXPECT_NEAR(result.state.trace[step].f, f, 1e-10 * f);
    EXPECT_GE(result.state.trace[step].decrease, result.state.trace[step].threshold);
    EXPECT_NEAR(result.state.trace[step].decrease, 0.5 * x0.squaredNorm() - best, 1e-9);
  }
  EXPECT_EQ(result.status, StepStatus::kSuccess);
  EXPECT_TRUE(result.point.isApprox(x, 1e-10));
  EXPECT_EQ(counter.calls() - before, 2 * m);
  EXPECT_EQ(result.oracle_calls, 2 * m);
}

TEST(LazySteps, SmallSigmaHalts) {
  Matrix a = 100.0 * Matrix::Identity(2, 2);
  const auto stiff = make_quadratic(a);
  const Vector x0 = Vector(Eigen::Vector2d(1, 1));
  const Vector grad = a * x0;
  OracleCounter counter;
  const auto result = lazy_tensor_steps(stiff, counter, x0, constant_first_order(grad), 1.0, 5, 1e-6);
  EXPECT_EQ(result.status, StepStatus::kHalt);
  ASSERT_EQ(result.state.trace.size(), 1u);
  EXPECT_EQ(result.state.trace[0].t, 0);
  EXPECT_LT(result.state.trace[0].decrease, result.state.trace[0].threshold);
  EXPECT_EQ(result.point, x0);
  EXPECT_EQ(counter.calls(), 2);
}

TEST(LazySteps, BestSoFarAndAccounting) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  for (int p = 1; p <= 3; ++p) {
    for (int trial = 0; trial < 10; ++trial) {
      const int n = 3;
      const auto problem = builtin_problem(trial % 2 ? "cos_sum" : "logistic_smooth", n);
      Vector x(n);
      for (int i = 0; i < n; ++i) x[i] = unif(rng);
      OracleCounter counter;
      const double sigma = 11.0 * (p + 1) * 4;
      const auto tensor = build_fd_tensor(problem, counter, x, 1e-4, p);
      const std::int64_t before = counter.calls();
      const auto result = lazy_tensor_steps(problem, counter, x, tensor, sigma, 4, 1e-6);
      const std::int64_t used = counter.calls() - before;
      EXPECT_EQ(used, 2 * result.full_steps + (result.subsolve_failure ? 1 : 0));
      EXPECT_LE(used, 8);

      double best = result.state.f_x0;
      for (const auto& rec : result.state.trace) {
        if (!rec.subsolve_failed) best = std::min(best, rec.f);
      }
      EXPECT_EQ(result.state.f_tilde, best);
      if (result.status == StepStatus::kSuccess) {
        for (const auto& rec : result.state.trace) EXPECT_GE(rec.decrease, rec.threshold);
        EXPECT_EQ(result.f_point, best);
      }
      if (result.status == StepStatus::kSolution) {
        EXPECT_LE(result.state.trace.back().grad_norm, 1e-6);
      }
      if (result.status == StepStatus::kHalt && !result.subsolve_failure) {
        EXPECT_LT(result.state.trace.back().decrease, result.state.trace.back().threshold);
      }
    }
  }
}

TEST(LazySteps, SubsolveFailureIsHalt) {
  const auto problem = builtin_problem("rosenbrock_chain", 4);
  OracleCounter counter;
  const Vector x = problem.start();
  const auto tensor = build_fd_tensor(problem, counter, x, 1e-4, 3);
  const std::int64_t before = counter.calls();
  const auto result = lazy_tensor_steps(problem, counter, x, tensor, 1e-3, 3, 1e-8, 1);
  ASSERT_TRUE(result.subsolve_failure);
  EXPECT_EQ(result.status, StepStatus::kHalt);
  EXPECT_TRUE(result.state.trace.back().subsolve_failed);
  EXPECT_EQ(counter.calls() - before, 2 * result.full_steps + 1);
}

TEST(LazySteps, Validation) {
  const auto quad = builtin_problem("quadratic", 2);
  OracleCounter counter;
  const auto t = constant_first_order(Vector::Ones(2));
  EXPECT_THROW(lazy_tensor_steps(quad, counter, Vector::Ones(2), t, 1.0, 0, 1e-3), ContractViolation);
  EXPECT_THROW(lazy_tensor_steps(quad, counter, Vector::Ones(2), t, 0.0, 1, 1e-3), ContractViolation);
  EXPECT_THROW(lazy_tensor_steps(quad, counter, Vector::Ones(2), t, 1.0, 1, 0.0), ContractViolation);
  EXPECT_EQ(counter.calls(), 0);
}
