#include "lazytensor/fdtensor.hpp"

#include <cmath>
#include <string>

#include "lazytensor/errors.hpp"

namespace lazytensor {

double regularization(double lipschitz_estimate, int m, int p) {
  detail::require(lipschitz_estimate > 0.0 && std::isfinite(lipschitz_estimate), "Lipschitz estimate must be positive");
  detail::require(m >= 1, "m must be >= 1");
  detail::require(p >= 1, "p must be >= 1");
  return 11.0 * (p + 1) * lipschitz_estimate * m;
}

double fd_stepsize(double sigma, double eps, int p, int n) {
  detail::require(sigma > 0.0, "sigma must be positive");
  detail::require(eps > 0.0, "eps must be positive");
  detail::require(p >= 1, "p must be >= 1");
  detail::require(n >= 1, "n must be >= 1");
  const double pd = p;
  const double numerator = std::pow(sigma, pd) * std::pow(eps, (pd + 1.0) / pd);
  const double denominator = std::pow(8.0 * (pd + 1.0), pd) * 128.0 * std::pow(3.0, 1.0 / pd) * std::pow(sigma, 1.0 / pd);
  return 4.0 / (sigma * std::sqrt(static_cast<double>(n))) * std::pow(numerator / denominator, 1.0 / (pd + 1.0));
}

FdSchedule schedule(double lipschitz_estimate, int m, int p, int n, double eps) {
  FdSchedule s;
  s.sigma = regularization(lipschitz_estimate, m, p);
  s.h_formula = fd_stepsize(s.sigma, eps, p, n);
  s.h = s.h_formula;
  s.epsilon = eps;
  s.p = p;
  s.n = n;
  s.m = m;
  return s;
}

double stepsize_floor(const Vector& z) { return std::ldexp(1.0, -26) * (1.0 + z.lpNorm<Eigen::Infinity>()); }

FdSchedule apply_floor(FdSchedule s, const Vector& z) {
  const double floor = stepsize_floor(z);
  if (s.h < floor) {
    s.h = floor;
    s.floored = true;
  }
  return s;
}

RankOneSum build_fd_tensor(const ProblemOracle& problem, OracleCounter& counter, const Vector& z, double h, int p) {
  detail::require(p >= 1, "p must be >= 1");
  const Derivatives base = evaluate(problem, counter, z, OrderSet{p - 1});
  return build_fd_tensor(problem, counter, z, base.at(p - 1), h, p);
}

RankOneSum build_fd_tensor(const ProblemOracle& problem, OracleCounter& counter, const Vector& z,
                           const SymmetricTensor& base, double h, int p) {
  detail::require(h > 0.0 && std::isfinite(h), "finite-difference step must be positive");
  detail::require(p >= 1 && p <= SymmetricTensor::kMaxOrder, "p must lie in 1..3");
  if (problem.max_order() < p - 1) {
    throw UnsupportedOrder("finite-difference tensor of order " + std::to_string(p) + " needs derivatives of order " +
                           std::to_string(p - 1));
  }
  detail::require(base.order() == p - 1 && base.dim() == problem.dim(), "base derivative has the wrong shape");
  const int n = problem.dim();
  detail::require(z.size() == n, "point dimension does not match problem");

  std::vector<SymmetricTensor> slices;
  slices.reserve(n);
  for (int i = 0; i < n; ++i) {
    Vector probe = z;
    probe[i] += h;
    if (probe[i] == z[i]) throw DegenerateStep("z + h e_" + std::to_string(i) + " rounds to z");
    // The realized increment can differ from h in the last bits; the
    // analyzed scheme divides by h, so we do too.
    SymmetricTensor slice = evaluate(problem, counter, probe, OrderSet{p - 1}).at(p - 1);
    slice -= base;
    slice *= 1.0 / h;
    slices.push_back(std::move(slice));
  }
  return RankOneSum(std::move(slices));
}

double fd_error(const ProblemOracle& problem, const Vector& z, const RankOneSum& tensor, const NormOptions& options) {
  const int p = tensor.order();
  if (problem.max_order() < p) {
    throw UnsupportedOrder("fd_error needs the exact derivative of order " + std::to_string(p));
  }
  const SymmetricTensor exact = problem.evaluate_uncounted(z, OrderSet{p}).at(p);
  return operator_norm(symmetrize(tensor) - exact, options);
}

}  // namespace lazytensor
