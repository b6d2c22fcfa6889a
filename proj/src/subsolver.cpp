#include "lazytensor/subsolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "lazytensor/errors.hpp"

namespace lazytensor {

namespace {

constexpr int kSecularMaxIterations = 200;
constexpr double kArmijo = 1e-4;

// Components of g_rotated this small relative to |g| are treated as exactly
// orthogonal to their eigenvector when deciding the hard case.
double negligible_component(const Vector& g_rotated) { return 1e-12 * g_rotated.norm(); }

// |(Lambda + (sigma/2) r I)^{-1} g| together with d/dr of that norm.
struct SecularValue {
  double step_norm;
  double derivative;
};

SecularValue secular_norm(const Vector& eigenvalues, const Vector& g_rotated, double sigma, double r) {
  const double tiny = negligible_component(g_rotated);
  double sq = 0.0;
  double cube = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    const double gi = g_rotated[i];
    if (std::abs(gi) <= tiny) continue;
    const double d = eigenvalues[i] + 0.5 * sigma * r;
    if (d <= 0.0) return {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    sq += gi * gi / (d * d);
    cube += gi * gi / (d * d * d);
  }
  const double norm = std::sqrt(sq);
  const double derivative = norm > 0.0 ? -0.5 * sigma * cube / norm : 0.0;
  return {norm, derivative};
}

bool lexicographic_less(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

double cubic_model(const Vector& g, const Matrix& b, double sigma, const Vector& s) {
  return g.dot(s) + 0.5 * s.dot(b * s) + sigma / 6.0 * std::pow(s.norm(), 3);
}

// Upper bound on the curvature of the model along any direction within
// radius |s| of the anchor; seeds the first backtracking trial.
double curvature_proxy(const RegularizedModel& model, const Vector& s) {
  const int p = model.order();
  const double radius = std::max(1.0, s.norm());
  double proxy = 1.0;
  for (int i = 2; i < p; ++i) proxy += model.derivs()[i - 1].frobenius_norm() * std::pow(radius, i - 2);
  if (p >= 2) {
    double slices = 0.0;
    for (const auto& d : model.tensor().slices()) slices += d.frobenius_norm();
    proxy += (p - 1) * slices * std::pow(radius, p - 2);
  }
  proxy += model.sigma() * std::pow(radius, p - 1);
  return proxy;
}

// The step actually represented by anchor + s once rounded to a point.
Vector realized(const RegularizedModel& model, const Vector& s) { return (model.anchor() + s) - model.anchor(); }

bool accepted_step(const RegularizedModel& model, const Vector& s) {
  const AcceptanceCheck c = model.check_step(realized(model, s));
  return c.monotone && c.stationarity;
}

SubsolveResult certified(const RegularizedModel& model, const Vector& step, int iterations) {
  SubsolveResult r;
  r.point = model.anchor() + step;
  const Vector s = r.point - model.anchor();
  r.inner_iterations = iterations;
  r.model_value_at_point = model.value_at_step(s);
  r.certificate = model.check_step(s);
  r.model_grad_norm = r.certificate.grad_norm;
  return r;
}

// Monotone backtracking gradient descent on the model in step coordinates.
// Returns once both predicates hold; throws SubsolveFailure otherwise.
SubsolveResult descend(const RegularizedModel& model, Vector s, int budget, int iterations_so_far) {
  double value = model.value_at_step(s);
  if (!(value <= model.f_anchor())) {
    s.setZero();
    value = model.value_at_step(s);
  }
  Vector grad = model.gradient_at_step(s);
  Vector prev_s;
  Vector prev_grad;
  int iterations = iterations_so_far;
  while (true) {
    if (accepted_step(model, s)) return certified(model, s, iterations);
    if (iterations >= budget) break;
    ++iterations;

    double alpha = 1.0 / curvature_proxy(model, s);
    if (prev_s.size() == s.size()) {
      const Vector ds = s - prev_s;
      const Vector dg = grad - prev_grad;
      const double curvature = ds.dot(dg);
      if (curvature > 0.0) alpha = ds.squaredNorm() / curvature;
    }
    const double grad_sq = grad.squaredNorm();
    Vector trial;
    double trial_value = 0.0;
    bool accepted = false;
    while (alpha * std::sqrt(grad_sq) > 1e-17 * (1.0 + s.norm())) {
      trial = s - alpha * grad;
      trial_value = model.value_at_step(trial);
      if (trial_value <= value - kArmijo * alpha * grad_sq) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
    prev_s = std::move(s);
    prev_grad = std::move(grad);
    s = std::move(trial);
    value = trial_value;
    grad = model.gradient_at_step(s);
  }
  throw SubsolveFailure("inner solver could not certify both acceptance predicates", model.anchor() + s, iterations);
}

}  // namespace

double secular_root(const Vector& eigenvalues, const Vector& g_rotated, double sigma) {
  detail::require(sigma > 0.0 && std::isfinite(sigma), "sigma must be positive");
  detail::require(eigenvalues.size() == g_rotated.size() && eigenvalues.size() >= 1, "eigen data size mismatch");
  const double lambda_min = eigenvalues.minCoeff();
  const double r_low = std::max(0.0, -2.0 * lambda_min / sigma);

  auto phi = [&](double r) { return secular_norm(eigenvalues, g_rotated, sigma, r).step_norm - r; };
  if (phi(r_low) <= 0.0) return r_low;

  double lo = r_low;
  double hi = std::max(2.0 * r_low, r_low + 1.0);
  for (int i = 0; phi(hi) > 0.0; ++i) {
    if (i > 2000) throw NumericalError("secular equation: could not bracket the root");
    lo = hi;
    hi *= 2.0;
  }

  double r = 0.5 * (lo + hi);
  for (int it = 0; it < kSecularMaxIterations; ++it) {
    const SecularValue sv = secular_norm(eigenvalues, g_rotated, sigma, r);
    const double value = sv.step_norm - r;
    if (std::abs(value) <= 1e-10 * (1.0 + r)) return r;
    if (value > 0.0) {
      lo = r;
    } else {
      hi = r;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return r;
    double next = r - value / (sv.derivative - 1.0);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    r = next;
  }
  throw NumericalError("secular equation did not converge in 200 iterations");
}

Vector cubic_regularized_step(const Vector& g, const Matrix& b, double sigma) {
  const Eigen::Index n = g.size();
  detail::require(b.rows() == n && b.cols() == n, "matrix dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(b);
  if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  const Vector& lambda = eig.eigenvalues();
  const Matrix& v = eig.eigenvectors();
  const Vector g_rot = v.transpose() * g;

  const double r = secular_root(lambda, g_rot, sigma);
  const double tiny = negligible_component(g_rot);
  Vector s_rot = Vector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = lambda[i] + 0.5 * sigma * r;
    if (std::abs(g_rot[i]) > tiny && d > 0.0) s_rot[i] = -g_rot[i] / d;
  }

  const double missing = r * r - s_rot.squaredNorm();
  const double r_low = std::max(0.0, -2.0 * lambda[0] / sigma);
  if (r > 0.0 && r == r_low && missing > 0.0) {
    // Hard case: fill the remaining length along the lowest eigenvector.
    const double tau = std::sqrt(missing);
    Vector plus_rot = s_rot;
    Vector minus_rot = s_rot;
    plus_rot[0] += tau;
    minus_rot[0] -= tau;
    const Vector plus = v * plus_rot;
    const Vector minus = v * minus_rot;
    const double m_plus = cubic_model(g, b, sigma, plus);
    const double m_minus = cubic_model(g, b, sigma, minus);
    if (m_plus < m_minus) return plus;
    if (m_minus < m_plus) return minus;
    return lexicographic_less(plus, minus) ? plus : minus;
  }
  return v * s_rot;
}

SubsolveResult subsolve(const RegularizedModel& model, int budget) {
  detail::require(budget >= 1, "inner budget must be >= 1");
  const int n = model.dim();
  const int p = model.order();
  const Vector zero = Vector::Zero(n);
  if (model.gradient_at_step(zero).norm() == 0.0) return certified(model, zero, 0);

  Vector candidate;
  switch (p) {
    case 1: {
      Vector t(n);
      for (int i = 0; i < n; ++i) t[i] = model.tensor().slice(i).value();
      candidate = -t / model.sigma();
      break;
    }
    case 2: {
      const Vector g = model.derivs()[0].to_vector();
      const Matrix b = symmetrize(model.tensor()).to_matrix();
      candidate = cubic_regularized_step(g, b, model.sigma());
      break;
    }
    default:
      return descend(model, zero, budget, 0);
  }
  if (accepted_step(model, candidate)) return certified(model, candidate, 1);
  return descend(model, candidate, budget, 1);
}

}  // namespace lazytensor
