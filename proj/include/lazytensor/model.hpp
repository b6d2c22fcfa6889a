#pragma once

#include <vector>

#include "lazytensor/multilinear.hpp"

namespace lazytensor {

/// Outcome of the two inexact-acceptance predicates at a trial point y.
struct AcceptanceCheck {
  /// M(y) <= f(anchor)
  bool monotone = false;
  /// |grad M(y)| <= sigma / (2 p!) |y - anchor|^p
  bool stationarity = false;
  double grad_norm = 0.0;
  double step_norm = 0.0;
};

/// Regularized model around an anchor x:
///   M(y) = f(x) + sum_{i<p} (1/i!) grad^i f(x)[y-x]^i + (1/p!) T[y-x]^p
///          + sigma/(p+1)! |y-x|^{p+1}
/// with exact derivatives up to order p-1 and the finite-difference tensor T.
class RegularizedModel {
 public:
  /// `derivs[q-1]` holds grad^q f(anchor) for q = 1..p-1.
  RegularizedModel(Vector anchor, double f_anchor, std::vector<SymmetricTensor> derivs, RankOneSum tensor,
                   double sigma);

  int order() const { return tensor_.order(); }
  int dim() const { return static_cast<int>(anchor_.size()); }
  const Vector& anchor() const { return anchor_; }
  double f_anchor() const { return f_anchor_; }
  const std::vector<SymmetricTensor>& derivs() const { return derivs_; }
  const RankOneSum& tensor() const { return tensor_; }
  double sigma() const { return sigma_; }

  double value(const Vector& y) const;
  Vector gradient(const Vector& y) const;
  AcceptanceCheck check(const Vector& y) const;

  /// Same model in step coordinates s = y - anchor.
  double value_at_step(const Vector& s) const;
  Vector gradient_at_step(const Vector& s) const;
  AcceptanceCheck check_step(const Vector& s) const;

 private:
  Vector anchor_;
  double f_anchor_;
  std::vector<SymmetricTensor> derivs_;
  RankOneSum tensor_;
  double sigma_;
};

/// q! for 0 <= q <= 4, exact.
double factorial(int q);

double model_value(const RegularizedModel& model, const Vector& y);
Vector model_gradient(const RegularizedModel& model, const Vector& y);
AcceptanceCheck check_acceptance(const RegularizedModel& model, const Vector& y);

}  // namespace lazytensor
