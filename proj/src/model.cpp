#include "lazytensor/model.hpp"

#include <cmath>

#include "lazytensor/errors.hpp"

namespace lazytensor {

double factorial(int q) {
  static constexpr int kTable[] = {1, 1, 2, 6, 24};
  detail::require(q >= 0 && q <= 4, "factorial table covers 0..4");
  return static_cast<double>(kTable[q]);
}

RegularizedModel::RegularizedModel(Vector anchor, double f_anchor, std::vector<SymmetricTensor> derivs,
                                   RankOneSum tensor, double sigma)
    : anchor_(std::move(anchor)),
      f_anchor_(f_anchor),
      derivs_(std::move(derivs)),
      tensor_(std::move(tensor)),
      sigma_(sigma) {
  detail::require(sigma_ > 0.0 && std::isfinite(sigma_), "sigma must be positive");
  detail::require(std::isfinite(f_anchor_), "f(anchor) must be finite");
  detail::require(anchor_.allFinite(), "anchor must be finite");
  detail::require(tensor_.dim() == dim(), "tensor dimension does not match anchor");
  detail::require(static_cast<int>(derivs_.size()) == order() - 1, "need derivatives of orders 1..p-1");
  for (std::size_t q = 0; q < derivs_.size(); ++q) {
    detail::require(derivs_[q].order() == static_cast<int>(q) + 1, "derivs[q-1] must have order q");
    detail::require(derivs_[q].dim() == dim(), "derivative dimension does not match anchor");
  }
}

double RegularizedModel::value_at_step(const Vector& s) const {
  detail::require(s.size() == dim(), "step dimension does not match model");
  const int p = order();
  double taylor = 0.0;
  for (int i = 1; i < p; ++i) taylor += eval_power(derivs_[i - 1], s) / factorial(i);
  const double approx = rank_one_sum_eval(tensor_, s) / factorial(p);
  const double reg = sigma_ / factorial(p + 1) * std::pow(s.norm(), p + 1);
  return f_anchor_ + taylor + approx + reg;
}

Vector RegularizedModel::gradient_at_step(const Vector& s) const {
  detail::require(s.size() == dim(), "step dimension does not match model");
  const int p = order();
  Vector g = rank_one_sum_gradient(tensor_, s) / factorial(p);
  for (int i = 1; i < p; ++i) g += contract_to_vector(derivs_[i - 1], s) / factorial(i - 1);
  g += (sigma_ / factorial(p) * std::pow(s.norm(), p - 1)) * s;
  return g;
}

AcceptanceCheck RegularizedModel::check_step(const Vector& s) const {
  const int p = order();
  AcceptanceCheck c;
  c.step_norm = s.norm();
  c.grad_norm = gradient_at_step(s).norm();
  c.monotone = value_at_step(s) <= f_anchor_;
  c.stationarity = c.grad_norm <= sigma_ / (2.0 * factorial(p)) * std::pow(c.step_norm, p);
  return c;
}

double RegularizedModel::value(const Vector& y) const {
  detail::require(y.size() == dim(), "point dimension does not match model");
  return value_at_step(y - anchor_);
}

Vector RegularizedModel::gradient(const Vector& y) const {
  detail::require(y.size() == dim(), "point dimension does not match model");
  return gradient_at_step(y - anchor_);
}

AcceptanceCheck RegularizedModel::check(const Vector& y) const {
  detail::require(y.size() == dim(), "point dimension does not match model");
  return check_step(y - anchor_);
}

double model_value(const RegularizedModel& model, const Vector& y) { return model.value(y); }
Vector model_gradient(const RegularizedModel& model, const Vector& y) { return model.gradient(y); }
AcceptanceCheck check_acceptance(const RegularizedModel& model, const Vector& y) { return model.check(y); }

}  // namespace lazytensor
