#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "lazytensor/multilinear.hpp"

namespace lazytensor {

/// A nonempty subset of derivative orders {0,...,3}.
class OrderSet {
 public:
  OrderSet() = default;
  OrderSet(std::initializer_list<int> orders);

  /// {0, 1, ..., q}
  static OrderSet up_to(int q);

  OrderSet& insert(int order);
  bool contains(int order) const { return order >= 0 && order <= 3 && ((bits_ >> order) & 1U) != 0; }
  bool empty() const { return bits_ == 0; }
  int max() const;

 private:
  std::uint8_t bits_ = 0;
};

/// Result of one oracle query: f and the requested derivatives at one point.
class Derivatives {
 public:
  void set(int order, SymmetricTensor tensor);
  bool has(int order) const;
  const SymmetricTensor& at(int order) const;

  double value() const { return at(0).value(); }
  Vector gradient() const { return at(1).to_vector(); }

 private:
  std::array<std::optional<SymmetricTensor>, SymmetricTensor::kMaxOrder + 1> by_order_;
};

/// Cumulative count of oracle calls. One call is one evaluate() invocation,
/// whatever subset of orders it requests.
class OracleCounter {
 public:
  std::int64_t calls() const { return calls_.load(std::memory_order_relaxed); }
  void increment() { calls_.fetch_add(1, std::memory_order_relaxed); }

 private:
  std::atomic<std::int64_t> calls_{0};
};

class ProblemOracle {
 public:
  using EvalFn = std::function<Derivatives(const Vector& x, const OrderSet& orders)>;
  /// Lipschitz constant of the p-th derivative, indexed by p (entry 0 unused).
  using LipschitzTable = std::array<std::optional<double>, SymmetricTensor::kMaxOrder + 1>;

  ProblemOracle(std::string name, int dim, int max_order, EvalFn eval, Vector start,
                LipschitzTable lipschitz = {}, std::optional<double> f_low = std::nullopt);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  int max_order() const { return max_order_; }
  const Vector& start() const { return start_; }
  std::optional<double> lipschitz(int p) const;
  std::optional<double> f_low() const { return f_low_; }

  /// Exact derivatives without touching any counter. Reserved for test
  /// oracles and diagnostics; algorithms go through evaluate().
  Derivatives evaluate_uncounted(const Vector& x, const OrderSet& orders) const;

 private:
  std::string name_;
  int dim_;
  int max_order_;
  EvalFn eval_;
  Vector start_;
  LipschitzTable lipschitz_;
  std::optional<double> f_low_;
};

/// Counted oracle call: validates the request, increments `counter` by exactly
/// one and returns the requested derivatives at x.
Derivatives evaluate(const ProblemOracle& problem, OracleCounter& counter, const Vector& x, const OrderSet& orders);

/// f(x) = 1/2 x^T A x for symmetric A.
ProblemOracle make_quadratic(const Matrix& a);

const std::vector<std::string>& builtin_problem_names();

/// One of: quadratic, rosenbrock_chain, cos_sum, cubic_sep, logistic_smooth.
/// Throws std::invalid_argument listing the valid names otherwise.
ProblemOracle builtin_problem(const std::string& name, int n);

}  // namespace lazytensor
