#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace lazytensor {

/// Caller broke a documented precondition (dimension mismatch, nonpositive
/// parameter, non-finite input).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A derivative order beyond what a problem or routine supports.
class UnsupportedOrder : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// z + h e_i rounds back to z, so the forward difference is meaningless.
class DegenerateStep : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative numerical routine did not converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The inner solver exhausted its budget without certifying both acceptance
/// predicates. Carries the best point it found.
class SubsolveFailure : public std::runtime_error {
 public:
  SubsolveFailure(const std::string& what, Eigen::VectorXd best_point, int iterations)
      : std::runtime_error(what), best_point_(std::move(best_point)), iterations_(iterations) {}

  const Eigen::VectorXd& best_point() const { return best_point_; }
  int iterations() const { return iterations_; }

 private:
  Eigen::VectorXd best_point_;
  int iterations_;
};

namespace detail {

inline void require(bool condition, const char* message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace detail

}  // namespace lazytensor
