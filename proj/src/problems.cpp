#include "lazytensor/problems.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "lazytensor/errors.hpp"

namespace lazytensor {

OrderSet::OrderSet(std::initializer_list<int> orders) {
  for (int q : orders) insert(q);
}

OrderSet OrderSet::up_to(int q) {
  OrderSet set;
  for (int i = 0; i <= q; ++i) set.insert(i);
  return set;
}

OrderSet& OrderSet::insert(int order) {
  if (order < 0 || order > SymmetricTensor::kMaxOrder) {
    throw UnsupportedOrder("derivative orders must lie in 0..3, got " + std::to_string(order));
  }
  bits_ |= static_cast<std::uint8_t>(1U << order);
  return *this;
}

int OrderSet::max() const {
  for (int q = SymmetricTensor::kMaxOrder; q >= 0; --q) {
    if (contains(q)) return q;
  }
  return -1;
}

void Derivatives::set(int order, SymmetricTensor tensor) {
  detail::require(order >= 0 && order <= SymmetricTensor::kMaxOrder, "derivative order out of range");
  detail::require(tensor.order() == order, "derivative of order q must be a tensor of order q");
  by_order_[order] = std::move(tensor);
}

bool Derivatives::has(int order) const {
  return order >= 0 && order <= SymmetricTensor::kMaxOrder && by_order_[order].has_value();
}

const SymmetricTensor& Derivatives::at(int order) const {
  if (!has(order)) throw ContractViolation("derivative of order " + std::to_string(order) + " was not requested");
  return *by_order_[order];
}

ProblemOracle::ProblemOracle(std::string name, int dim, int max_order, EvalFn eval, Vector start,
                             LipschitzTable lipschitz, std::optional<double> f_low)
    : name_(std::move(name)),
      dim_(dim),
      max_order_(max_order),
      eval_(std::move(eval)),
      start_(std::move(start)),
      lipschitz_(lipschitz),
      f_low_(f_low) {
  detail::require(dim_ >= 1, "problem dimension must be >= 1");
  detail::require(max_order_ >= 0 && max_order_ <= SymmetricTensor::kMaxOrder, "max_order must lie in 0..3");
  detail::require(start_.size() == dim_, "start point dimension mismatch");
  detail::require(static_cast<bool>(eval_), "evaluation callback is empty");
}

std::optional<double> ProblemOracle::lipschitz(int p) const {
  if (p < 1 || p > SymmetricTensor::kMaxOrder) return std::nullopt;
  return lipschitz_[p];
}

Derivatives ProblemOracle::evaluate_uncounted(const Vector& x, const OrderSet& orders) const {
  detail::require(!orders.empty(), "oracle request must name at least one order");
  if (orders.max() > max_order_) {
    throw UnsupportedOrder("problem '" + name_ + "' provides derivatives up to order " + std::to_string(max_order_) +
                           ", requested " + std::to_string(orders.max()));
  }
  detail::require(x.size() == dim_, "point dimension does not match problem");
  detail::require(x.allFinite(), "oracle point must be finite");
  return eval_(x, orders);
}

Derivatives evaluate(const ProblemOracle& problem, OracleCounter& counter, const Vector& x, const OrderSet& orders) {
  Derivatives d = problem.evaluate_uncounted(x, orders);
  counter.increment();
  return d;
}

namespace {

// f(x) = sum_i phi(x_i) - <b, x>, where phi_derivative(t, k) is the k-th
// derivative of phi at t for k = 0..3. Every derivative tensor is diagonal.
ProblemOracle::EvalFn separable(std::function<double(double, int)> phi_derivative, Vector linear) {
  return [phi = std::move(phi_derivative), b = std::move(linear)](const Vector& x, const OrderSet& orders) {
    const int n = static_cast<int>(x.size());
    Derivatives d;
    for (int q = 0; q <= SymmetricTensor::kMaxOrder; ++q) {
      if (!orders.contains(q)) continue;
      Vector diag(n);
      for (int i = 0; i < n; ++i) diag[i] = phi(x[i], q);
      if (q == 0) {
        d.set(0, SymmetricTensor::scalar(diag.sum() - b.dot(x), n));
      } else if (q == 1) {
        d.set(1, SymmetricTensor::from_vector(diag - b));
      } else {
        d.set(q, SymmetricTensor::diagonal(q, diag));
      }
    }
    return d;
  };
}

double cos_derivative(double t, int k) {
  switch (k % 4) {
    case 0: return std::cos(t);
    case 1: return -std::sin(t);
    case 2: return -std::cos(t);
    default: return std::sin(t);
  }
}

// phi(t) = t^3 / 3 + t
double cubic_derivative(double t, int k) {
  switch (k) {
    case 0: return t * t * t / 3.0 + t;
    case 1: return t * t + 1.0;
    case 2: return 2.0 * t;
    default: return 2.0;
  }
}

// phi(t) = log(1 + e^t), written to stay finite for large |t|.
double softplus_derivative(double t, int k) {
  if (k == 0) return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
  const double s = 1.0 / (1.0 + std::exp(-t));
  const double u = s * (1.0 - s);
  switch (k) {
    case 1: return s;
    case 2: return u;
    default: return u * (1.0 - 2.0 * s);
  }
}

ProblemOracle rosenbrock_chain(int n) {
  detail::require(n >= 2, "rosenbrock_chain needs n >= 2");
  auto eval = [](const Vector& x, const OrderSet& orders) {
    const int n = static_cast<int>(x.size());
    Derivatives d;
    if (orders.contains(0)) {
      double f = 0.0;
      for (int i = 0; i + 1 < n; ++i) {
        const double u = x[i + 1] - x[i] * x[i];
        f += 100.0 * u * u + (1.0 - x[i]) * (1.0 - x[i]);
      }
      d.set(0, SymmetricTensor::scalar(f, n));
    }
    if (orders.contains(1)) {
      Vector g = Vector::Zero(n);
      for (int i = 0; i + 1 < n; ++i) {
        const double u = x[i + 1] - x[i] * x[i];
        g[i] += -400.0 * x[i] * u - 2.0 * (1.0 - x[i]);
        g[i + 1] += 200.0 * u;
      }
      d.set(1, SymmetricTensor::from_vector(g));
    }
    if (orders.contains(2)) {
      Matrix h = Matrix::Zero(n, n);
      for (int i = 0; i + 1 < n; ++i) {
        h(i, i) += 1200.0 * x[i] * x[i] - 400.0 * x[i + 1] + 2.0;
        h(i, i + 1) += -400.0 * x[i];
        h(i + 1, i) += -400.0 * x[i];
        h(i + 1, i + 1) += 200.0;
      }
      d.set(2, SymmetricTensor::from_matrix(h));
    }
    if (orders.contains(3)) {
      std::vector<double> raw(static_cast<std::size_t>(n) * n * n, 0.0);
      auto at = [n](int i, int j, int k) { return static_cast<std::size_t>((i * n + j) * n + k); };
      for (int i = 0; i + 1 < n; ++i) {
        raw[at(i, i, i)] += 2400.0 * x[i];
        raw[at(i, i, i + 1)] += -400.0;
        raw[at(i, i + 1, i)] += -400.0;
        raw[at(i + 1, i, i)] += -400.0;
      }
      d.set(3, SymmetricTensor::symmetrized(3, n, std::move(raw)));
    }
    return d;
  };
  Vector start(n);
  for (int i = 0; i < n; ++i) start[i] = (i % 2 == 0) ? -1.2 : 1.0;
  return ProblemOracle("rosenbrock_chain", n, 3, eval, start, {}, 0.0);
}

}  // namespace

ProblemOracle make_quadratic(const Matrix& a) {
  detail::require(a.rows() == a.cols() && a.rows() >= 1, "quadratic needs a nonempty square matrix");
  const Matrix sym = 0.5 * (a + a.transpose());
  const int n = static_cast<int>(sym.rows());
  auto eval = [sym](const Vector& x, const OrderSet& orders) {
    const int n = static_cast<int>(x.size());
    Derivatives d;
    const Vector ax = sym * x;
    if (orders.contains(0)) d.set(0, SymmetricTensor::scalar(0.5 * x.dot(ax), n));
    if (orders.contains(1)) d.set(1, SymmetricTensor::from_vector(ax));
    if (orders.contains(2)) d.set(2, SymmetricTensor::from_matrix(sym));
    if (orders.contains(3)) d.set(3, SymmetricTensor::zeros(3, n));
    return d;
  };
  const double spectral = operator_norm(SymmetricTensor::from_matrix(sym));
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  std::optional<double> f_low;
  if (solver.eigenvalues().minCoeff() >= 0.0) f_low = 0.0;
  return ProblemOracle("quadratic", n, 3, eval, Vector::Ones(n), {std::nullopt, spectral, 0.0, 0.0}, f_low);
}

const std::vector<std::string>& builtin_problem_names() {
  static const std::vector<std::string> names = {"quadratic", "rosenbrock_chain", "cos_sum", "cubic_sep",
                                                 "logistic_smooth"};
  return names;
}

ProblemOracle builtin_problem(const std::string& name, int n) {
  detail::require(n >= 1, "problem dimension must be >= 1");
  if (name == "quadratic") return make_quadratic(Matrix::Identity(n, n));
  if (name == "rosenbrock_chain") return rosenbrock_chain(n);
  if (name == "cos_sum") {
    Vector start(n);
    for (int i = 0; i < n; ++i) start[i] = 1.0 + 0.1 * i;
    return ProblemOracle("cos_sum", n, 3, separable(cos_derivative, Vector::Zero(n)), start, {std::nullopt, 1.0, 1.0, 1.0},
                         -static_cast<double>(n));
  }
  if (name == "cubic_sep") {
    // Unbounded below; |phi'''| = 2 makes the Hessian 2-Lipschitz.
    return ProblemOracle("cubic_sep", n, 3, separable(cubic_derivative, Vector::Zero(n)), Vector::Constant(n, 0.5),
                         {std::nullopt, std::nullopt, 2.0, 0.0}, std::nullopt);
  }
  if (name == "logistic_smooth") {
    Vector b(n);
    for (int i = 0; i < n; ++i) b[i] = n == 1 ? 0.3 : 0.2 + 0.6 * i / (n - 1);
    // Minimizer x_i = logit(b_i) with value sum of binary entropies.
    double f_low = 0.0;
    for (int i = 0; i < n; ++i) f_low += -b[i] * std::log(b[i]) - (1.0 - b[i]) * std::log(1.0 - b[i]);
    Vector start(n);
    for (int i = 0; i < n; ++i) start[i] = (i % 2 == 0) ? 2.0 : -2.0;
    // sup |phi^(p+1)| for the logistic softplus: 1/4, sqrt(3)/18, 1/8.
    return ProblemOracle("logistic_smooth", n, 3, separable(softplus_derivative, b), start,
                         {std::nullopt, 0.25, std::sqrt(3.0) / 18.0, 0.125}, f_low);
  }
  std::ostringstream msg;
  msg << "unknown problem '" << name << "'; valid names:";
  for (const auto& valid : builtin_problem_names()) msg << ' ' << valid;
  throw std::invalid_argument(msg.str());
}

}  // namespace lazytensor
