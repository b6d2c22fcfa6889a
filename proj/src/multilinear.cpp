#include "lazytensor/multilinear.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "lazytensor/errors.hpp"

namespace lazytensor {

namespace {

std::size_t flat_size(int order, int dim) {
  std::size_t size = 1;
  for (int q = 0; q < order; ++q) size *= static_cast<std::size_t>(dim);
  return size;
}

void require_shape(int order, int dim) {
  if (order < 0 || order > SymmetricTensor::kMaxOrder) {
    throw UnsupportedOrder("symmetric tensors are supported for orders 0..3");
  }
  detail::require(dim >= 1, "tensor dimension must be >= 1");
}

void require_dim(const SymmetricTensor& t, const Vector& h) {
  if (h.size() != t.dim()) throw ContractViolation("direction dimension does not match tensor");
}

}  // namespace

SymmetricTensor::SymmetricTensor(int order, int dim, std::vector<double> entries)
    : order_(order), dim_(dim), entries_(std::move(entries)) {
  for (double e : entries_) {
    if (!std::isfinite(e)) throw ContractViolation("tensor entries must be finite");
  }
}

SymmetricTensor SymmetricTensor::zeros(int order, int dim) {
  require_shape(order, dim);
  return SymmetricTensor(order, dim, std::vector<double>(flat_size(order, dim), 0.0));
}

SymmetricTensor SymmetricTensor::scalar(double value, int dim) {
  require_shape(0, dim);
  return SymmetricTensor(0, dim, {value});
}

SymmetricTensor SymmetricTensor::from_vector(const Vector& v) {
  require_shape(1, static_cast<int>(v.size()));
  return SymmetricTensor(1, static_cast<int>(v.size()), std::vector<double>(v.data(), v.data() + v.size()));
}

SymmetricTensor SymmetricTensor::from_matrix(const Matrix& a) {
  detail::require(a.rows() == a.cols(), "matrix must be square");
  const int n = static_cast<int>(a.rows());
  require_shape(2, n);
  std::vector<double> e(flat_size(2, n));
  for (int i = 0; i < n; ++i) {
    e[i * n + i] = a(i, i);
    for (int j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (a(i, j) + a(j, i));
      e[i * n + j] = avg;
      e[j * n + i] = avg;
    }
  }
  return SymmetricTensor(2, n, std::move(e));
}

SymmetricTensor SymmetricTensor::diagonal(int order, const Vector& diag) {
  const int n = static_cast<int>(diag.size());
  require_shape(order, n);
  detail::require(order >= 1, "diagonal tensors need order >= 1");
  std::vector<double> e(flat_size(order, n), 0.0);
  std::size_t stride = 0;
  for (int q = 0; q < order; ++q) stride = stride * n + 1;
  for (int i = 0; i < n; ++i) e[i * stride] = diag[i];
  return SymmetricTensor(order, n, std::move(e));
}

SymmetricTensor SymmetricTensor::symmetrized(int order, int dim, std::vector<double> raw) {
  require_shape(order, dim);
  if (raw.size() != flat_size(order, dim)) throw ContractViolation("raw entry count must be dim^order");
  const int n = dim;
  switch (order) {
    case 0:
    case 1:
      return SymmetricTensor(order, dim, std::move(raw));
    case 2: {
      std::vector<double> e(raw.size());
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
          const double avg = 0.5 * (raw[i * n + j] + raw[j * n + i]);
          e[i * n + j] = avg;
          e[j * n + i] = avg;
        }
      }
      return SymmetricTensor(2, n, std::move(e));
    }
    default: {
      std::vector<double> e(raw.size());
      auto at = [n](int i, int j, int k) { return static_cast<std::size_t>((i * n + j) * n + k); };
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
          for (int k = j; k < n; ++k) {
            const std::array<std::size_t, 6> perms = {at(i, j, k), at(i, k, j), at(j, i, k),
                                                      at(j, k, i), at(k, i, j), at(k, j, i)};
            double sum = 0.0;
            for (std::size_t idx : perms) sum += raw[idx];
            const double avg = sum / 6.0;
            for (std::size_t idx : perms) e[idx] = avg;
          }
        }
      }
      return SymmetricTensor(3, n, std::move(e));
    }
  }
}

double SymmetricTensor::value() const {
  detail::require(order_ == 0, "value() needs an order-0 tensor");
  return entries_[0];
}

Vector SymmetricTensor::to_vector() const {
  detail::require(order_ == 1, "to_vector() needs an order-1 tensor");
  return Eigen::Map<const Vector>(entries_.data(), dim_);
}

Matrix SymmetricTensor::to_matrix() const {
  detail::require(order_ == 2, "to_matrix() needs an order-2 tensor");
  // Row-major storage, but the matrix is symmetric so either layout works.
  return Eigen::Map<const Matrix>(entries_.data(), dim_, dim_);
}

double SymmetricTensor::frobenius_norm() const {
  double sum = 0.0;
  for (double e : entries_) sum += e * e;
  return std::sqrt(sum);
}

double SymmetricTensor::max_abs_entry() const {
  double best = 0.0;
  for (double e : entries_) best = std::max(best, std::abs(e));
  return best;
}

SymmetricTensor& SymmetricTensor::operator+=(const SymmetricTensor& other) {
  detail::require(order_ == other.order_ && dim_ == other.dim_, "tensor shapes differ");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
  return *this;
}

SymmetricTensor& SymmetricTensor::operator-=(const SymmetricTensor& other) {
  detail::require(order_ == other.order_ && dim_ == other.dim_, "tensor shapes differ");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
  return *this;
}

SymmetricTensor& SymmetricTensor::operator*=(double scale) {
  for (double& e : entries_) e *= scale;
  return *this;
}

double eval_power(const SymmetricTensor& t, const Vector& h) {
  if (t.order() == 0) return t.value();
  require_dim(t, h);
  return contract_to_vector(t, h).dot(h);
}

Vector contract_to_vector(const SymmetricTensor& t, const Vector& h) {
  require_dim(t, h);
  const int n = t.dim();
  switch (t.order()) {
    case 0:
      throw ContractViolation("cannot contract an order-0 tensor to a vector");
    case 1:
      return t.to_vector();
    case 2: {
      Vector v = Vector::Zero(n);
      for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += t(i, j) * h[j];
        v[i] = acc;
      }
      return v;
    }
    default: {
      // v_u = sum_{i,j} T[u,i,j] h_i h_j, using symmetry to read rows contiguously.
      Vector v = Vector::Zero(n);
      for (int u = 0; u < n; ++u) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
          double row = 0.0;
          for (int j = 0; j < n; ++j) row += t(u, i, j) * h[j];
          acc += row * h[i];
        }
        v[u] = acc;
      }
      return v;
    }
  }
}

namespace {

// Shifted symmetric higher-order power method for max_{|x|=1} T[x]^3. The
// shift makes x -> T[x]^3 + alpha |x|^3 convex so the ascent is monotone.
double order3_power_iteration(const SymmetricTensor& t, Vector x, double shift, int max_iterations) {
  x.normalize();
  double value = eval_power(t, x);
  for (int it = 0; it < max_iterations; ++it) {
    Vector next = contract_to_vector(t, x) + shift * x;
    const double norm = next.norm();
    if (norm == 0.0) break;
    next /= norm;
    const double next_value = eval_power(t, next);
    const double change = (next - x).norm();
    x = std::move(next);
    value = next_value;
    if (change < 1e-14) break;
  }
  return value;
}

}  // namespace

double operator_norm(const SymmetricTensor& t, const NormOptions& options) {
  switch (t.order()) {
    case 0:
      return std::abs(t.value());
    case 1:
      return t.to_vector().norm();
    case 2: {
      Eigen::SelfAdjointEigenSolver<Matrix> solver(t.to_matrix(), Eigen::EigenvaluesOnly);
      return solver.eigenvalues().cwiseAbs().maxCoeff();
    }
    default:
      break;
  }
  const int n = t.dim();
  const double frob = t.frobenius_norm();
  if (frob == 0.0) return 0.0;
  const double shift = 2.0 * frob;

  // |T[x]^3| is even in x, so maximizing T[x]^3 over the sphere suffices.
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    for (double sign : {1.0, -1.0}) {
      Vector x = Vector::Zero(n);
      x[i] = sign;
      best = std::max(best, order3_power_iteration(t, x, shift, options.max_iterations));
    }
  }
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int r = 0; r < std::max(options.restarts, 16); ++r) {
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = gauss(rng);
    if (x.norm() == 0.0) x[0] = 1.0;
    best = std::max(best, order3_power_iteration(t, x, shift, options.max_iterations));
  }
  return best;
}

RankOneSum::RankOneSum(std::vector<SymmetricTensor> slices) : slices_(std::move(slices)) {
  detail::require(!slices_.empty(), "a finite-difference tensor needs at least one slice");
  const int n = dim();
  const int slice_order = slices_.front().order();
  detail::require(slice_order < SymmetricTensor::kMaxOrder, "finite-difference tensors are supported for p <= 3");
  for (const auto& s : slices_) {
    detail::require(s.order() == slice_order, "all slices must share one order");
    detail::require(s.dim() == n, "slice dimension must equal the number of slices");
  }
  order_ = slice_order + 1;
}

double rank_one_sum_eval(const RankOneSum& r, const Vector& s) {
  if (s.size() != r.dim()) throw ContractViolation("direction dimension does not match tensor");
  double acc = 0.0;
  for (int i = 0; i < r.dim(); ++i) acc += eval_power(r.slice(i), s) * s[i];
  return acc;
}

Vector rank_one_sum_gradient(const RankOneSum& r, const Vector& s) {
  const int n = r.dim();
  if (s.size() != n) throw ContractViolation("direction dimension does not match tensor");
  const int p = r.order();
  Vector g = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    const SymmetricTensor& d = r.slice(i);
    g[i] += eval_power(d, s);
    if (p >= 2) g += (static_cast<double>(p - 1) * s[i]) * contract_to_vector(d, s);
  }
  return g;
}

SymmetricTensor symmetrize(const RankOneSum& r) {
  const int n = r.dim();
  const int p = r.order();
  if (p > SymmetricTensor::kMaxOrder) throw UnsupportedOrder("symmetrization is supported for p <= 3");
  // Raw entry T[i_1,...,i_p] = D_{i_p}[i_1,...,i_{p-1}].
  std::vector<double> raw(flat_size(p, n));
  const std::size_t slice_size = flat_size(p - 1, n);
  for (int last = 0; last < n; ++last) {
    const auto entries = r.slice(last).entries();
    for (std::size_t head = 0; head < slice_size; ++head) raw[head * n + last] = entries[head];
  }
  return SymmetricTensor::symmetrized(p, n, std::move(raw));
}

}  // namespace lazytensor
