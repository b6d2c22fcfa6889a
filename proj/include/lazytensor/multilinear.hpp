#pragma once

// Dense symmetric multilinear forms over R^n of order 0..3 and the
// unsymmetrized finite-difference tensor sum_i D_i (x) e_i.
//
// Order 0 is a scalar (used for function values and for the slices of a
// first-order finite-difference tensor); order 1 is a vector, order 2 a
// symmetric matrix and order 3 a fully symmetric cube.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace lazytensor {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class SymmetricTensor {
 public:
  static constexpr int kMaxOrder = 3;

  SymmetricTensor() = default;

  static SymmetricTensor zeros(int order, int dim);
  static SymmetricTensor scalar(double value, int dim);
  static SymmetricTensor from_vector(const Vector& v);
  /// Symmetric part of `a`, i.e. (a + a^T) / 2.
  static SymmetricTensor from_matrix(const Matrix& a);
  /// Tensor with `diag[i]` at (i,...,i) and zeros elsewhere.
  static SymmetricTensor diagonal(int order, const Vector& diag);
  /// Averages a raw row-major array of n^order entries over all index
  /// permutations. Every orbit is written from one computed average, so the
  /// result is exactly symmetric.
  static SymmetricTensor symmetrized(int order, int dim, std::vector<double> raw);

  int order() const { return order_; }
  int dim() const { return dim_; }
  std::span<const double> entries() const { return entries_; }

  double value() const;
  double operator()(int i) const { return entries_[i]; }
  double operator()(int i, int j) const { return entries_[i * dim_ + j]; }
  double operator()(int i, int j, int k) const { return entries_[(i * dim_ + j) * dim_ + k]; }

  Vector to_vector() const;
  Matrix to_matrix() const;

  double frobenius_norm() const;
  double max_abs_entry() const;

  SymmetricTensor& operator+=(const SymmetricTensor& other);
  SymmetricTensor& operator-=(const SymmetricTensor& other);
  SymmetricTensor& operator*=(double scale);

  friend SymmetricTensor operator+(SymmetricTensor a, const SymmetricTensor& b) { return a += b; }
  friend SymmetricTensor operator-(SymmetricTensor a, const SymmetricTensor& b) { return a -= b; }
  friend SymmetricTensor operator*(SymmetricTensor a, double s) { return a *= s; }
  friend SymmetricTensor operator*(double s, SymmetricTensor a) { return a *= s; }

 private:
  SymmetricTensor(int order, int dim, std::vector<double> entries);

  int order_ = 0;
  int dim_ = 0;
  std::vector<double> entries_{0.0};
};

/// T[h]^q. For order 0 this is the scalar itself.
double eval_power(const SymmetricTensor& t, const Vector& h);

/// The vector T[h]^{q-1}, i.e. v_u = T[h,...,h,e_u]. Order 1 returns the
/// tensor itself. Requires order >= 1.
Vector contract_to_vector(const SymmetricTensor& t, const Vector& h);

struct NormOptions {
  int restarts = 16;
  int max_iterations = 2000;
  std::uint64_t seed = 0x5eed;
};

/// Induced operator norm. Exact for order <= 2. For order 3 a lower bound from
/// shifted symmetric power iteration over basis and random starting points.
double operator_norm(const SymmetricTensor& t, const NormOptions& options = {});

/// T = sum_i D_i (x) e_i with every slice D_i a symmetric (p-1)-form, i.e.
/// T[h_1,...,h_p] = sum_i D_i[h_1,...,h_{p-1}] * h_p^(i). Not symmetric in
/// general and never materialized as a dense p-array.
class RankOneSum {
 public:
  explicit RankOneSum(std::vector<SymmetricTensor> slices);

  int order() const { return order_; }
  int dim() const { return static_cast<int>(slices_.size()); }
  const std::vector<SymmetricTensor>& slices() const { return slices_; }
  const SymmetricTensor& slice(int i) const { return slices_[i]; }

 private:
  std::vector<SymmetricTensor> slices_;
  int order_;
};

/// T[s]^p = sum_i D_i[s]^{p-1} s_i.
double rank_one_sum_eval(const RankOneSum& r, const Vector& s);

/// Gradient of s -> T[s]^p:
/// sum_i ((p-1) s_i D_i[s]^{p-2} + D_i[s]^{p-1} e_i).
Vector rank_one_sum_gradient(const RankOneSum& r, const Vector& s);

/// P_sym(T) as a dense symmetric tensor of order p.
SymmetricTensor symmetrize(const RankOneSum& r);

}  // namespace lazytensor
