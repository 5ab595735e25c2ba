#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <filesystem>

#include "swta/pattern.hpp"

namespace swta {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Lateral connection strengths; row i holds the inputs neuron i receives,
/// so c_i = sum_j w(i, j) c_j.
struct WeightMatrix {
  Matrix w;

  WeightMatrix() = default;
  explicit WeightMatrix(Matrix m) : w(std::move(m)) {}
  static WeightMatrix zeros(std::size_t n) { return WeightMatrix(Matrix::Zero(n, n)); }

  std::size_t size() const noexcept { return static_cast<std::size_t>(w.rows()); }
  bool is_finite() const { return w.allFinite(); }
  bool has_zero_diagonal() const { return (w.diagonal().array() == 0.0).all(); }
  bool within(double lo, double hi) const {
    return (w.array() >= lo).all() && (w.array() <= hi).all();
  }
  /// Largest absolute row sum (the infinity norm).
  double max_abs_row_sum() const { return w.cwiseAbs().rowwise().sum().maxCoeff(); }
};

/// D = I + W + W^2 + W^3.
struct Resolvent {
  Matrix d;
};

/// T(i, j) = sum over sources k of D(i, k) D(j, k).
struct CorrelationTensor {
  Matrix t;
  ActiveSet source;

  bool empty_source() const noexcept { return source.empty(); }
};

struct Response {
  Pattern activity;  // raw clamped at zero, same shape as the source
  Vector raw;
};

Resolvent truncated_resolvent(const Matrix& w);
inline Resolvent truncated_resolvent(const WeightMatrix& w) { return truncated_resolvent(w.w); }

/// c = D s. Throws Shape on a size mismatch.
Response equilibrium_response(const Resolvent& d, const Pattern& s);

/// Gram form over the source columns of D. An empty source set yields the
/// zero tensor with `empty_source()` set. Throws Parameter on an
/// out-of-range index.
CorrelationTensor correlation_tensor(const Resolvent& d, const ActiveSet& sources);

// Matrix CSV: first line `n`, then n lines of n comma separated reals.
void write_matrix_csv(const Matrix& m, const std::filesystem::path& path);
Matrix read_matrix_csv(const std::filesystem::path& path);

/// Grayscale rendering, min -> black, max -> white (flat matrices are mid gray).
void write_matrix_pgm(const Matrix& m, const std::filesystem::path& path);

}  // namespace swta
