#pragma once

// Independent reference implementations for the tests. Plain nested vectors
// and naive loops; nothing here touches Eigen or the library internals.

#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Mat = std::vector<std::vector<double>>;

inline Mat zeros(std::size_t n) { return Mat(n, std::vector<double>(n, 0.0)); }

inline Mat from_eigen(const Eigen::MatrixXd& m) {
  Mat out(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
  return out;
}

inline Eigen::MatrixXd to_eigen(const Mat& m) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(m.empty() ? 0 : m[0].size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m[i][j];
  return out;
}

inline Mat matmul(const Mat& a, const Mat& b) {
  const std::size_t n = a.size(), k = b.size(), m = b[0].size();
  Mat c(n, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l)
      for (std::size_t j = 0; j < m; ++j) c[i][j] += a[i][l] * b[l][j];
  return c;
}

/// exp(-((x - mu) / sigma)^2 / 2)
inline double gaussian(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z);
}

/// Gauss-Jordan with partial pivoting.
inline Mat inverse(Mat a) {
  const std::size_t n = a.size();
  Mat inv = zeros(n);
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (a[piv][col] == 0.0) throw std::runtime_error("singular");
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    const double p = a[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] /= p;
      inv[col][j] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

/// (I - W)^-1
inline Mat exact_resolvent(const Mat& w) {
  Mat a = zeros(w.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < w.size(); ++j) a[i][j] = (i == j ? 1.0 : 0.0) - w[i][j];
  return inverse(a);
}

/// I + W + W^2 + W^3 by repeated products.
inline Mat series3(const Mat& w) {
  const std::size_t n = w.size();
  Mat out = zeros(n), power = zeros(n);
  for (std::size_t i = 0; i < n; ++i) out[i][i] = power[i][i] = 1.0;
  for (int k = 1; k <= 3; ++k) {
    power = matmul(power, w);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out[i][j] += power[i][j];
  }
  return out;
}

/// T_ij = sum over sources s of D_is D_js, then symmetrized.
inline Mat correlation(const Mat& d, const std::vector<std::size_t>& sources) {
  const std::size_t n = d.size();
  Mat t = zeros(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t s : sources) t[i][j] += d[i][s] * d[j][s];
  Mat sym = zeros(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) sym[i][j] = 0.5 * (t[i][j] + t[j][i]);
  return sym;
}

/// Ungated right-hand side, one entry at a time.
inline Mat haeussler_rhs(const Mat& w, const Mat& t, double alpha, double beta) {
  const std::size_t n = w.size();
  Mat f = zeros(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double coop = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        if (k != i) coop += w[i][k] * t[i][k];
      f[i][j] = alpha * (1.0 - static_cast<double>(n) * w[i][j]) + beta * w[i][j] * (t[i][j] - coop);
    }
  }
  return f;
}

inline double max_abs_diff(const Mat& a, const Mat& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) m = std::max(m, std::abs(a[i][j] - b[i][j]));
  return m;
}

/// Infinity norm (max absolute row sum) of a - b.
inline double inf_norm_diff(const Mat& a, const Mat& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a[i].size(); ++j) s += std::abs(a[i][j] - b[i][j]);
    m = std::max(m, s);
  }
  return m;
}

/// Smallest distance over all pairs, by scanning every pair.
template <class P>
double min_pair_distance(const std::vector<P>& pts) {
  double m = INFINITY;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      m = std::min(m, std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y));
  return m;
}

// Generators for property tests.

/// Random n x n matrix, zero diagonal, entries >= 0, each row's sum drawn
/// from (0, max_row_sum].
inline Mat random_weights(std::mt19937_64& rng, std::size_t n, double max_row_sum) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Mat w = zeros(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) s += (w[i][j] = u(rng));
    const double target = max_row_sum * (1.0 - u(rng));
    for (std::size_t j = 0; j < n; ++j) w[i][j] *= target / s;
  }
  return w;
}

/// Like random_weights but with mixed signs: |row| sums stay <= max_row_sum.
inline Mat random_signed_weights(std::mt19937_64& rng, std::size_t n, double max_row_sum) {
  Mat w = random_weights(rng, n, max_row_sum);
  std::bernoulli_distribution flip(0.3);
  for (auto& row : w)
    for (double& x : row)
      if (flip(rng)) x = -x;
  return w;
}

inline Mat symmetrize(const Mat& w) {
  Mat s = zeros(w.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < w.size(); ++j) s[i][j] = 0.5 * (w[i][j] + w[j][i]);
  return s;
}

inline std::vector<std::size_t> random_subset(std::mt19937_64& rng, std::size_t n, double keep) {
  std::bernoulli_distribution b(keep);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (b(rng)) out.push_back(i);
  return out;
}

}  // namespace oracle
