#include "swta/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "swta/error.hpp"

namespace swta {

namespace {

double sum_squares(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

void require_sigma(double sigma, const char* what) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    fail(ErrorKind::Parameter, std::string(what) + " must be positive and finite");
}

// Signed offset x - center, folded onto a ring of n sites when wrapping.
double offset(double x, double center, std::size_t n, bool wrap) {
  double d = x - center;
  if (wrap) {
    const double len = static_cast<double>(n);
    d = std::remainder(d, len);
  }
  return d;
}

}  // namespace

std::string to_string(const Shape& shape) {
  if (shape.grid) return std::to_string(shape.rows) + "x" + std::to_string(shape.cols);
  return std::to_string(shape.cols);
}

Pattern::Pattern(std::vector<double> values, Shape shape, std::optional<std::string> label)
    : values_(std::move(values)), shape_(shape), label_(std::move(label)) {
  if (values_.size() != shape_.size())
    fail(ErrorKind::Shape, "pattern has " + std::to_string(values_.size()) +
                               " entries but shape " + to_string(shape_) + " needs " +
                               std::to_string(shape_.size()));
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0)
      fail(ErrorKind::Parameter, "pattern entries must be finite and non-negative");
  }
}

Pattern Pattern::zeros(Shape shape) {
  return Pattern(std::vector<double>(shape.size(), 0.0), shape);
}

double Pattern::norm() const noexcept { return std::sqrt(sum_squares(values_)); }

double Pattern::max() const noexcept {
  return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

bool Pattern::is_zero() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

bool ActiveSet::contains(std::size_t i) const {
  return std::binary_search(indices.begin(), indices.end(), i);
}

Pattern normalize(const Pattern& p) {
  const double n = p.norm();
  if (!(n > 0.0)) fail(ErrorKind::Annihilated, "pattern annihilated: nothing to normalize");
  std::vector<double> out(p.values().begin(), p.values().end());
  for (double& v : out) v /= n;
  return Pattern(std::move(out), p.shape(), p.label());
}

Pattern gaussian_1d(std::size_t n, double center, double sigma, bool wrap) {
  if (n == 0) fail(ErrorKind::Parameter, "gaussian_1d needs n >= 1");
  require_sigma(sigma, "sigma");
  std::vector<double> g(n);
  for (std::size_t x = 0; x < n; ++x) {
    const double z = offset(static_cast<double>(x), center, n, wrap) / sigma;
    g[x] = std::exp(-0.5 * z * z);
  }
  return normalize(Pattern(std::move(g), Shape::line(n)));
}

Pattern gaussian_2d(std::size_t rows, std::size_t cols, double center_x, double center_y,
                    double sigma_x, double sigma_y, bool wrap) {
  if (rows == 0 || cols == 0) fail(ErrorKind::Parameter, "gaussian_2d needs rows, cols >= 1");
  require_sigma(sigma_x, "sigma_x");
  require_sigma(sigma_y, "sigma_y");
  std::vector<double> g(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const double zy = offset(static_cast<double>(r), center_y, rows, wrap) / sigma_y;
    for (std::size_t c = 0; c < cols; ++c) {
      const double zx = offset(static_cast<double>(c), center_x, cols, wrap) / sigma_x;
      g[r * cols + c] = std::exp(-0.5 * zx * zx - 0.5 * zy * zy);
    }
  }
  return normalize(Pattern(std::move(g), Shape::grid2d(rows, cols)));
}

std::vector<double> noise_perturbation(std::size_t n, double level, std::uint64_t seed) {
  if (!(level >= 0.0) || !std::isfinite(level))
    fail(ErrorKind::Parameter, "noise level must be >= 0");
  std::vector<double> out(n, 0.0);
  if (level == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, level);
  for (double& v : out) v = normal(rng);
  return out;
}

Pattern add_noise(const Pattern& p, double level, std::uint64_t seed) {
  const auto noise = noise_perturbation(p.size(), level, seed);
  if (level == 0.0) return p;
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = std::max(0.0, p[i] + noise[i]);
  return normalize(Pattern(std::move(out), p.shape(), p.label()));
}

Pattern fuse(const Pattern& p1, const Pattern& p2, double weight1, double weight2) {
  if (!(p1.shape() == p2.shape()))
    fail(ErrorKind::Shape, "cannot fuse patterns of shape " + to_string(p1.shape()) + " and " +
                               to_string(p2.shape()));
  if (!(weight1 >= 0.0) || !(weight2 >= 0.0) || (weight1 == 0.0 && weight2 == 0.0))
    fail(ErrorKind::Parameter, "fuse weights must be >= 0 and not both zero");
  std::vector<double> out(p1.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = weight1 * p1[i] + weight2 * p2[i];
  return normalize(Pattern(std::move(out), p1.shape()));
}

Pattern zero_entries(const Pattern& p, std::span<const std::size_t> masked_indices) {
  std::vector<double> out(p.values().begin(), p.values().end());
  for (std::size_t i : masked_indices) {
    if (i >= out.size())
      fail(ErrorKind::Parameter, "mask index " + std::to_string(i) + " out of range for " +
                                     std::to_string(out.size()) + " neurons");
    out[i] = 0.0;
  }
  return Pattern(std::move(out), p.shape(), p.label());
}

Pattern mask(const Pattern& p, std::span<const std::size_t> masked_indices) {
  if (masked_indices.empty()) return p;
  return normalize(zero_entries(p, masked_indices));
}

ActiveSet active_set(const Pattern& p, double threshold) {
  if (!(threshold >= 0.0)) fail(ErrorKind::Parameter, "activity threshold must be >= 0");
  ActiveSet s;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > threshold) s.indices.push_back(i);
  return s;
}

ActiveSet relative_active_set(const Pattern& p, double fraction_of_max) {
  if (!(fraction_of_max >= 0.0))
    fail(ErrorKind::Parameter, "relative activity threshold must be >= 0");
  return active_set(p, fraction_of_max * p.max());
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorKind::Shape, "cosine of vectors with different lengths");
  double ab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ab += a[i] * b[i];
  const double na = std::sqrt(sum_squares(a));
  const double nb = std::sqrt(sum_squares(b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(ab / (na * nb), -1.0, 1.0);
}

double cosine_similarity(const Pattern& a, const Pattern& b) {
  return cosine_similarity(a.values(), b.values());
}

}  // namespace swta
