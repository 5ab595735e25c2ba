#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace swta {

/// Layout metadata of an activity vector. Grids are flattened row-major:
/// flat index = row * cols + col.
struct Shape {
  std::size_t rows = 1;
  std::size_t cols = 0;
  bool grid = false;

  static Shape line(std::size_t n) { return {1, n, false}; }
  static Shape grid2d(std::size_t rows, std::size_t cols) { return {rows, cols, true}; }

  std::size_t size() const noexcept { return rows * cols; }
  bool operator==(const Shape&) const = default;
};

std::string to_string(const Shape& shape);

/// Non-negative activity vector over N neurons.
class Pattern {
 public:
  Pattern() = default;
  /// Throws Parameter on negative or non-finite entries, Shape when
  /// `values.size() != shape.size()`.
  Pattern(std::vector<double> values, Shape shape,
          std::optional<std::string> label = std::nullopt);

  static Pattern zeros(Shape shape);

  std::span<const double> values() const noexcept { return values_; }
  const Shape& shape() const noexcept { return shape_; }
  const std::optional<std::string>& label() const noexcept { return label_; }
  void set_label(std::optional<std::string> label) { label_ = std::move(label); }

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  double norm() const noexcept;
  double max() const noexcept;
  bool is_zero() const noexcept;

 private:
  std::vector<double> values_;
  Shape shape_;
  std::optional<std::string> label_;
};

/// Indices of neurons whose activity exceeds a threshold, ascending.
struct ActiveSet {
  std::vector<std::size_t> indices;

  bool empty() const noexcept { return indices.empty(); }
  std::size_t size() const noexcept { return indices.size(); }
  bool contains(std::size_t i) const;
};

/// Unit L2 norm copy. Throws Annihilated for an all-zero pattern.
Pattern normalize(const Pattern& p);

/// exp(-0.5 ((x - center) / sigma)^2) for x = 0..n-1, normalized.
/// With `wrap`, x - center is the periodic (minimum image) offset on a ring
/// of n sites.
Pattern gaussian_1d(std::size_t n, double center, double sigma, bool wrap = false);

/// Separable 2D Gaussian; center_x indexes columns, center_y rows.
Pattern gaussian_2d(std::size_t rows, std::size_t cols, double center_x, double center_y,
                    double sigma_x, double sigma_y, bool wrap = false);

/// The raw i.i.d. N(0, level^2) perturbation that `add_noise` applies for
/// `seed`, before clamping.
std::vector<double> noise_perturbation(std::size_t n, double level, std::uint64_t seed);

/// p + noise, negatives clamped to zero, renormalized. level == 0 returns p.
Pattern add_noise(const Pattern& p, double level, std::uint64_t seed);

/// weight1 * p1 + weight2 * p2, normalized.
Pattern fuse(const Pattern& p1, const Pattern& p2, double weight1, double weight2);

/// Zeroes the listed entries and renormalizes. Empty mask returns p.
Pattern mask(const Pattern& p, std::span<const std::size_t> masked_indices);

/// Zeroes the listed entries without renormalizing; may return a zero pattern.
Pattern zero_entries(const Pattern& p, std::span<const std::size_t> masked_indices);

/// Indices with value strictly greater than `threshold`.
ActiveSet active_set(const Pattern& p, double threshold);

/// active_set with the threshold taken relative to the pattern's maximum.
ActiveSet relative_active_set(const Pattern& p, double fraction_of_max);

double cosine_similarity(std::span<const double> a, std::span<const double> b);
double cosine_similarity(const Pattern& a, const Pattern& b);

}  // namespace swta
