#pragma once

#include <cstddef>

#include "swta/pattern.hpp"

namespace swta {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double squared_distance(Point a, Point b) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

enum class Boundary { Open, Periodic };

/// Places the N cells of a pattern shape in the unit square (cell centres)
/// and measures neuron distances in grid units.
class GridLayout {
 public:
  GridLayout(Shape shape, Boundary boundary);

  std::size_t size() const noexcept { return shape_.size(); }
  const Shape& shape() const noexcept { return shape_; }
  Boundary boundary() const noexcept { return boundary_; }

  /// Centre of cell i in the unit square.
  Point position(std::size_t i) const;
  /// Spacing between adjacent cell centres in unit-square coordinates.
  double pitch() const noexcept;
  /// Euclidean distance in grid units; minimum image under Periodic.
  double grid_distance(std::size_t i, std::size_t j) const;
  std::size_t nearest_cell(Point p) const;

 private:
  Shape shape_;
  Boundary boundary_;
};

}  // namespace swta
