#include "swta/layout.hpp"

#include <algorithm>
#include <cmath>

#include "swta/error.hpp"

namespace swta {

GridLayout::GridLayout(Shape shape, Boundary boundary) : shape_(shape), boundary_(boundary) {
  if (shape_.size() == 0) fail(ErrorKind::Parameter, "layout needs at least one cell");
}

Point GridLayout::position(std::size_t i) const {
  const std::size_t r = i / shape_.cols;
  const std::size_t c = i % shape_.cols;
  return {(static_cast<double>(c) + 0.5) / static_cast<double>(shape_.cols),
          (static_cast<double>(r) + 0.5) / static_cast<double>(shape_.rows)};
}

double GridLayout::pitch() const noexcept {
  return 1.0 / static_cast<double>(std::max(shape_.rows, shape_.cols));
}

double GridLayout::grid_distance(std::size_t i, std::size_t j) const {
  auto axis = [this](std::size_t a, std::size_t b, std::size_t len) {
    double d = std::abs(static_cast<double>(a) - static_cast<double>(b));
    if (boundary_ == Boundary::Periodic) d = std::min(d, static_cast<double>(len) - d);
    return d;
  };
  const double dr = axis(i / shape_.cols, j / shape_.cols, shape_.rows);
  const double dc = axis(i % shape_.cols, j % shape_.cols, shape_.cols);
  return std::sqrt(dr * dr + dc * dc);
}

std::size_t GridLayout::nearest_cell(Point p) const {
  // Cells tile the unit square uniformly, so the nearest centre is the cell
  // containing p.
  auto index = [](double u, std::size_t len) {
    const auto k = static_cast<long>(std::floor(u * static_cast<double>(len)));
    return static_cast<std::size_t>(std::clamp<long>(k, 0, static_cast<long>(len) - 1));
  };
  return index(p.y, shape_.rows) * shape_.cols + index(p.x, shape_.cols);
}

}  // namespace swta
