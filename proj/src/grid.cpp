#include "spinfluid/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "spinfluid/errors.hpp"

namespace sf {

Grid::Grid(int dim, Index3 sizes, Vec3 lengths) : dim_(dim), sizes_(sizes), lengths_(lengths) {
  if (dim < 1 || dim > 3) throw ConfigError("grid.dim must be 1, 2 or 3 (got " + std::to_string(dim) + ")");
  for (int a = 0; a < 3; ++a) {
    if (a < dim) {
      if (sizes_[a] < 4) throw ConfigError("grid size along axis " + std::to_string(a) + " must be >= 4");
      if (!(lengths_[a] > 0.0) || !std::isfinite(lengths_[a]))
        throw ConfigError("grid length along axis " + std::to_string(a) + " must be positive");
    } else {
      sizes_[a] = 1;
      lengths_[a] = 1.0;
    }
  }
  points_ = static_cast<std::size_t>(sizes_[0]) * sizes_[1] * sizes_[2];
}

Grid Grid::line(int n, double length) { return Grid(1, {n, 1, 1}, {length, 1.0, 1.0}); }
Grid Grid::square(int n, double length) { return Grid(2, {n, n, 1}, {length, length, 1.0}); }
Grid Grid::cube(int n, double length) { return Grid(3, {n, n, n}, {length, length, length}); }

double Grid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= dx(a);
  return v;
}

double Grid::volume() const {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= lengths_[a];
  return v;
}

Index3 Grid::unflatten(std::size_t flat) const {
  Index3 idx{};
  idx[2] = static_cast<int>(flat % sizes_[2]);
  flat /= sizes_[2];
  idx[1] = static_cast<int>(flat % sizes_[1]);
  idx[0] = static_cast<int>(flat / sizes_[1]);
  return idx;
}

std::size_t Grid::flatten(const Index3& idx) const {
  return (static_cast<std::size_t>(idx[0]) * sizes_[1] + idx[1]) * sizes_[2] + idx[2];
}

Vec3 Grid::position(std::size_t flat) const {
  Index3 idx = unflatten(flat);
  Vec3 x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) x[a] = coord(a, idx[a]);
  return x;
}

std::vector<double> Grid::wavenumbers(int axis) const {
  int n = sizes_[axis];
  std::vector<double> k(n, 0.0);
  if (axis >= dim_) return k;
  double base = 2.0 * std::numbers::pi / lengths_[axis];
  for (int i = 0; i < n; ++i) k[i] = base * mode(i, n);
  return k;
}

}  // namespace sf
