#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace sf {

using Vec3 = std::array<double, 3>;
using Index3 = std::array<int, 3>;

/// Periodic rectangular lattice with 1 to 3 active axes.
/// Points are stored row-major with axis 0 slowest. Inactive axes have size 1.
/// Coordinates run from -L/2 (inclusive) to L/2 (exclusive) on each axis.
class Grid {
 public:
  Grid() = default;
  Grid(int dim, Index3 sizes, Vec3 lengths);

  static Grid line(int n, double length);
  static Grid square(int n, double length);
  static Grid cube(int n, double length);

  int dim() const { return dim_; }
  const Index3& sizes() const { return sizes_; }
  const Vec3& lengths() const { return lengths_; }
  int size(int axis) const { return sizes_[axis]; }
  double length(int axis) const { return lengths_[axis]; }

  std::size_t points() const { return points_; }
  double dx(int axis) const { return lengths_[axis] / sizes_[axis]; }
  double cell_volume() const;
  double volume() const;

  double coord(int axis, int i) const { return -0.5 * lengths_[axis] + i * dx(axis); }
  Index3 unflatten(std::size_t flat) const;
  std::size_t flatten(const Index3& idx) const;
  Vec3 position(std::size_t flat) const;

  /// Signed integer mode number of index i on an axis of size n.
  static int mode(int i, int n) { return i <= n / 2 ? i : i - n; }
  /// Angular wavenumbers in FFT order.
  std::vector<double> wavenumbers(int axis) const;

  bool operator==(const Grid& o) const {
    return dim_ == o.dim_ && sizes_ == o.sizes_ && lengths_ == o.lengths_;
  }
  bool operator!=(const Grid& o) const { return !(*this == o); }

 private:
  int dim_ = 0;
  Index3 sizes_{1, 1, 1};
  Vec3 lengths_{1.0, 1.0, 1.0};
  std::size_t points_ = 0;
};

}  // namespace sf
