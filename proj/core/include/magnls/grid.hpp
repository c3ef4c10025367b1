#ifndef MAGNLS_GRID_HPP
#define MAGNLS_GRID_HPP

#include "magnls/errors.hpp"

#include <cstddef>

namespace magnls {

/// Uniform periodic grid on the box [-L/2, L/2)^dim, dim in {1,2}.
/// points_per_axis must be a power of two >= 8. The spacing is always
/// derived as length/n (never stored separately), so spacing*n == length
/// holds in the single source-of-truth representation.
class Grid {
public:
  Grid(int dim, int points_per_axis, double box_length)
      : dim_(dim), n_(points_per_axis), length_(box_length) {
    if (dim != 1 && dim != 2)
      throw InvalidParameter("grid dim must be 1 or 2");
    if (n_ < 8 || (n_ & (n_ - 1)) != 0)
      throw InvalidParameter("points_per_axis must be a power of two >= 8");
    if (!(box_length > 0.0))
      throw InvalidParameter("box_length must be positive");
  }

  int dim() const { return dim_; }
  int n() const { return n_; }
  double length() const { return length_; }
  double spacing() const { return length_ / n_; }

  std::size_t size() const {
    std::size_t s = static_cast<std::size_t>(n_);
    return dim_ == 1 ? s : s * s;
  }
  double cell_volume() const {
    double h = spacing();
    return dim_ == 1 ? h : h * h;
  }

  /// Node coordinate along one axis: x_i = -L/2 + i*h, i in [0, n).
  double coord(int i) const { return -0.5 * length_ + i * spacing(); }

  /// Row-major flat index; axis 0 is the slow (outer) index.
  std::size_t index(int i, int j = 0) const {
    return dim_ == 1 ? static_cast<std::size_t>(i)
                     : static_cast<std::size_t>(i) * n_ + j;
  }
  int wrap(int i) const {
    i %= n_;
    return i < 0 ? i + n_ : i;
  }

  bool operator==(const Grid&) const = default;

private:
  int dim_;
  int n_;
  double length_;
};

} // namespace magnls

#endif
