#ifndef MAGNLS_FIELD_HPP
#define MAGNLS_FIELD_HPP

#include "magnls/grid.hpp"

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace magnls {

using Complex = std::complex<double>;

/// Complex scalar field sampled on the grid nodes, row-major.
class ComplexField {
public:
  explicit ComplexField(const Grid& grid)
      : grid_(grid), values_(grid.size(), Complex{0.0, 0.0}) {}
  ComplexField(const Grid& grid, std::vector<Complex> values)
      : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size())
      throw DimensionError("field values do not match grid cell count");
  }

  const Grid& grid() const { return grid_; }
  std::span<const Complex> values() const { return values_; }
  std::span<Complex> values() { return values_; }
  Complex operator[](std::size_t k) const { return values_[k]; }
  Complex& operator[](std::size_t k) { return values_[k]; }
  std::size_t size() const { return values_.size(); }

  bool all_finite() const;

  /// Sample fn(x) in 1D or fn(x,y) in 2D at the grid nodes.
  static ComplexField sample(const Grid& grid,
                             const std::function<Complex(double, double)>& fn);

private:
  Grid grid_;
  std::vector<Complex> values_;
};

/// Real scalar field on the grid (phases, gauge functions, |alpha| parts).
class RealField {
public:
  explicit RealField(const Grid& grid)
      : grid_(grid), values_(grid.size(), 0.0) {}
  RealField(const Grid& grid, std::vector<double> values)
      : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size())
      throw DimensionError("field values do not match grid cell count");
  }

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t k) const { return values_[k]; }
  double& operator[](std::size_t k) { return values_[k]; }
  std::size_t size() const { return values_.size(); }

  static RealField sample(const Grid& grid,
                          const std::function<double(double, double)>& fn);

private:
  Grid grid_;
  std::vector<double> values_;
};

/// Real vector field: one real component per spatial direction.
class RealVectorField {
public:
  explicit RealVectorField(const Grid& grid) : grid_(grid) {
    for (int a = 0; a < grid.dim(); ++a)
      comps_[a].assign(grid.size(), 0.0);
  }

  const Grid& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }
  std::span<const double> component(int a) const { return comps_[a]; }
  std::span<double> component(int a) { return comps_[a]; }
  double value(int a, std::size_t k) const { return comps_[a][k]; }
  double& value(int a, std::size_t k) { return comps_[a][k]; }

  static RealVectorField
  sample(const Grid& grid,
         const std::function<double(int axis, double x, double y)>& fn);

private:
  Grid grid_;
  std::array<std::vector<double>, 2> comps_;
};

/// Fraction of L2 mass outside the middle-half box {|x_a| < L/4}.
/// Returns 0 for an identically-zero field.
double boundary_leakage(const ComplexField& u);

/// Trapezoid (= exact on the periodic grid) quadrature of |u|^p, etc.
double lp_norm(const ComplexField& u, double p);

double mass_l2(const ComplexField& u); // shorthand for lp_norm(u, 2)

/// L2 distance between two fields on the same grid.
double l2_distance(const ComplexField& a, const ComplexField& b);

/// Discrete L2 inner product <a, b> = sum conj(a) b * cell_volume.
Complex inner_product(const ComplexField& a, const ComplexField& b);

} // namespace magnls

#endif
