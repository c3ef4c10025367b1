#include "magnls/field.hpp"

#include <cmath>
#include <limits>

namespace magnls {

bool ComplexField::all_finite() const {
  for (const Complex& z : values_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      return false;
  return true;
}

ComplexField
ComplexField::sample(const Grid& grid,
                     const std::function<Complex(double, double)>& fn) {
  ComplexField f(grid);
  const int n = grid.n();
  if (grid.dim() == 1) {
    for (int i = 0; i < n; ++i)
      f[i] = fn(grid.coord(i), 0.0);
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        f[grid.index(i, j)] = fn(grid.coord(i), grid.coord(j));
  }
  return f;
}

RealField RealField::sample(const Grid& grid,
                            const std::function<double(double, double)>& fn) {
  RealField f(grid);
  const int n = grid.n();
  if (grid.dim() == 1) {
    for (int i = 0; i < n; ++i)
      f[i] = fn(grid.coord(i), 0.0);
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        f[grid.index(i, j)] = fn(grid.coord(i), grid.coord(j));
  }
  return f;
}

RealVectorField RealVectorField::sample(
    const Grid& grid,
    const std::function<double(int, double, double)>& fn) {
  RealVectorField f(grid);
  const int n = grid.n();
  for (int a = 0; a < grid.dim(); ++a) {
    if (grid.dim() == 1) {
      for (int i = 0; i < n; ++i)
        f.value(a, i) = fn(a, grid.coord(i), 0.0);
    } else {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          f.value(a, grid.index(i, j)) = fn(a, grid.coord(i), grid.coord(j));
    }
  }
  return f;
}

double boundary_leakage(const ComplexField& u) {
  const Grid& g = u.grid();
  const double quarter = 0.25 * g.length();
  double total = 0.0, inside = 0.0;
  const int n = g.n();
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i) {
      double m = std::norm(u[i]);
      total += m;
      if (std::abs(g.coord(i)) < quarter)
        inside += m;
    }
  } else {
    for (int i = 0; i < n; ++i) {
      const bool xi = std::abs(g.coord(i)) < quarter;
      for (int j = 0; j < n; ++j) {
        double m = std::norm(u[g.index(i, j)]);
        total += m;
        if (xi && std::abs(g.coord(j)) < quarter)
          inside += m;
      }
    }
  }
  if (total == 0.0)
    return 0.0;
  return 1.0 - inside / total;
}

double lp_norm(const ComplexField& u, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (const Complex& z : u.values())
      m = std::max(m, std::abs(z));
    return m;
  }
  if (p < 1.0)
    throw InvalidParameter("lp_norm requires p >= 1");
  double s = 0.0;
  if (p == 2.0) {
    for (const Complex& z : u.values())
      s += std::norm(z);
  } else {
    for (const Complex& z : u.values())
      s += std::pow(std::abs(z), p);
  }
  s *= u.grid().cell_volume();
  return std::pow(s, 1.0 / p);
}

double mass_l2(const ComplexField& u) { return lp_norm(u, 2.0); }

double l2_distance(const ComplexField& a, const ComplexField& b) {
  if (a.grid() != b.grid())
    throw DimensionError("l2_distance: grid mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    s += std::norm(a[k] - b[k]);
  return std::sqrt(s * a.grid().cell_volume());
}

Complex inner_product(const ComplexField& a, const ComplexField& b) {
  if (a.grid() != b.grid())
    throw DimensionError("inner_product: grid mismatch");
  Complex s{0.0, 0.0};
  for (std::size_t k = 0; k < a.size(); ++k)
    s += std::conj(a[k]) * b[k];
  return s * a.grid().cell_volume();
}

} // namespace magnls
