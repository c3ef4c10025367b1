#ifndef MAGNLS_TEST_HELPERS_HPP
#define MAGNLS_TEST_HELPERS_HPP

#include "magnls/field.hpp"

#include <cmath>
#include <random>

namespace magnls::testing {

/// Smooth localized random field: a few Gaussian blobs with random
/// centers (kept in the middle half), amplitudes and phases.
inline ComplexField random_localized_field(const Grid& grid,
                                           std::mt19937_64& rng,
                                           double amplitude = 1.0) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const double reach = grid.length() / 8.0;
  struct Blob {
    double cx, cy, w, a, px, py;
  };
  std::vector<Blob> blobs;
  for (int i = 0; i < 3; ++i) {
    Blob b;
    b.cx = reach * unif(rng);
    b.cy = reach * unif(rng);
    b.w = 0.6 + 0.4 * std::abs(unif(rng));
    b.a = amplitude * (0.3 + 0.7 * std::abs(unif(rng)));
    b.px = 2.0 * unif(rng);
    b.py = 2.0 * unif(rng);
    blobs.push_back(b);
  }
  return ComplexField::sample(grid, [&](double x, double y) {
    Complex s{0.0, 0.0};
    for (const Blob& b : blobs) {
      double dx = x - b.cx;
      double dy = grid.dim() == 2 ? y - b.cy : 0.0;
      double env = b.a * std::exp(-(dx * dx + dy * dy) / (2.0 * b.w * b.w));
      s += std::polar(env, b.px * x + b.py * y);
    }
    return s;
  });
}

inline ComplexField gaussian_field(const Grid& grid, double amplitude,
                                   double width, double cx = 0.0,
                                   double cy = 0.0, double kx = 0.0,
                                   double ky = 0.0) {
  return ComplexField::sample(grid, [&](double x, double y) {
    double dx = x - cx;
    double dy = grid.dim() == 2 ? y - cy : 0.0;
    double env = amplitude * std::exp(-(dx * dx + dy * dy) /
                                      (2.0 * width * width));
    return std::polar(env, kx * x + ky * y);
  });
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

} // namespace magnls::testing

#endif
