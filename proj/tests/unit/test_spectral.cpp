#include "magnls/spectral.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <numbers>

using namespace magnls;
using namespace magnls::testing;

TEST_CASE("forward-inverse transform reproduces fields") {
  std::mt19937_64 rng(7);
  for (int dim : {1, 2}) {
    Grid g(dim, dim == 1 ? 256 : 64, 16.0);
    SpectralWorkspace ws(g);
    for (int trial = 0; trial < 20; ++trial) {
      ComplexField u = random_localized_field(g, rng);
      CHECK(spectral_roundtrip_error(ws, u) <= 1e-12);
    }
  }
}

TEST_CASE("spectral derivative is exact on lattice modes") {
  Grid g(1, 128, 16.0);
  SpectralWorkspace ws(g);
  const double k = 2.0 * std::numbers::pi * 5 / g.length();
  ComplexField u = ComplexField::sample(g, [&](double x, double) {
    return std::polar(1.0, k * x);
  });
  ComplexField du = ws.derivative(u, 0, 1);
  for (std::size_t i = 0; i < u.size(); ++i)
    CHECK(std::abs(du[i] - Complex{0.0, k} * u[i]) < 1e-11);

  ComplexField lap = ws.laplacian(u);
  for (std::size_t i = 0; i < u.size(); ++i)
    CHECK(std::abs(lap[i] + k * k * u[i]) < 1e-10);
}

TEST_CASE("odd-order derivatives zero the Nyquist mode") {
  Grid g(1, 64, 16.0);
  SpectralWorkspace ws(g);
  // Pure Nyquist signal: alternating +-1.
  ComplexField u(g);
  for (int i = 0; i < g.n(); ++i)
    u[i] = Complex{i % 2 == 0 ? 1.0 : -1.0, 0.0};
  ComplexField du = ws.derivative(u, 0, 1);
  for (std::size_t i = 0; i < u.size(); ++i)
    CHECK(std::abs(du[i]) < 1e-12);
  // Even order keeps it.
  ComplexField d2u = ws.derivative(u, 0, 2);
  double k_ny = ws.wavenumber(g.n() / 2);
  for (std::size_t i = 0; i < u.size(); ++i)
    CHECK(std::abs(d2u[i] + k_ny * k_ny * u[i]) < 1e-9);
}

TEST_CASE("two-thirds dealiasing removes the upper spectrum only") {
  Grid g(1, 128, 16.0);
  SpectralWorkspace ws(g);
  const double k_low = 2.0 * std::numbers::pi * 10 / g.length();
  const double k_high = 2.0 * std::numbers::pi * 60 / g.length();
  ComplexField u = ComplexField::sample(g, [&](double x, double) {
    return Complex{std::cos(k_low * x) + std::cos(k_high * x), 0.0};
  });
  ws.dealias_two_thirds(u);
  ComplexField low = ComplexField::sample(g, [&](double x, double) {
    return Complex{std::cos(k_low * x), 0.0};
  });
  for (std::size_t i = 0; i < u.size(); ++i)
    CHECK(std::abs(u[i] - low[i]) < 1e-12);
}

TEST_CASE("stencil Laplacian symbol matches the applied stencil") {
  Grid g(1, 64, 8.0);
  SpectralWorkspace ws(g);
  const int m = 9;
  const double k = 2.0 * std::numbers::pi * m / g.length();
  const double h = g.spacing();
  const double expected = 4.0 * std::pow(std::sin(0.5 * k * h), 2) / (h * h);
  CHECK(ws.stencil_laplacian_symbol()[m] ==
        doctest::Approx(expected).epsilon(1e-13));
}
