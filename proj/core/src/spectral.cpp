#include "magnls/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace magnls {

namespace {
// The FFTW planner is not thread-safe; plan creation/destruction is global.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
} // namespace

struct SpectralWorkspace::Plans {
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd)
      fftw_destroy_plan(fwd);
    if (inv)
      fftw_destroy_plan(inv);
  }
};

SpectralWorkspace::SpectralWorkspace(const Grid& grid)
    : grid_(grid), plans_(std::make_unique<Plans>()) {
  const int n = grid.n();
  k_.resize(n);
  for (int m = 0; m < n; ++m) {
    int mw = m <= n / 2 ? m : m - n;
    k_[m] = 2.0 * std::numbers::pi * mw / grid.length();
  }

  const double h = grid.spacing();
  auto sym1 = [&](int m) {
    double s = std::sin(std::numbers::pi * m / n);
    return 4.0 * s * s / (h * h);
  };
  stencil_symbol_.resize(grid.size());
  if (grid.dim() == 1) {
    for (int m = 0; m < n; ++m)
      stencil_symbol_[m] = sym1(m);
  } else {
    for (int m0 = 0; m0 < n; ++m0)
      for (int m1 = 0; m1 < n; ++m1)
        stencil_symbol_[grid.index(m0, m1)] = sym1(m0) + sym1(m1);
  }

  // Unaligned estimate plans: valid for any buffer passed to execute_dft.
  std::vector<Complex> dummy(grid.size());
  auto* d = reinterpret_cast<fftw_complex*>(dummy.data());
  std::lock_guard<std::mutex> lock(planner_mutex());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  if (grid.dim() == 1) {
    plans_->fwd = fftw_plan_dft_1d(n, d, d, FFTW_FORWARD, flags);
    plans_->inv = fftw_plan_dft_1d(n, d, d, FFTW_BACKWARD, flags);
  } else {
    plans_->fwd = fftw_plan_dft_2d(n, n, d, d, FFTW_FORWARD, flags);
    plans_->inv = fftw_plan_dft_2d(n, n, d, d, FFTW_BACKWARD, flags);
  }
}

SpectralWorkspace::~SpectralWorkspace() = default;

void SpectralWorkspace::forward(std::span<const Complex> in,
                                std::span<Complex> out) const {
  if (in.data() != out.data())
    std::copy(in.begin(), in.end(), out.begin());
  auto* p = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(plans_->fwd, p, p);
}

void SpectralWorkspace::inverse(std::span<const Complex> in,
                                std::span<Complex> out) const {
  if (in.data() != out.data())
    std::copy(in.begin(), in.end(), out.begin());
  auto* p = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(plans_->inv, p, p);
  const double scale = 1.0 / static_cast<double>(grid_.size());
  for (Complex& z : out)
    z *= scale;
}

void SpectralWorkspace::apply_multiplier(
    std::span<const Complex> in, std::span<Complex> out,
    const std::function<Complex(int, int)>& mult) const {
  std::vector<Complex> hat(grid_.size());
  forward(in, hat);
  const int n = grid_.n();
  if (grid_.dim() == 1) {
    for (int m = 0; m < n; ++m)
      hat[m] *= mult(m, 0);
  } else {
    for (int m0 = 0; m0 < n; ++m0)
      for (int m1 = 0; m1 < n; ++m1)
        hat[grid_.index(m0, m1)] *= mult(m0, m1);
  }
  inverse(hat, out);
}

ComplexField SpectralWorkspace::derivative(const ComplexField& u, int axis,
                                           int order) const {
  if (u.grid() != grid_)
    throw DimensionError("spectral derivative: grid mismatch");
  if (axis < 0 || axis >= grid_.dim())
    throw InvalidParameter("spectral derivative: bad axis");
  ComplexField out(grid_);
  const bool odd = (order % 2) != 0;
  apply_multiplier(u.values(), out.values(), [&](int m0, int m1) -> Complex {
    const int m = axis == 0 ? m0 : m1;
    if (odd && is_nyquist(m))
      return {0.0, 0.0};
    return std::pow(Complex{0.0, k_[m]}, order);
  });
  return out;
}

RealField SpectralWorkspace::derivative(const RealField& u, int axis,
                                        int order) const {
  ComplexField tmp(grid_);
  for (std::size_t i = 0; i < u.size(); ++i)
    tmp[i] = Complex{u[i], 0.0};
  ComplexField d = derivative(tmp, axis, order);
  RealField out(grid_);
  for (std::size_t i = 0; i < u.size(); ++i)
    out[i] = d[i].real();
  return out;
}

ComplexField SpectralWorkspace::laplacian(const ComplexField& u) const {
  if (u.grid() != grid_)
    throw DimensionError("spectral laplacian: grid mismatch");
  ComplexField out(grid_);
  apply_multiplier(u.values(), out.values(), [&](int m0, int m1) -> Complex {
    double k2 = k_[m0] * k_[m0];
    if (grid_.dim() == 2)
      k2 += k_[m1] * k_[m1];
    return {-k2, 0.0};
  });
  return out;
}

void SpectralWorkspace::dealias_two_thirds(ComplexField& u) const {
  const int n = grid_.n();
  const int cut = n / 3; // keep |m'| <= n/3
  auto keep = [&](int m) {
    int mw = m <= n / 2 ? m : m - n;
    return std::abs(mw) <= cut;
  };
  apply_multiplier(u.values(), u.values(), [&](int m0, int m1) -> Complex {
    bool ok = keep(m0) && (grid_.dim() == 1 || keep(m1));
    return ok ? Complex{1.0, 0.0} : Complex{0.0, 0.0};
  });
}

void SpectralWorkspace::dealias_two_thirds(RealField& u) const {
  ComplexField tmp(grid_);
  for (std::size_t i = 0; i < u.size(); ++i)
    tmp[i] = Complex{u[i], 0.0};
  dealias_two_thirds(tmp);
  for (std::size_t i = 0; i < u.size(); ++i)
    u[i] = tmp[i].real();
}

double spectral_roundtrip_error(const SpectralWorkspace& ws,
                                const ComplexField& u) {
  std::vector<Complex> hat(u.size()), back(u.size());
  ws.forward(u.values(), hat);
  ws.inverse(hat, back);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    num = std::max(num, std::abs(back[i] - u[i]));
    den = std::max(den, std::abs(u[i]));
  }
  return den == 0.0 ? num : num / den;
}

} // namespace magnls
