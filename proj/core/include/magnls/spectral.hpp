#ifndef MAGNLS_SPECTRAL_HPP
#define MAGNLS_SPECTRAL_HPP

#include "magnls/field.hpp"

#include <memory>
#include <vector>

namespace magnls {

/// FFT plans and wavenumber tables for one grid. Forward transform is
/// unnormalized (FFTW sign -1); inverse divides by the point count.
/// Plans are created with FFTW_ESTIMATE so results are reproducible
/// bit-for-bit across runs. A workspace is safe to share across threads
/// for execution; construction is internally serialized.
class SpectralWorkspace {
public:
  explicit SpectralWorkspace(const Grid& grid);
  ~SpectralWorkspace();
  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

  const Grid& grid() const { return grid_; }

  void forward(std::span<const Complex> in, std::span<Complex> out) const;
  void inverse(std::span<const Complex> in, std::span<Complex> out) const;

  /// Wavenumber for DFT bin m along one axis: 2*pi*m'/L with m' wrapped
  /// to [-n/2, n/2).
  double wavenumber(int m) const { return k_[m]; }
  bool is_nyquist(int m) const { return m == grid_.n() / 2; }

  /// Spectral partial derivative of the given order along axis.
  /// Odd orders zero the Nyquist mode.
  ComplexField derivative(const ComplexField& u, int axis,
                          int order = 1) const;
  RealField derivative(const RealField& u, int axis, int order = 1) const;

  /// Spectral Laplacian (sum of second derivatives).
  ComplexField laplacian(const ComplexField& u) const;

  /// In-place 2/3-rule truncation of the upper third of the spectrum.
  void dealias_two_thirds(ComplexField& u) const;
  void dealias_two_thirds(RealField& u) const;

  /// Symbol of the second-order centered discrete Laplacian,
  /// lambda(m...) = sum_a 4 sin^2(pi m_a / n) / h^2, indexed like the
  /// row-major spectral array. Used by the Crank-Nicolson preconditioner.
  const std::vector<double>& stencil_laplacian_symbol() const {
    return stencil_symbol_;
  }

private:
  struct Plans;
  void apply_multiplier(std::span<const Complex> in, std::span<Complex> out,
                        const std::function<Complex(int, int)>& mult) const;

  Grid grid_;
  std::vector<double> k_;
  std::vector<double> stencil_symbol_;
  std::unique_ptr<Plans> plans_;
};

/// Relative max-norm distance between u and its forward+inverse roundtrip.
double spectral_roundtrip_error(const SpectralWorkspace& ws,
                                const ComplexField& u);

} // namespace magnls

#endif
