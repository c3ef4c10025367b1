#ifndef MAGNLS_WKB_HPP
#define MAGNLS_WKB_HPP

#include "magnls/nonlinearity.hpp"
#include "magnls/potential.hpp"
#include "magnls/spectral.hpp"

#include <optional>
#include <string>
#include <vector>

namespace magnls {

/// State of the semiclassical hyperbolic system in rescaled time:
/// complex amplitude alpha and the real velocity field v = grad(phi) + A(ht).
struct WkbState {
  WkbState(const Grid& grid, double h_)
      : amplitude(grid), velocity(grid), h(h_) {}
  ComplexField amplitude;
  RealVectorField velocity;
  double h = 0.0; // semiclassical parameter, 1/b
  double t = 0.0; // rescaled time
  const Grid& grid() const { return amplitude.grid(); }
};

/// Initial state: alpha = a0, v = spectral grad(S) + A(0).
WkbState wkb_init(const ComplexField& a0, const RealField& S,
                  const PotentialSpec& pot, double b);

/// Right-hand side of the quasilinear system (rescaled time t, original
/// time ht inside the potential):
///   d alpha/dt = -2 (v.grad) alpha - alpha div v + i h Lap alpha
///   d v_k /dt  = -2 (v.grad) v_k - 2 g'(|alpha|^2) Re(conj(alpha) d_k alpha)
///                - 2 (v x B(ht))_k + h dtA_k(ht)
/// Quadratic products are 2/3-dealiased; derivatives are spectral.
WkbState wkb_rhs(const WkbState& state, const PotentialSpec& pot,
                 const NonlinearitySpec& nl, const SpectralWorkspace& ws);

struct SymmetrizerReport {
  double max_asymmetry = 0.0;    // max |(S A_j) - (S A_j)^T| entry
  double min_sigma_eigenvalue = 0.0;
  std::size_t points_checked = 0;
};

/// Assemble the flux matrix A_j(w) of the implemented quasilinear form at
/// every grid point, apply the symmetrizer Sigma = diag(I_2, (2g')^{-1} I_d),
/// and report the worst asymmetry and the smallest Sigma eigenvalue.
SymmetrizerReport symmetrizer_check(const WkbState& state,
                                    const NonlinearitySpec& nl, int axis);

struct WkbConfig {
  double b = 1.0;
  std::optional<double> h_override; // set to run the limiting system (h=0)
  double t_end = 0.5;               // rescaled horizon
  double cfl_safety = 0.5;
  double dt_override = 0.0; // 0 = adaptive CFL step
  int snapshot_stride = 1;
  double shock_ceiling = 1e3; // abort when max |d_a v_k| exceeds this

  double h() const { return h_override ? *h_override : 1.0 / b; }
  void validate() const;
};

enum class WkbStatus { ok, shock, stalled };

/// Stored frame: state plus the running phase integral
/// int_0^t (|v|^2 + g(|alpha|^2)) dtau (per-point trapezoid).
struct WkbFrame {
  double t = 0.0;
  ComplexField amplitude;
  RealVectorField velocity;
  RealField phase_integral;
  WkbFrame(const Grid& g) : amplitude(g), velocity(g), phase_integral(g) {}
};

struct WkbResult {
  WkbStatus status = WkbStatus::ok;
  std::string detail;
  double end_time = 0.0;
  double h = 0.0;
  long steps = 0;
  std::vector<WkbFrame> frames;
  std::vector<double> mass_series; // int |alpha|^2 at the frames
  const WkbFrame& back() const { return frames.back(); }
};

/// Classical RK4 in rescaled time with CFL-limited steps; aborts (status
/// shock) when the velocity gradient exceeds the ceiling.
WkbResult wkb_solve(const ComplexField& a0, const RealField& S,
                    const WkbConfig& cfg, const PotentialSpec& pot,
                    const NonlinearitySpec& nl);

struct ReconstructedFrame {
  double t_rescaled = 0.0;
  double t_physical = 0.0;
  ComplexField u;
  double defect = 0.0; // || grad(phi) + A(ht) - v ||_L2
  ReconstructedFrame(const Grid& g) : u(g) {}
};

/// Rebuild u(s = t/b) = alpha(t) exp(i b phi(t)) with
/// phi(t) = S - int_0^t (|v|^2 + g(|alpha|^2)) dtau, and report the
/// consistency defect between grad(phi) + A and v at every frame.
std::vector<ReconstructedFrame> reconstruct(const WkbResult& traj,
                                            const RealField& S,
                                            const PotentialSpec& pot,
                                            double b);

} // namespace magnls

#endif
