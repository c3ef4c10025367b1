#ifndef MAGNLS_PROPAGATOR_HPP
#define MAGNLS_PROPAGATOR_HPP

#include "magnls/diagnostics.hpp"
#include "magnls/gauge.hpp"
#include "magnls/nonlinearity.hpp"
#include "magnls/potential.hpp"

#include <string>

namespace magnls {

enum class LadderMode { none, truncated, piecewise_A };

enum class SolveStatus { ok, blowup_detected, leakage, solver_divergence };

enum class LeakageCheck { automatic, on, off };

struct SolverConfig {
  double b = 1.0;
  double dt = 1e-3;
  double t_end = 1.0;
  double cn_tolerance = 1e-10;
  int cn_max_iterations = 500;
  LadderMode ladder = LadderMode::none;
  int ladder_m = 1; // truncation level for LadderMode::truncated
  int ladder_n = 1; // window count for LadderMode::piecewise_A
  int snapshot_stride = 1;
  double blowup_ceiling = 1e3; // abort when h1mg exceeds ceiling * initial
  LeakageCheck leakage_check = LeakageCheck::automatic;
  double leakage_threshold = 1e-6;
  double initial_leakage_threshold = 1e-10;
  bool store_trajectory = true;

  void validate() const;
  long step_count() const;
  bool leakage_enabled(const PotentialSpec& pot) const;
};

/// One Crank-Nicolson step of the linear magnetic flow. A is frozen by the
/// caller via the supplied links; the inner solve is a matrix-free
/// BiCGStab preconditioned by the inverse of I + i(dt/2)(-Delta) in
/// Fourier space (exact when A = 0). Throws SolverDivergence when the
/// relative residual cannot be pushed below tolerance.
class LinearStepper {
public:
  LinearStepper(const Grid& grid, double cn_tolerance, int cn_max_iterations);

  void step(ComplexField& u, const LinkSet& links, double dt);

  long total_iterations() const { return total_iterations_; }
  double last_residual() const { return last_residual_; }

private:
  SpectralWorkspace ws_;
  double tol_;
  int maxit_;
  double cached_dt_ = 0.0;
  std::vector<Complex> precond_; // 1/(1 + i(dt/2) lambda_k)
  std::vector<Complex> r_, r0_, p_, v_, s_, phat_, shat_, t_, buf_;
  long total_iterations_ = 0;
  double last_residual_ = 0.0;

  void refresh_preconditioner(double dt);
  void apply_operator(const LinkSet& links, double dt,
                      std::span<const Complex> in, std::span<Complex> out);
  void apply_preconditioner(std::span<const Complex> in,
                            std::span<Complex> out);
};

/// Spec-shaped single steps (convenience wrappers building links per call).
ComplexField linear_step(const ComplexField& u, const PotentialSpec& pot,
                         double t, double dt, double b,
                         const SolverConfig& cfg);

/// Exact phase rotation of the isolated nonlinear flow
/// i du/dt = -sign b^gamma f(u):  u <- exp(+i sign b^gamma g(|u|^2) dt) u.
ComplexField nonlinear_step(const ComplexField& u, const NonlinearitySpec& nl,
                            double dt, double b);
/// Same with the clipped profile g(min(|u|, m)^2); still an exact rotation
/// because the truncation preserves the gauge structure.
ComplexField nonlinear_step_truncated(const ComplexField& u,
                                      const NonlinearitySpec& nl, double dt,
                                      double b, int m);

/// Strang composition: half nonlinear, full linear (A at t + dt/2), half
/// nonlinear.
ComplexField strang_step(const ComplexField& u, const PotentialSpec& pot,
                         const NonlinearitySpec& nl, double t, double dt,
                         double b, const SolverConfig& cfg);

struct SolveResult {
  explicit SolveResult(ComplexField initial) : final_field(std::move(initial)) {}

  SolveStatus status = SolveStatus::ok;
  double end_time = 0.0;
  std::string detail;
  ComplexField final_field;
  DiagnosticsSeries series;
  Trajectory trajectory;
  long cn_iterations = 0;

  // Piecewise-A ledger bookkeeping (one entry per window junction).
  std::vector<double> junction_times;
  std::vector<double> junction_cross_terms;
  std::vector<double> junction_quadratic_terms;
  double quadratic_sum = 0.0;

  bool ok() const { return status == SolveStatus::ok; }
};

/// March to t_end with Strang splitting; diagnostics advance every step
/// and are recorded every snapshot_stride steps (plus the final step).
/// An optional static gauge function chi shifts every link by the exact
/// line integral of grad(chi), i.e. solves with potential A + grad(chi).
SolveResult solve(const ComplexField& u0, const PotentialSpec& pot,
                  const NonlinearitySpec& nl, const SolverConfig& cfg,
                  const RealField* gauge_chi = nullptr);

/// Same dynamics with A frozen at the start of each of ladder_n windows;
/// accumulates the discrete energy ledger (cross terms at junctions plus
/// the quadratic ||W u||^2 bookkeeping).
SolveResult solve_piecewise_A(const ComplexField& u0, const PotentialSpec& pot,
                              const NonlinearitySpec& nl,
                              const SolverConfig& cfg);

/// Same dynamics with the clipped nonlinearity f_m, m = ladder_m.
SolveResult solve_truncated(const ComplexField& u0, const PotentialSpec& pot,
                            const NonlinearitySpec& nl,
                            const SolverConfig& cfg);

/// Dispatch on cfg.ladder.
SolveResult run_solver(const ComplexField& u0, const PotentialSpec& pot,
                       const NonlinearitySpec& nl, const SolverConfig& cfg);

} // namespace magnls

#endif
