#ifndef MAGNLS_DIAGNOSTICS_HPP
#define MAGNLS_DIAGNOSTICS_HPP

#include "magnls/gauge.hpp"
#include "magnls/nonlinearity.hpp"

#include <filesystem>
#include <vector>

namespace magnls {

struct DiagnosticsRow {
  long step = 0;
  double time = 0.0;
  double mass = 0.0;
  double kinetic = 0.0;
  double nl_energy = 0.0; // b^gamma G (or G_m in truncated runs)
  double energy = 0.0;    // kinetic - sign * nl_energy
  double correction_integral = 0.0;
  double energy_law_residual = 0.0; // E(t) - E(0) + correction_integral
  double h1mg_norm = 0.0;
  double max_abs = 0.0;
  double boundary_leakage = 0.0;
};

struct DiagnosticsSeries {
  std::vector<DiagnosticsRow> rows;
  bool empty() const { return rows.empty(); }
  const DiagnosticsRow& front() const { return rows.front(); }
  const DiagnosticsRow& back() const { return rows.back(); }
};

/// Running energy-law ledger. The correction integral advances every step
/// by trapezoid on the rate -1/2 <dH/dt u, u> (continuum limit
/// b Re<dtA u, (i grad - bA) u>); rows are appended at recording times.
class DiagnosticsLedger {
public:
  /// truncation_m = 0 means the untruncated nonlinear energy.
  DiagnosticsLedger(NonlinearitySpec nl, double b, int truncation_m = 0);

  void initialize(double t0, const ComplexField& u0, const LinkSet& links,
                  const std::array<std::vector<double>, 2>& theta_dot);
  /// Advance the correction integral from the previous advance/initialize
  /// time to t_next using the state at t_next.
  void advance(double t_next, const ComplexField& u_next,
               const LinkSet& links_next,
               const std::array<std::vector<double>, 2>& theta_dot_next);
  /// Append a row for the state at the last advanced time.
  const DiagnosticsRow& record(const ComplexField& u, const LinkSet& links);

  /// Inject a discrete correction (piecewise-A window junction terms).
  void add_correction(double delta) { correction_ += delta; }

  double correction_integral() const { return correction_; }
  long step() const { return step_; }
  const DiagnosticsSeries& series() const { return series_; }
  DiagnosticsSeries& series() { return series_; }

private:
  NonlinearitySpec nl_;
  double b_;
  int m_;
  DiagnosticsSeries series_;
  double correction_ = 0.0;
  double last_rate_ = 0.0;
  double last_time_ = 0.0;
  double e0_ = 0.0;
  long step_ = -1;
  bool initialized_ = false;
};

/// One-shot ledger update matching the per-operation contract: appends the
/// row for u_next at time t+dt to the series (initializing from u_prev at
/// t when the series is empty), with the correction integral advanced by
/// trapezoid between the two states.
DiagnosticsSeries& update_ledger(DiagnosticsSeries& series,
                                 const ComplexField& u_prev,
                                 const ComplexField& u_next,
                                 const PotentialSpec& potential,
                                 const NonlinearitySpec& nl, double t,
                                 double dt, double b);

/// Stored trajectory snapshots of one run.
struct Trajectory {
  std::vector<double> times;
  std::vector<ComplexField> fields;
  std::size_t size() const { return times.size(); }
};

/// Space-time norm ||u||_{L^q([t0,t1], L^r)} by trapezoid over snapshots;
/// q may be infinity (sup over snapshots).
double mixed_norm(const Trajectory& traj, double q, double r);

void write_diagnostics_csv(const DiagnosticsSeries& series,
                           const std::filesystem::path& path);

} // namespace magnls

#endif
