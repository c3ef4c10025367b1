#include "magnls/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace magnls {

DiagnosticsLedger::DiagnosticsLedger(NonlinearitySpec nl, double b,
                                     int truncation_m)
    : nl_(std::move(nl)), b_(b), m_(truncation_m) {}

void DiagnosticsLedger::initialize(
    double t0, const ComplexField& u0, const LinkSet& links,
    const std::array<std::vector<double>, 2>& theta_dot) {
  correction_ = 0.0;
  last_rate_ = energy_correction_rate(u0, links, theta_dot);
  last_time_ = t0;
  step_ = 0;
  initialized_ = true;
  EnergyBreakdown e = m_ > 0 ? total_energy_truncated(nl_, b_, u0, links, m_)
                             : total_energy(nl_, b_, u0, links);
  e0_ = e.total;
  record(u0, links);
}

void DiagnosticsLedger::advance(
    double t_next, const ComplexField& u_next, const LinkSet& links_next,
    const std::array<std::vector<double>, 2>& theta_dot_next) {
  if (!initialized_)
    throw Error("ledger not initialized");
  const double rate = energy_correction_rate(u_next, links_next,
                                             theta_dot_next);
  correction_ += 0.5 * (t_next - last_time_) * (last_rate_ + rate);
  last_rate_ = rate;
  last_time_ = t_next;
  ++step_;
}

const DiagnosticsRow& DiagnosticsLedger::record(const ComplexField& u,
                                                const LinkSet& links) {
  DiagnosticsRow row;
  row.step = step_;
  row.time = last_time_;
  row.mass = mass_l2(u);
  EnergyBreakdown e = m_ > 0 ? total_energy_truncated(nl_, b_, u, links, m_)
                             : total_energy(nl_, b_, u, links);
  row.kinetic = e.kinetic;
  row.nl_energy = e.nonlinear;
  row.energy = e.total;
  row.correction_integral = correction_;
  row.energy_law_residual = e.total - e0_ + correction_;
  row.h1mg_norm = magnetic_h1_norm(u, links);
  row.max_abs = lp_norm(u, std::numeric_limits<double>::infinity());
  row.boundary_leakage = boundary_leakage(u);
  series_.rows.push_back(row);
  return series_.rows.back();
}

DiagnosticsSeries& update_ledger(DiagnosticsSeries& series,
                                 const ComplexField& u_prev,
                                 const ComplexField& u_next,
                                 const PotentialSpec& potential,
                                 const NonlinearitySpec& nl, double t,
                                 double dt, double b) {
  PotentialLinkCache cache(potential, u_prev.grid(), b);

  auto make_row = [&](long step, double time, const ComplexField& u,
                      const LinkSet& links, double corr) {
    DiagnosticsRow row;
    row.step = step;
    row.time = time;
    row.mass = mass_l2(u);
    EnergyBreakdown e = total_energy(nl, b, u, links);
    row.kinetic = e.kinetic;
    row.nl_energy = e.nonlinear;
    row.energy = e.total;
    row.correction_integral = corr;
    row.h1mg_norm = magnetic_h1_norm(u, links);
    row.max_abs = lp_norm(u, std::numeric_limits<double>::infinity());
    row.boundary_leakage = boundary_leakage(u);
    return row;
  };

  if (series.empty()) {
    DiagnosticsRow r0 = make_row(0, t, u_prev, cache.links(t), 0.0);
    r0.energy_law_residual = 0.0;
    series.rows.push_back(r0);
  }
  const double e0 = series.front().energy;
  const double rate_prev =
      energy_correction_rate(u_prev, cache.links(t), cache.theta_dot(t));
  const double rate_next = energy_correction_rate(
      u_next, cache.links(t + dt), cache.theta_dot(t + dt));
  const double corr = series.back().correction_integral +
                      0.5 * dt * (rate_prev + rate_next);

  DiagnosticsRow row = make_row(series.back().step + 1, t + dt, u_next,
                                cache.links(t + dt), corr);
  row.energy_law_residual = row.energy - e0 + corr;
  series.rows.push_back(row);
  return series;
}

double mixed_norm(const Trajectory& traj, double q, double r) {
  if (traj.size() == 0)
    throw InvalidParameter("mixed_norm: empty trajectory");
  if (r < 2.0)
    throw InvalidParameter("mixed_norm requires r >= 2");
  if (std::isinf(q)) {
    double m = 0.0;
    for (const ComplexField& u : traj.fields)
      m = std::max(m, lp_norm(u, r));
    return m;
  }
  if (q < 1.0)
    throw InvalidParameter("mixed_norm requires q >= 1 or infinity");
  if (traj.size() == 1)
    return 0.0; // zero-length time interval
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    double a = std::pow(lp_norm(traj.fields[i], r), q);
    double b = std::pow(lp_norm(traj.fields[i + 1], r), q);
    integral += 0.5 * (traj.times[i + 1] - traj.times[i]) * (a + b);
  }
  return std::pow(integral, 1.0 / q);
}

void write_diagnostics_csv(const DiagnosticsSeries& series,
                           const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out)
    throw Error("cannot open CSV for writing: " + path.string());
  out << "step,time,mass,kinetic,nl_energy,energy,correction_integral,"
         "energy_law_residual,h1mg_norm,max_abs,boundary_leakage\n";
  char buf[64];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << sep;
  };
  for (const DiagnosticsRow& r : series.rows) {
    out << r.step << ',';
    put(r.time, ',');
    put(r.mass, ',');
    put(r.kinetic, ',');
    put(r.nl_energy, ',');
    put(r.energy, ',');
    put(r.correction_integral, ',');
    put(r.energy_law_residual, ',');
    put(r.h1mg_norm, ',');
    put(r.max_abs, ',');
    put(r.boundary_leakage, '\n');
  }
}

} // namespace magnls
