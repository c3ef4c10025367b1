#include "magnls/propagator.hpp"

#include <cmath>

namespace magnls {

void SolverConfig::validate() const {
  if (!(b > 0.0))
    throw InvalidParameter("solver b must be positive");
  if (!(dt > 0.0))
    throw InvalidParameter("solver dt must be positive");
  if (!(t_end > 0.0))
    throw InvalidParameter("solver t_end must be positive");
  if (!(dt < t_end))
    throw InvalidParameter("solver requires dt < t_end");
  if (!(cn_tolerance > 0.0) || cn_tolerance >= 1e-6)
    throw InvalidParameter("cn_tolerance must lie in (0, 1e-6)");
  if (cn_max_iterations < 1)
    throw InvalidParameter("cn_max_iterations must be >= 1");
  if (snapshot_stride < 1)
    throw InvalidParameter("snapshot_stride must be >= 1");
  if (ladder == LadderMode::truncated && ladder_m < 1)
    throw InvalidParameter("truncation level m must be >= 1");
  if (ladder == LadderMode::piecewise_A && ladder_n < 1)
    throw InvalidParameter("piecewise window count n must be >= 1");
  if (!(blowup_ceiling > 1.0))
    throw InvalidParameter("blowup ceiling factor must exceed 1");
}

long SolverConfig::step_count() const {
  long n = std::llround(t_end / dt);
  return n < 1 ? 1 : n;
}

bool SolverConfig::leakage_enabled(const PotentialSpec& pot) const {
  switch (leakage_check) {
  case LeakageCheck::on:
    return true;
  case LeakageCheck::off:
    return false;
  case LeakageCheck::automatic:
    return !pot.is_zero();
  }
  return false;
}

LinearStepper::LinearStepper(const Grid& grid, double cn_tolerance,
                             int cn_max_iterations)
    : ws_(grid), tol_(cn_tolerance), maxit_(cn_max_iterations) {
  const std::size_t N = grid.size();
  precond_.resize(N);
  r_.resize(N);
  r0_.resize(N);
  p_.resize(N);
  v_.resize(N);
  s_.resize(N);
  phat_.resize(N);
  shat_.resize(N);
  t_.resize(N);
  buf_.resize(N);
}

void LinearStepper::refresh_preconditioner(double dt) {
  if (dt == cached_dt_)
    return;
  const auto& sym = ws_.stencil_laplacian_symbol();
  for (std::size_t k = 0; k < precond_.size(); ++k)
    precond_[k] = 1.0 / Complex{1.0, 0.5 * dt * sym[k]};
  cached_dt_ = dt;
}

void LinearStepper::apply_operator(const LinkSet& links, double dt,
                                   std::span<const Complex> in,
                                   std::span<Complex> out) {
  magnetic_laplacian_into(in, links, out);
  const Complex coef{0.0, 0.5 * dt};
  for (std::size_t k = 0; k < in.size(); ++k)
    out[k] = in[k] + coef * out[k];
}

void LinearStepper::apply_preconditioner(std::span<const Complex> in,
                                         std::span<Complex> out) {
  ws_.forward(in, out);
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] *= precond_[k];
  ws_.inverse(out, out);
}

namespace {
Complex dot(std::span<const Complex> a, std::span<const Complex> b) {
  Complex s{0.0, 0.0};
  for (std::size_t k = 0; k < a.size(); ++k)
    s += std::conj(a[k]) * b[k];
  return s;
}
double norm2(std::span<const Complex> a) {
  double s = 0.0;
  for (const Complex& z : a)
    s += std::norm(z);
  return std::sqrt(s);
}
} // namespace

void LinearStepper::step(ComplexField& u, const LinkSet& links, double dt) {
  refresh_preconditioner(dt);
  const std::size_t N = u.size();

  // rhs = (I - i(dt/2)H) u
  std::vector<Complex>& rhs = buf_;
  magnetic_laplacian_into(u.values(), links, rhs);
  const Complex coef{0.0, -0.5 * dt};
  for (std::size_t k = 0; k < N; ++k)
    rhs[k] = u[k] + coef * rhs[k];
  const double rhs_norm = norm2(rhs);
  if (rhs_norm == 0.0) {
    std::fill(u.values().begin(), u.values().end(), Complex{0.0, 0.0});
    last_residual_ = 0.0;
    return;
  }

  // Initial guess x = P^{-1} rhs, exact when A vanishes.
  std::span<Complex> x = u.values();
  apply_preconditioner(rhs, x);
  apply_operator(links, dt, x, r_);
  for (std::size_t k = 0; k < N; ++k)
    r_[k] = rhs[k] - r_[k];
  double res = norm2(r_) / rhs_norm;
  if (res <= tol_) {
    last_residual_ = res;
    return;
  }

  // Preconditioned BiCGStab on (I + i(dt/2)H) x = rhs.
  std::copy(r_.begin(), r_.end(), r0_.begin());
  Complex rho{1.0, 0.0}, alpha{1.0, 0.0}, omega{1.0, 0.0};
  std::fill(p_.begin(), p_.end(), Complex{0.0, 0.0});
  std::fill(v_.begin(), v_.end(), Complex{0.0, 0.0});

  for (int it = 1; it <= maxit_; ++it) {
    Complex rho_new = dot(r0_, r_);
    if (std::abs(rho_new) < 1e-300)
      throw SolverDivergence(res, it);
    Complex beta = (rho_new / rho) * (alpha / omega);
    for (std::size_t k = 0; k < N; ++k)
      p_[k] = r_[k] + beta * (p_[k] - omega * v_[k]);
    apply_preconditioner(p_, phat_);
    apply_operator(links, dt, phat_, v_);
    alpha = rho_new / dot(r0_, v_);
    for (std::size_t k = 0; k < N; ++k)
      s_[k] = r_[k] - alpha * v_[k];
    ++total_iterations_;
    if (norm2(s_) / rhs_norm <= tol_) {
      for (std::size_t k = 0; k < N; ++k)
        x[k] += alpha * phat_[k];
      std::copy(s_.begin(), s_.end(), r_.begin());
      last_residual_ = norm2(r_) / rhs_norm;
      return;
    }
    apply_preconditioner(s_, shat_);
    apply_operator(links, dt, shat_, t_);
    omega = dot(t_, s_) / dot(t_, t_);
    for (std::size_t k = 0; k < N; ++k) {
      x[k] += alpha * phat_[k] + omega * shat_[k];
      r_[k] = s_[k] - omega * t_[k];
    }
    rho = rho_new;
    res = norm2(r_) / rhs_norm;
    if (res <= tol_) {
      last_residual_ = res;
      return;
    }
  }
  throw SolverDivergence(res, maxit_);
}

ComplexField linear_step(const ComplexField& u, const PotentialSpec& pot,
                         double t, double dt, double b,
                         const SolverConfig& cfg) {
  if (!u.all_finite())
    throw InvalidParameter("linear_step: field has non-finite entries");
  PotentialLinkCache cache(pot, u.grid(), b);
  LinearStepper stepper(u.grid(), cfg.cn_tolerance, cfg.cn_max_iterations);
  ComplexField out = u;
  stepper.step(out, cache.links(t + 0.5 * dt), dt);
  return out;
}

namespace {

ComplexField rotate_field(const ComplexField& u, const NonlinearitySpec& nl,
                          double dt, double b, int m) {
  ComplexField out(u.grid());
  const double strength = nl.sign * std::pow(b, nl.gamma) * dt;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double r = std::abs(u[k]);
    const double rate =
        m > 0 ? nl.rotation_rate_truncated(r, m) : nl.rotation_rate(r);
    out[k] = std::polar(1.0, strength * rate) * u[k];
  }
  return out;
}

} // namespace

ComplexField nonlinear_step(const ComplexField& u, const NonlinearitySpec& nl,
                            double dt, double b) {
  if (nl.kind == NonlinearityKind::none)
    return u;
  return rotate_field(u, nl, dt, b, 0);
}

ComplexField nonlinear_step_truncated(const ComplexField& u,
                                      const NonlinearitySpec& nl, double dt,
                                      double b, int m) {
  if (m < 1)
    throw InvalidParameter("truncation level m must be >= 1");
  if (nl.kind == NonlinearityKind::none)
    return u;
  return rotate_field(u, nl, dt, b, m);
}

ComplexField strang_step(const ComplexField& u, const PotentialSpec& pot,
                         const NonlinearitySpec& nl, double t, double dt,
                         double b, const SolverConfig& cfg) {
  ComplexField w = nonlinear_step(u, nl, 0.5 * dt, b);
  w = linear_step(w, pot, t, dt, b, cfg);
  return nonlinear_step(w, nl, 0.5 * dt, b);
}

namespace {

// Plain quadrature of b^2 |W|^2 |u|^2 over the box.
double quadratic_window_term(const ComplexField& u, const RealVectorField& W,
                             double b) {
  double s = 0.0;
  for (int a = 0; a < u.grid().dim(); ++a) {
    auto w = W.component(a);
    for (std::size_t k = 0; k < u.size(); ++k)
      s += w[k] * w[k] * std::norm(u[k]);
  }
  return 0.5 * b * b * s * u.grid().cell_volume();
}

SolveResult march(const ComplexField& u0, const PotentialSpec& pot,
                  const NonlinearitySpec& nl, const SolverConfig& cfg,
                  const RealField* gauge_chi) {
  cfg.validate();
  pot.validate(u0.grid().dim());
  nl.validate(u0.grid().dim());

  SolveResult result(u0);

  if (!u0.all_finite()) {
    result.status = SolveStatus::blowup_detected;
    result.detail = "initial data contains non-finite entries";
    return result;
  }
  const bool check_leak = cfg.leakage_enabled(pot);
  if (check_leak) {
    double leak0 = boundary_leakage(u0);
    if (leak0 > cfg.initial_leakage_threshold) {
      result.status = SolveStatus::leakage;
      result.detail = "initial data not supported away from the boundary "
                      "(leakage " +
                      std::to_string(leak0) + ")";
      return result;
    }
  }

  const bool piecewise = cfg.ladder == LadderMode::piecewise_A;
  const bool truncated = cfg.ladder == LadderMode::truncated;
  const long steps = cfg.step_count();
  const long n_windows = piecewise ? cfg.ladder_n : 1;
  if (piecewise && steps % n_windows != 0)
    throw InvalidParameter(
        "piecewise ladder requires the step count to divide into n windows");
  const long steps_per_window = steps / n_windows;
  const double window = cfg.t_end / static_cast<double>(n_windows);

  PotentialLinkCache cache(pot, u0.grid(), cfg.b, gauge_chi);
  LinearStepper stepper(u0.grid(), cfg.cn_tolerance, cfg.cn_max_iterations);
  DiagnosticsLedger ledger(nl, cfg.b, truncated ? cfg.ladder_m : 0);

  std::array<std::vector<double>, 2> zero_rate;
  for (int a = 0; a < u0.grid().dim(); ++a)
    zero_rate[a].assign(u0.grid().size(), 0.0);

  // Step links: frozen per window (piecewise), constant (static potential),
  // or rebuilt at each step midpoint. Report links evaluate diagnostics at
  // the step end; in piecewise mode the frozen window potential defines
  // the ledger energy E_n(t).
  const bool static_links = cache.is_static() && !piecewise;
  LinkSet step_links = cache.links(0.0);
  LinkSet report_links = step_links;

  ledger.initialize(0.0, u0, step_links,
                    (piecewise || static_links) ? zero_rate
                                                : cache.theta_dot(0.0));
  if (cfg.store_trajectory) {
    result.trajectory.times.push_back(0.0);
    result.trajectory.fields.push_back(u0);
  }

  ComplexField u = u0;
  const double h1_initial = ledger.series().front().h1mg_norm;
  const double ceiling =
      h1_initial > 0.0 ? cfg.blowup_ceiling * h1_initial : cfg.blowup_ceiling;

  auto abort_run = [&](SolveStatus status, std::string detail, double t) {
    result.status = status;
    result.detail = std::move(detail);
    result.end_time = t;
    result.final_field = u;
    result.series = ledger.series();
    result.cn_iterations = stepper.total_iterations();
    return result;
  };

  for (long k = 0; k < steps; ++k) {
    const double t = k * cfg.dt;

    if (piecewise && k % steps_per_window == 0 && k > 0) {
      // Window junction: the frozen potential jumps from A(t_prev) to
      // A(t_new) while the state is continuous. The cross term is the
      // discrete counterpart of  Re<(i grad - bA(t_prev)) u, b W u>  at
      // the junction state, and the quadratic term is the
      // (1/2) b^2 ||W u||^2 bookkeeping; together they reproduce the
      // kinetic-energy jump exactly, so the ledger residual is the
      // accumulated quadratic remainder (the O(t/n ||phi||^2) term).
      const long win = k / steps_per_window;
      const double t_prev = (win - 1) * window;
      const double t_new = win * window;
      LinkSet links_new = cache.links(t_new);
      const double k_old = kinetic_energy(u, step_links);
      const double k_new = kinetic_energy(u, links_new);
      RealVectorField W = potential_increment(pot, t_prev, t_new, u.grid());
      const double quad = quadratic_window_term(u, W, cfg.b);
      const double cross = quad - (k_new - k_old);
      ledger.add_correction(cross);
      result.junction_times.push_back(t_new);
      result.junction_cross_terms.push_back(cross);
      result.junction_quadratic_terms.push_back(quad);
      result.quadratic_sum += quad;
      step_links = std::move(links_new);
    } else if (!piecewise && !static_links) {
      step_links = cache.links(t + 0.5 * cfg.dt);
    }

    try {
      if (truncated)
        u = nonlinear_step_truncated(u, nl, 0.5 * cfg.dt, cfg.b, cfg.ladder_m);
      else
        u = nonlinear_step(u, nl, 0.5 * cfg.dt, cfg.b);
      stepper.step(u, step_links, cfg.dt);
      if (truncated)
        u = nonlinear_step_truncated(u, nl, 0.5 * cfg.dt, cfg.b, cfg.ladder_m);
      else
        u = nonlinear_step(u, nl, 0.5 * cfg.dt, cfg.b);
    } catch (const SolverDivergence& e) {
      return abort_run(SolveStatus::solver_divergence, e.what(), t);
    }

    const double t_next = (k + 1) * cfg.dt;
    const bool frozen_report = piecewise || static_links;
    if (!frozen_report)
      report_links = cache.links(t_next);
    const LinkSet& rep = frozen_report ? step_links : report_links;
    if (frozen_report) {
      ledger.advance(t_next, u, rep, zero_rate);
    } else {
      auto rates = cache.theta_dot(t_next);
      ledger.advance(t_next, u, rep, rates);
    }

    const bool last = k + 1 == steps;
    if ((k + 1) % cfg.snapshot_stride == 0 || last) {
      const DiagnosticsRow& row = ledger.record(u, rep);
      if (cfg.store_trajectory) {
        result.trajectory.times.push_back(t_next);
        result.trajectory.fields.push_back(u);
      }
      if (!u.all_finite() || !std::isfinite(row.h1mg_norm))
        return abort_run(SolveStatus::blowup_detected,
                         "non-finite field at t = " + std::to_string(t_next),
                         t_next);
      if (row.h1mg_norm > ceiling)
        return abort_run(SolveStatus::blowup_detected,
                         "h1mg norm " + std::to_string(row.h1mg_norm) +
                             " exceeded ceiling at t = " +
                             std::to_string(t_next),
                         t_next);
      if (check_leak && row.boundary_leakage > cfg.leakage_threshold)
        return abort_run(SolveStatus::leakage,
                         "boundary leakage " +
                             std::to_string(row.boundary_leakage) +
                             " at t = " + std::to_string(t_next),
                         t_next);
    }
  }

  result.status = SolveStatus::ok;
  result.end_time = steps * cfg.dt;
  result.final_field = u;
  result.series = ledger.series();
  result.cn_iterations = stepper.total_iterations();
  return result;
}

} // namespace

SolveResult solve(const ComplexField& u0, const PotentialSpec& pot,
                  const NonlinearitySpec& nl, const SolverConfig& cfg,
                  const RealField* gauge_chi) {
  if (cfg.ladder != LadderMode::none)
    throw InvalidParameter("solve() expects ladder mode none");
  return march(u0, pot, nl, cfg, gauge_chi);
}

SolveResult solve_piecewise_A(const ComplexField& u0, const PotentialSpec& pot,
                              const NonlinearitySpec& nl,
                              const SolverConfig& cfg) {
  if (cfg.ladder != LadderMode::piecewise_A)
    throw InvalidParameter("solve_piecewise_A() expects ladder piecewise_A");
  return march(u0, pot, nl, cfg, nullptr);
}

SolveResult solve_truncated(const ComplexField& u0, const PotentialSpec& pot,
                            const NonlinearitySpec& nl,
                            const SolverConfig& cfg) {
  if (cfg.ladder != LadderMode::truncated)
    throw InvalidParameter("solve_truncated() expects ladder truncated");
  return march(u0, pot, nl, cfg, nullptr);
}

SolveResult run_solver(const ComplexField& u0, const PotentialSpec& pot,
                       const NonlinearitySpec& nl, const SolverConfig& cfg) {
  switch (cfg.ladder) {
  case LadderMode::none:
    return solve(u0, pot, nl, cfg);
  case LadderMode::truncated:
    return solve_truncated(u0, pot, nl, cfg);
  case LadderMode::piecewise_A:
    return solve_piecewise_A(u0, pot, nl, cfg);
  }
  throw InvalidParameter("unknown ladder mode");
}

} // namespace magnls
