#include "magnls/wkb.hpp"

#include <cmath>
#include <numbers>

namespace magnls {

void WkbConfig::validate() const {
  if (!(b > 0.0))
    throw InvalidParameter("wkb b must be positive");
  if (h_override && *h_override < 0.0)
    throw InvalidParameter("wkb h must be nonnegative");
  if (!(t_end > 0.0))
    throw InvalidParameter("wkb t_end must be positive");
  if (!(cfl_safety > 0.0) || cfl_safety > 1.0)
    throw InvalidParameter("cfl_safety must lie in (0, 1]");
  if (dt_override < 0.0)
    throw InvalidParameter("wkb dt must be nonnegative");
  if (snapshot_stride < 1)
    throw InvalidParameter("snapshot_stride must be >= 1");
}

WkbState wkb_init(const ComplexField& a0, const RealField& S,
                  const PotentialSpec& pot, double b) {
  const Grid& grid = a0.grid();
  if (S.grid() != grid)
    throw DimensionError("wkb_init: phase grid mismatch");
  if (!(b > 0.0))
    throw InvalidParameter("wkb_init: b must be positive");
  pot.validate(grid.dim());
  if (!pot.is_zero() && boundary_leakage(a0) > 1e-10)
    throw InvalidParameter(
        "wkb_init: a0 is not supported away from the boundary");

  WkbState state(grid, 1.0 / b);
  state.amplitude = a0;

  SpectralWorkspace ws(grid);
  ComplexField s_cplx(grid);
  for (std::size_t k = 0; k < S.size(); ++k)
    s_cplx[k] = Complex{S[k], 0.0};
  RealVectorField A0 = eval_A(pot, 0.0, grid);
  for (int a = 0; a < grid.dim(); ++a) {
    ComplexField dS = ws.derivative(s_cplx, a, 1);
    for (std::size_t k = 0; k < grid.size(); ++k)
      state.velocity.value(a, k) = dS[k].real() + A0.value(a, k);
  }
  return state;
}

namespace {

RealField pointwise_gprime(const NonlinearitySpec& nl,
                           const ComplexField& alpha) {
  RealField gp(alpha.grid());
  for (std::size_t k = 0; k < alpha.size(); ++k)
    gp[k] = nl.gprime(std::norm(alpha[k]));
  return gp;
}

} // namespace

WkbState wkb_rhs(const WkbState& state, const PotentialSpec& pot,
                 const NonlinearitySpec& nl, const SpectralWorkspace& ws) {
  const Grid& grid = state.grid();
  if (ws.grid() != grid)
    throw DimensionError("wkb_rhs: workspace grid mismatch");
  nl.require_gprime_positive();
  const int dim = grid.dim();
  const double h = state.h;
  const double t_orig = h * state.t;

  const ComplexField& alpha = state.amplitude;
  const RealVectorField& v = state.velocity;

  // Spectral derivatives of the state.
  std::array<ComplexField, 2> dalpha{ComplexField(grid), ComplexField(grid)};
  for (int a = 0; a < dim; ++a)
    dalpha[a] = ws.derivative(alpha, a, 1);

  std::array<std::array<RealField, 2>, 2> dv{
      {{RealField(grid), RealField(grid)},
       {RealField(grid), RealField(grid)}}};
  {
    ComplexField vc(grid);
    for (int c = 0; c < dim; ++c) {
      for (std::size_t k = 0; k < grid.size(); ++k)
        vc[k] = Complex{v.value(c, k), 0.0};
      for (int a = 0; a < dim; ++a) {
        ComplexField d = ws.derivative(vc, a, 1);
        for (std::size_t k = 0; k < grid.size(); ++k)
          dv[c][a][k] = d[k].real();
      }
    }
  }

  RealField gp = pointwise_gprime(nl, alpha);

  WkbState rhs(grid, h);
  rhs.t = state.t;

  // Amplitude equation: nonlinear products assembled pointwise, dealiased,
  // then the dispersive term added unfiltered.
  {
    ComplexField prod(grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      Complex adv{0.0, 0.0};
      double divv = 0.0;
      for (int a = 0; a < dim; ++a) {
        adv += v.value(a, k) * dalpha[a][k];
        divv += dv[a][a][k];
      }
      prod[k] = 2.0 * adv + alpha[k] * divv;
    }
    ws.dealias_two_thirds(prod);
    if (h > 0.0) {
      ComplexField lap = ws.laplacian(alpha);
      const Complex ih{0.0, h};
      for (std::size_t k = 0; k < grid.size(); ++k)
        rhs.amplitude[k] = -prod[k] + ih * lap[k];
    } else {
      for (std::size_t k = 0; k < grid.size(); ++k)
        rhs.amplitude[k] = -prod[k];
    }
  }

  // Velocity equations. The Lorentz term uses B at the original time; the
  // source is h * dtA(ht).
  RealField B(grid);
  if (dim == 2)
    B = eval_B(pot, t_orig, grid);
  RealVectorField source(grid);
  if (h > 0.0 && !pot.is_static()) {
    RealVectorField dA = eval_dtA(pot, t_orig, grid);
    for (int a = 0; a < dim; ++a)
      for (std::size_t k = 0; k < grid.size(); ++k)
        source.value(a, k) = h * dA.value(a, k);
  }

  for (int c = 0; c < dim; ++c) {
    RealField prod(grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      double adv = 0.0;
      for (int a = 0; a < dim; ++a)
        adv += v.value(a, k) * dv[c][a][k];
      double pressure =
          gp[k] * (alpha[k].real() * dalpha[c][k].real() +
                   alpha[k].imag() * dalpha[c][k].imag());
      double lorentz = 0.0;
      if (dim == 2) {
        // (v x B)_1 = v_2 B, (v x B)_2 = -v_1 B
        lorentz = (c == 0 ? v.value(1, k) : -v.value(0, k)) * B[k];
      }
      prod[k] = 2.0 * adv + 2.0 * pressure + 2.0 * lorentz;
    }
    ws.dealias_two_thirds(prod);
    for (std::size_t k = 0; k < grid.size(); ++k)
      rhs.velocity.value(c, k) = -prod[k] + source.value(c, k);
  }
  return rhs;
}

SymmetrizerReport symmetrizer_check(const WkbState& state,
                                    const NonlinearitySpec& nl, int axis) {
  const Grid& grid = state.grid();
  const int dim = grid.dim();
  if (axis < 0 || axis >= dim)
    throw InvalidParameter("symmetrizer_check: bad axis");
  const int sz = 2 + dim;

  SymmetrizerReport report;
  report.min_sigma_eigenvalue = std::numeric_limits<double>::infinity();

  std::array<std::array<double, 4>, 4> A{};
  std::array<std::array<double, 4>, 4> SA{};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double a1 = state.amplitude[k].real();
    const double a2 = state.amplitude[k].imag();
    const double gp = nl.gprime(std::norm(state.amplitude[k]));
    if (!(gp > 0.0))
      throw InvalidParameter("symmetrizer requires g' > 0 at all points");
    const double vj = state.velocity.value(axis, k);

    for (int p = 0; p < sz; ++p)
      for (int q = 0; q < sz; ++q)
        A[p][q] = 0.0;
    for (int p = 0; p < sz; ++p)
      A[p][p] = 2.0 * vj;
    A[0][2 + axis] = a1;
    A[1][2 + axis] = a2;
    A[2 + axis][0] = 2.0 * gp * a1;
    A[2 + axis][1] = 2.0 * gp * a2;

    // Sigma = diag(1, 1, 1/(2g'), ...)
    std::array<double, 4> sigma{1.0, 1.0, 1.0, 1.0};
    for (int a = 0; a < dim; ++a)
      sigma[2 + a] = 1.0 / (2.0 * gp);
    for (int p = 0; p < sz; ++p)
      for (int q = 0; q < sz; ++q)
        SA[p][q] = sigma[p] * A[p][q];

    for (int p = 0; p < sz; ++p) {
      report.min_sigma_eigenvalue =
          std::min(report.min_sigma_eigenvalue, sigma[p]);
      for (int q = p + 1; q < sz; ++q)
        report.max_asymmetry =
            std::max(report.max_asymmetry, std::abs(SA[p][q] - SA[q][p]));
    }
    ++report.points_checked;
  }
  return report;
}

namespace {

double max_abs_amplitude2(const ComplexField& alpha) {
  double m = 0.0;
  for (const Complex& z : alpha.values())
    m = std::max(m, std::norm(z));
  return m;
}

double max_abs_velocity(const RealVectorField& v) {
  double m = 0.0;
  for (int a = 0; a < v.dim(); ++a)
    for (double x : v.component(a))
      m = std::max(m, std::abs(x));
  return m;
}

double max_velocity_gradient(const RealVectorField& v,
                             const SpectralWorkspace& ws) {
  double m = 0.0;
  ComplexField vc(v.grid());
  for (int c = 0; c < v.dim(); ++c) {
    for (std::size_t k = 0; k < v.grid().size(); ++k)
      vc[k] = Complex{v.value(c, k), 0.0};
    for (int a = 0; a < v.dim(); ++a) {
      ComplexField d = ws.derivative(vc, a, 1);
      for (const Complex& z : d.values())
        m = std::max(m, std::abs(z.real()));
    }
  }
  return m;
}

void axpy_state(WkbState& y, double c, const WkbState& x) {
  for (std::size_t k = 0; k < y.amplitude.size(); ++k)
    y.amplitude[k] += c * x.amplitude[k];
  for (int a = 0; a < y.grid().dim(); ++a)
    for (std::size_t k = 0; k < y.amplitude.size(); ++k)
      y.velocity.value(a, k) += c * x.velocity.value(a, k);
}

RealField phase_rate(const WkbState& s, const NonlinearitySpec& nl) {
  RealField rate(s.grid());
  for (std::size_t k = 0; k < rate.size(); ++k) {
    double v2 = 0.0;
    for (int a = 0; a < s.grid().dim(); ++a)
      v2 += s.velocity.value(a, k) * s.velocity.value(a, k);
    rate[k] = v2 + nl.g(std::norm(s.amplitude[k]));
  }
  return rate;
}

double alpha_mass(const ComplexField& alpha) {
  double s = 0.0;
  for (const Complex& z : alpha.values())
    s += std::norm(z);
  return s * alpha.grid().cell_volume();
}

} // namespace

WkbResult wkb_solve(const ComplexField& a0, const RealField& S,
                    const WkbConfig& cfg, const PotentialSpec& pot,
                    const NonlinearitySpec& nl) {
  cfg.validate();
  nl.require_gprime_positive();
  const Grid& grid = a0.grid();
  const double h = cfg.h();
  SpectralWorkspace ws(grid);

  WkbState state = wkb_init(a0, S, pot, cfg.b);
  state.h = h;

  WkbResult result;
  result.h = h;

  RealField phase_int(grid);
  RealField rate_prev = phase_rate(state, nl);

  auto push_frame = [&]() {
    WkbFrame frame(grid);
    frame.t = state.t;
    frame.amplitude = state.amplitude;
    frame.velocity = state.velocity;
    frame.phase_integral = phase_int;
    result.frames.push_back(std::move(frame));
    result.mass_series.push_back(alpha_mass(state.amplitude));
  };
  push_frame();

  const double k_max = std::numbers::pi / grid.spacing();
  const double lap_max = grid.dim() * k_max * k_max;

  long step = 0;
  while (state.t < cfg.t_end - 1e-14) {
    // Shock proxy before stepping.
    double gradv = max_velocity_gradient(state.velocity, ws);
    if (gradv > cfg.shock_ceiling) {
      result.status = WkbStatus::shock;
      result.detail = "velocity gradient " + std::to_string(gradv) +
                      " exceeded ceiling at t = " + std::to_string(state.t);
      break;
    }

    double dt;
    if (cfg.dt_override > 0.0) {
      dt = cfg.dt_override;
    } else {
      const double speed =
          2.0 * max_abs_velocity(state.velocity) +
          2.0 * std::sqrt(std::max(
                    nl.gprime(max_abs_amplitude2(state.amplitude)), 0.0) *
                    max_abs_amplitude2(state.amplitude)) +
          1e-12;
      dt = cfg.cfl_safety * grid.spacing() / speed;
      if (h > 0.0)
        dt = std::min(dt, cfg.cfl_safety * 2.8 / (h * lap_max));
    }
    dt = std::min(dt, cfg.t_end - state.t);
    if (!(dt > 0.0) || !std::isfinite(dt)) {
      result.status = WkbStatus::stalled;
      result.detail = "step size collapsed at t = " + std::to_string(state.t);
      break;
    }

    // Classical RK4.
    WkbState k1 = wkb_rhs(state, pot, nl, ws);
    WkbState mid = state;
    axpy_state(mid, 0.5 * dt, k1);
    mid.t = state.t + 0.5 * dt;
    WkbState k2 = wkb_rhs(mid, pot, nl, ws);
    mid = state;
    axpy_state(mid, 0.5 * dt, k2);
    mid.t = state.t + 0.5 * dt;
    WkbState k3 = wkb_rhs(mid, pot, nl, ws);
    mid = state;
    axpy_state(mid, dt, k3);
    mid.t = state.t + dt;
    WkbState k4 = wkb_rhs(mid, pot, nl, ws);

    axpy_state(state, dt / 6.0, k1);
    axpy_state(state, dt / 3.0, k2);
    axpy_state(state, dt / 3.0, k3);
    axpy_state(state, dt / 6.0, k4);
    state.t += dt;

    // Mild state filtering keeps aliasing from accumulating.
    ws.dealias_two_thirds(state.amplitude);
    for (int a = 0; a < grid.dim(); ++a) {
      RealField comp(grid);
      for (std::size_t k = 0; k < grid.size(); ++k)
        comp[k] = state.velocity.value(a, k);
      ws.dealias_two_thirds(comp);
      for (std::size_t k = 0; k < grid.size(); ++k)
        state.velocity.value(a, k) = comp[k];
    }

    RealField rate_now = phase_rate(state, nl);
    for (std::size_t k = 0; k < grid.size(); ++k)
      phase_int[k] += 0.5 * dt * (rate_prev[k] + rate_now[k]);
    rate_prev = std::move(rate_now);

    if (!state.amplitude.all_finite()) {
      result.status = WkbStatus::shock;
      result.detail = "non-finite amplitude at t = " + std::to_string(state.t);
      break;
    }

    ++step;
    if (step % cfg.snapshot_stride == 0 || state.t >= cfg.t_end - 1e-14)
      push_frame();
  }

  if (result.frames.back().t < state.t)
    push_frame();
  result.end_time = state.t;
  result.steps = step;
  return result;
}

std::vector<ReconstructedFrame> reconstruct(const WkbResult& traj,
                                            const RealField& S,
                                            const PotentialSpec& pot,
                                            double b) {
  if (traj.frames.empty())
    throw InvalidParameter("reconstruct: empty trajectory");
  const Grid& grid = traj.frames.front().amplitude.grid();
  if (S.grid() != grid)
    throw DimensionError("reconstruct: phase grid mismatch");
  SpectralWorkspace ws(grid);

  std::vector<ReconstructedFrame> out;
  out.reserve(traj.frames.size());
  for (const WkbFrame& frame : traj.frames) {
    ReconstructedFrame rec(grid);
    rec.t_rescaled = frame.t;
    rec.t_physical = frame.t * traj.h;

    RealField phi(grid);
    for (std::size_t k = 0; k < grid.size(); ++k)
      phi[k] = S[k] - frame.phase_integral[k];
    for (std::size_t k = 0; k < grid.size(); ++k)
      rec.u[k] = frame.amplitude[k] * std::polar(1.0, b * phi[k]);

    // Consistency defect: grad(phi) + A(ht) should reproduce v.
    ComplexField phic(grid);
    for (std::size_t k = 0; k < grid.size(); ++k)
      phic[k] = Complex{phi[k], 0.0};
    RealVectorField A = eval_A(pot, rec.t_physical, grid);
    double defect2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      ComplexField dphi = ws.derivative(phic, a, 1);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        double d = dphi[k].real() + A.value(a, k) - frame.velocity.value(a, k);
        defect2 += d * d;
      }
    }
    rec.defect = std::sqrt(defect2 * grid.cell_volume());
    out.push_back(std::move(rec));
  }
  return out;
}

} // namespace magnls
