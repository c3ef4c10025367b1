// Acceptance suite: one numbered scenario per run-time guarantee the
// library makes, each printing a [PASS]/[FAIL] line with the measured
// numbers. Run with --criterion N for a single scenario, or no arguments
// for all ten. Exit status is the number of failures.

#include "magnls/experiments.hpp"
#include "magnls/snapshot.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <sys/wait.h>

using namespace magnls;

namespace {

struct Check {
  bool pass = true;
  std::string message;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// ---------------------------------------------------------------------
// Criterion 1: mass conservation.
// 2D, 128^2, constant field B0 = 1, b = 4, defocusing cubic, 2000 Strang
// steps at dt = 5e-4: relative mass drift <= 1e-8.
// ---------------------------------------------------------------------

RunConfig criterion1_config() {
  return parse_run_config_text(R"(
[grid]
dim = 2
n = 128
length = 16

[potential]
kind = constant_field
b0 = 1.0

[nonlinearity]
g = power
sigma = 1
sign = -1
gamma = 0

[solver]
b = 4
dt = 5e-4
t_end = 1.0
cn_tolerance = 1e-12
initial = gaussian
amplitude = 0.8
width = 0.75
snapshot_stride = 200

[output]
dir = out
seed = 1
snapshots = false
)");
}

Check criterion1() {
  RunConfig cfg = criterion1_config();
  ComplexField u0 = cfg.initial.build(cfg.grid);
  SolveResult res = solve(u0, cfg.potential, cfg.nonlinearity, cfg.solver);
  if (!res.ok())
    return {false, "run aborted: " + res.detail};
  double m0 = res.series.front().mass;
  double drift = 0.0;
  for (const DiagnosticsRow& row : res.series.rows)
    drift = std::max(drift, std::abs(row.mass - m0) / m0);
  return {drift <= 1e-8,
          "2000 steps, relative mass drift " + fmt(drift) + " (<= 1e-8)"};
}

// ---------------------------------------------------------------------
// Criterion 2: gauge invariance. Same scenario with A vs A + grad(chi)
// (smooth bump chi, exact link integrals): pointwise discrepancy after
// the phase map <= 1e-6 after 200 steps.
// ---------------------------------------------------------------------

Check criterion2() {
  RunConfig cfg = criterion1_config();
  cfg.solver.t_end = 0.1; // 200 steps
  ComplexField u0 = cfg.initial.build(cfg.grid);
  RealField chi = RealField::sample(cfg.grid, [](double x, double y) {
    return 0.8 * std::exp(-((x - 0.7) * (x - 0.7) + y * y) / 2.5);
  });

  SolveResult plain = solve(u0, cfg.potential, cfg.nonlinearity, cfg.solver);
  if (!plain.ok())
    return {false, "plain run aborted: " + plain.detail};
  ComplexField u0s = apply_gauge_phase(u0, chi, cfg.solver.b);
  SolveResult shifted =
      solve(u0s, cfg.potential, cfg.nonlinearity, cfg.solver, &chi);
  if (!shifted.ok())
    return {false, "shifted run aborted: " + shifted.detail};

  ComplexField mapped = apply_gauge_phase(plain.final_field, chi,
                                          cfg.solver.b);
  double worst = 0.0;
  for (std::size_t k = 0; k < mapped.size(); ++k)
    worst = std::max(worst, std::abs(mapped[k] - shifted.final_field[k]));
  return {worst <= 1e-6,
          "pointwise gauge discrepancy " + fmt(worst) + " (<= 1e-6)"};
}

// ---------------------------------------------------------------------
// Criterion 3: dispersion oracle. 1D plane wave, A = 0, cubic, b^gamma=1:
// measured frequency within 1e-4 relative of |k_disc|^2 - sign g(c^2).
// ---------------------------------------------------------------------

Check criterion3() {
  Grid grid(1, 128, 16.0);
  PotentialSpec pot = PotentialSpec::make_zero(1);
  const double c = 0.9;
  const int mode = 3;
  const double k = 2.0 * std::numbers::pi * mode / grid.length();
  const double h = grid.spacing();
  const double k2_disc = 4.0 * std::pow(std::sin(0.5 * k * h), 2) / (h * h);
  ComplexField u0 = ComplexField::sample(grid, [&](double x, double) {
    return std::polar(c, k * x);
  });

  std::string report;
  bool pass = true;
  for (int sign : {1, -1}) {
    NonlinearitySpec nl = NonlinearitySpec::make_power(1.0, sign, 0.0);
    SolverConfig sc;
    sc.b = 1.0;
    sc.dt = 2e-4;
    sc.t_end = 0.2;
    sc.cn_tolerance = 1e-12;
    sc.snapshot_stride = 50;
    sc.store_trajectory = true;
    sc.leakage_check = LeakageCheck::off;
    SolveResult res = solve(u0, pot, nl, sc);
    if (!res.ok())
      return {false, "run aborted: " + res.detail};

    double omega_sum = 0.0;
    int count = 0;
    for (std::size_t i = 1; i < res.trajectory.size(); ++i) {
      Complex corr = inner_product(u0, res.trajectory.fields[i]);
      double phase = std::arg(corr / (c * c * grid.length()));
      if (std::abs(phase) < 3.0) {
        omega_sum += -phase / res.trajectory.times[i];
        ++count;
      }
    }
    double omega = count ? omega_sum / count : 0.0;
    double expected = k2_disc - sign * c * c;
    double rel = std::abs(omega - expected) / std::abs(expected);
    pass = pass && rel <= 1e-4;
    report += "sign " + std::string(sign > 0 ? "+1" : "-1") + ": rel err " +
              fmt(rel) + "  ";
  }
  return {pass, report + "(<= 1e-4)"};
}

// ---------------------------------------------------------------------
// Criterion 4: energy law. Static A: |E(t)-E(0)|/|E(0)| <= 1e-5 at
// dt = 5e-4 and improves >= 3.5x at dt/2. Modulated A: the ledger
// residual decays at order 2 (ratio in [3.5, 4.5]) under dt halving.
// ---------------------------------------------------------------------

Check criterion4() {
  Grid grid(2, 64, 16.0);
  NonlinearitySpec nl = NonlinearitySpec::make_power(1.0, -1, 0.0);
  PotentialSpec stat = PotentialSpec::make_constant_field(1.0);
  ComplexField u0 = ComplexField::sample(grid, [](double x, double y) {
    return Complex{0.75 * std::exp(-(x * x + y * y) / (2.0 * 0.75 * 0.75)),
                   0.0};
  });

  auto energy_drift = [&](double dt) {
    SolverConfig sc;
    sc.b = 1.0;
    sc.dt = dt;
    sc.t_end = 0.5;
    sc.cn_tolerance = 1e-12;
    sc.snapshot_stride = 100;
    sc.store_trajectory = false;
    SolveResult res = solve(u0, stat, nl, sc);
    double e0 = res.series.front().energy;
    double worst = 0.0;
    for (const DiagnosticsRow& row : res.series.rows)
      worst = std::max(worst, std::abs(row.energy - e0) / std::abs(e0));
    return worst;
  };
  double drift1 = energy_drift(5e-4);
  double drift2 = energy_drift(2.5e-4);
  bool pass_static = drift1 <= 1e-5 && drift1 / drift2 >= 3.5;

  PotentialSpec mod = stat.with_sinusoidal_modulation(0.5, 3.0);
  auto residual_at = [&](double dt) {
    SolverConfig sc;
    sc.b = 1.0;
    sc.dt = dt;
    sc.t_end = 0.5;
    sc.cn_tolerance = 1e-12;
    sc.snapshot_stride = 100000;
    sc.store_trajectory = false;
    SolveResult res = solve(u0, mod, nl, sc);
    return std::abs(res.series.back().energy_law_residual);
  };
  double r1 = residual_at(5e-4);
  double r2 = residual_at(2.5e-4);
  double ratio = r1 / r2;
  bool pass_mod = ratio >= 3.5 && ratio <= 4.5;

  return {pass_static && pass_mod,
          "static drift " + fmt(drift1) + " (<= 1e-5), improvement " +
              fmt(drift1 / drift2) + "x (>= 3.5); modulated residual ratio " +
              fmt(ratio) + " (in [3.5, 4.5])"};
}

// ---------------------------------------------------------------------
// Criterion 5: truncation ladder. sup_t ||u_m - u||_L2 non-increasing
// over m = 1, 2, 4, 8 and <= 5x solver tolerance once m >= 2 max|u|.
// ---------------------------------------------------------------------

Check criterion5() {
  RunConfig cfg = parse_run_config_text(R"(
[grid]
dim = 1
n = 512
length = 64

[nonlinearity]
g = power
sigma = 1
sign = -1
gamma = 0

[solver]
b = 1
dt = 2.5e-4
t_end = 0.5
cn_tolerance = 1e-10
initial = gaussian
amplitude = 2.2
width = 1.0
snapshot_stride = 8
leakage_check = off
)");
  auto points = truncation_ladder(cfg, {1, 2, 4, 8}, 2);

  // max|u| over the run from the reference diagnostics.
  SolverConfig ref = cfg.solver;
  ref.store_trajectory = false;
  ref.snapshot_stride = 8;
  SolveResult res = solve(cfg.initial.build(cfg.grid), cfg.potential,
                          cfg.nonlinearity, ref);
  double max_abs = 0.0;
  for (const DiagnosticsRow& row : res.series.rows)
    max_abs = std::max(max_abs, row.max_abs);

  bool monotone = true;
  std::string seq;
  for (std::size_t i = 0; i + 1 < points.size(); ++i)
    monotone = monotone &&
               points[i].sup_l2_error >= points[i + 1].sup_l2_error - 1e-15;
  for (const LadderPoint& p : points)
    seq += fmt(p.sup_l2_error) + " ";

  bool coincide = true;
  for (const LadderPoint& p : points)
    if (p.param >= 2.0 * max_abs)
      coincide = coincide &&
                 p.sup_l2_error <= 5.0 * cfg.solver.cn_tolerance;

  return {monotone && coincide,
          "sup_t errors over m={1,2,4,8}: " + seq + "(non-increasing; m >= " +
              fmt(2.0 * max_abs) + " coincides within 5x tolerance)"};
}

// ---------------------------------------------------------------------
// Criterion 6: piecewise-A ladder. Trajectory error vs the direct solve
// decays at order 1 +- 0.3 in 1/n for n = 2,4,8,16; the discrete energy
// ledger residual decays like C/n (fit order >= 0.7).
// ---------------------------------------------------------------------

Check criterion6() {
  Grid grid(1, 512, 64.0);
  RealVectorField table = RealVectorField::sample(
      grid, [](int, double x, double) { return 0.8 * std::exp(-x * x / 4.0); });
  RunConfig cfg = parse_run_config_text(R"(
[grid]
dim = 1
n = 512
length = 64

[nonlinearity]
g = power
sigma = 1
sign = -1
gamma = 0

[solver]
b = 1
dt = 2.5e-4
t_end = 1.0
cn_tolerance = 1e-10
initial = gaussian
amplitude = 0.9
width = 1.0
snapshot_stride = 16
)");
  cfg.potential =
      PotentialSpec::make_tabulated(table).with_sinusoidal_modulation(0.5,
                                                                      1.5);

  std::vector<int> ns{2, 4, 8, 16};
  auto points = piecewise_ladder(cfg, ns, 2);
  std::vector<double> xs, errs, residuals;
  std::string seq;
  for (const LadderPoint& p : points) {
    xs.push_back(p.param);
    errs.push_back(p.sup_l2_error);
    residuals.push_back(p.ledger_residual);
    seq += fmt(p.sup_l2_error) + " ";
  }
  double order = fit_decay_order(xs, errs);
  double ledger_order = fit_decay_order(xs, residuals);
  bool pass = order >= 0.7 && order <= 1.3 && ledger_order >= 0.7;
  return {pass, "trajectory errors " + seq + "-> order " + fmt(order) +
                    " (1 +- 0.3); ledger residual order " + fmt(ledger_order) +
                    " (>= 0.7, i.e. <= C/n)"};
}

// ---------------------------------------------------------------------
// Criterion 7: symmetrizer. Over 1000 random states, the symmetrized
// flux matrices are symmetric to 1e-12 and Sigma is positive-definite.
// ---------------------------------------------------------------------

Check criterion7() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  NonlinearitySpec nl = NonlinearitySpec::make_power(1.0, -1, 2.0);

  double worst_asym = 0.0;
  double min_eig = std::numeric_limits<double>::infinity();
  int states_checked = 0;
  for (int dim : {1, 2}) {
    Grid grid(dim, dim == 1 ? 32 : 8, 8.0);
    for (int s = 0; s < 500; ++s) {
      WkbState w(grid, 0.1);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        w.amplitude[k] = Complex{u(rng), u(rng)};
        for (int a = 0; a < dim; ++a)
          w.velocity.value(a, k) = u(rng);
      }
      for (int axis = 0; axis < dim; ++axis) {
        SymmetrizerReport rep = symmetrizer_check(w, nl, axis);
        worst_asym = std::max(worst_asym, rep.max_asymmetry);
        min_eig = std::min(min_eig, rep.min_sigma_eigenvalue);
      }
      ++states_checked;
    }
  }
  bool pass = worst_asym <= 1e-12 && min_eig > 0.0;
  return {pass, std::to_string(states_checked) + " random states: max "
                "asymmetry " + fmt(worst_asym) + " (<= 1e-12), min Sigma "
                "eigenvalue " + fmt(min_eig) + " (> 0)"};
}

// ---------------------------------------------------------------------
// Criterion 8: WKB validity. 1D cubic defocusing, b in {4,8,16},
// rescaled T = 0.5: relative L2 discrepancy <= 5e-3 at the reference
// resolution (fixed points-per-oscillation, n = 128 b), decreasing under
// refinement, with no growth trend in b.
// ---------------------------------------------------------------------

Check criterion8() {
  auto config_for = [](int n) {
    std::ostringstream ss;
    ss << R"(
[grid]
dim = 1
n = )" << n << R"(
length = 24

[nonlinearity]
g = power
sigma = 1
sign = -1
gamma = 2

[wkb]
t_end = 0.5
cfl_safety = 0.5
a0_initial = gaussian
a0_amplitude = 0.8
a0_width = 1.0
s_kind = zero
direct_dt_coeff = 1e-3
)";
    return parse_run_config_text(ss.str());
  };

  std::vector<double> bs{4.0, 8.0, 16.0};
  std::vector<double> errors, refined;
  std::string seq;
  for (double b : bs) {
    const int n_ref = static_cast<int>(128 * b); // fixed per-oscillation
    RunConfig ref_cfg = config_for(n_ref);
    auto rows = compare_to_direct(ref_cfg, {b}, 1);
    errors.push_back(rows.front().rel_l2_error);
    seq += fmt(rows.front().rel_l2_error) + " ";

    RunConfig fine_cfg = config_for(2 * n_ref);
    fine_cfg.wkb.direct_dt_coeff /= 2.0;
    auto fine = compare_to_direct(fine_cfg, {b}, 1);
    refined.push_back(fine.front().rel_l2_error);
  }

  bool bound = true, refines = true, no_growth = true;
  for (std::size_t i = 0; i < bs.size(); ++i) {
    bound = bound && errors[i] <= 5e-3;
    refines = refines && refined[i] < errors[i];
  }
  for (std::size_t i = 0; i + 1 < bs.size(); ++i)
    no_growth = no_growth && errors[i + 1] <= errors[i] * 1.05;

  return {bound && refines && no_growth,
          "rel L2 errors over b={4,8,16}: " + seq +
              "(<= 5e-3, decreasing under refinement, no growth in b)"};
}

// ---------------------------------------------------------------------
// Criterion 9: instability. b in {16, 64, 256}, delta_b = b^{-1/2},
// ||a0||_L2 = 2: the initial gap shrinks to zero while the max L2
// separation reaches >= 1 at t_sep with t_sep * b bounded.
// ---------------------------------------------------------------------

Check criterion9() {
  RunConfig cfg = parse_run_config_text(R"(
[grid]
dim = 1
n = 512
length = 24

[nonlinearity]
g = power
sigma = 1
sign = -1
gamma = 2

[wkb]
t_end = 0.5
a0_initial = gaussian
a0_amplitude = 1.5022510889298849
a0_width = 1.0
s_kind = zero
delta_exponent = -0.5
separation_threshold = 1.0
horizon = 1.0
direct_dt_coeff = 1e-3
)");
  std::vector<double> bs{16.0, 64.0, 256.0};
  auto rows = instability_experiment(cfg, bs, 2);

  bool gaps_decreasing = true, separated = true, product_bounded = true;
  std::string seq;
  double worst_product = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    separated = separated && rows[i].separated &&
                rows[i].max_separation >= 1.0;
    if (i + 1 < rows.size())
      gaps_decreasing =
          gaps_decreasing && rows[i + 1].init_gap < rows[i].init_gap;
    worst_product = std::max(worst_product, rows[i].t_sep_times_b);
    seq += "b=" + fmt(rows[i].b) + ": gap " + fmt(rows[i].init_gap) +
           ", t_sep*b " + fmt(rows[i].t_sep_times_b) + "; ";
  }
  // Bounded: the product must not grow along the sweep.
  for (std::size_t i = 0; i + 1 < rows.size(); ++i)
    product_bounded =
        product_bounded &&
        rows[i + 1].t_sep_times_b <= rows[i].t_sep_times_b * 1.5;

  bool gap_to_zero = rows.back().init_gap < 0.2; // delta 1/16 * ||a0|| = 2
  return {gaps_decreasing && separated && product_bounded && gap_to_zero,
          seq + "(gaps -> 0, separation >= 1 reached, t_sep*b bounded)"};
}

// ---------------------------------------------------------------------
// Criterion 10: determinism. Two CLI runs of criterion 1's configuration
// produce byte-identical CSV output.
// ---------------------------------------------------------------------

Check criterion10() {
#ifndef MAGNLS_CLI_PATH
  return {false, "CLI path not wired into the build"};
#else
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "magnls_acceptance_det";
  fs::remove_all(dir);
  fs::create_directories(dir);

  // Criterion 1's configuration, shortened horizon: determinism is a
  // property of the code path, not of the step count.
  std::ofstream cfg(dir / "cfg.ini");
  cfg << R"(
[grid]
dim = 2
n = 128
length = 16

[potential]
kind = constant_field
b0 = 1.0

[nonlinearity]
g = power
sigma = 1
sign = -1
gamma = 0

[solver]
b = 4
dt = 5e-4
t_end = 0.1
cn_tolerance = 1e-12
initial = gaussian
amplitude = 0.8
width = 0.75
snapshot_stride = 20

[output]
seed = 1
)";
  cfg.close();

  auto run = [&](const std::string& sub) {
    std::string cmd = std::string(MAGNLS_CLI_PATH) + " solve --config " +
                      (dir / "cfg.ini").string() + " --seed 1 --output-dir " +
                      (dir / sub).string() + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  };
  if (run("a") != 0 || run("b") != 0)
    return {false, "CLI runs failed"};

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  bool csv_same = slurp(dir / "a" / "diagnostics.csv") ==
                  slurp(dir / "b" / "diagnostics.csv");
  bool snaps_same = true;
  for (const auto& entry : fs::directory_iterator(dir / "a" / "snapshots")) {
    fs::path other = dir / "b" / "snapshots" / entry.path().filename();
    snaps_same = snaps_same && slurp(entry.path()) == slurp(other);
  }
  return {csv_same && snaps_same,
          std::string("CSV byte-identical: ") + (csv_same ? "yes" : "NO") +
              ", snapshots bit-exact: " + (snaps_same ? "yes" : "NO")};
#endif
}

} // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
      only = std::atoi(argv[i + 1]);
  }

  struct Entry {
    int id;
    const char* name;
    Check (*fn)();
  };
  const Entry entries[] = {
      {1, "mass conservation", criterion1},
      {2, "gauge invariance", criterion2},
      {3, "dispersion oracle", criterion3},
      {4, "energy law", criterion4},
      {5, "truncation ladder", criterion5},
      {6, "piecewise-A ladder", criterion6},
      {7, "symmetrizer", criterion7},
      {8, "WKB validity", criterion8},
      {9, "instability", criterion9},
      {10, "determinism", criterion10},
  };

  int failures = 0;
  for (const Entry& e : entries) {
    if (only != 0 && e.id != only)
      continue;
    auto t0 = Clock::now();
    Check c;
    try {
      c = e.fn();
    } catch (const std::exception& ex) {
      c = {false, std::string("exception: ") + ex.what()};
    }
    double dt = seconds_since(t0);
    std::printf("[%s] criterion %d (%s): %s  [%.1fs]\n",
                c.pass ? "PASS" : "FAIL", e.id, e.name, c.message.c_str(),
                dt);
    std::fflush(stdout);
    if (!c.pass)
      ++failures;
  }
  return failures;
}
