#include "magnls/experiments.hpp"

#include "magnls/snapshot.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <limits>
#include <numbers>

namespace magnls {

using json = nlohmann::ordered_json;

int exit_code_for(SolveStatus status) {
  switch (status) {
  case SolveStatus::ok:
    return ExitCode::ok;
  case SolveStatus::solver_divergence:
    return ExitCode::solver_divergence;
  case SolveStatus::blowup_detected:
    return ExitCode::blowup_detected;
  case SolveStatus::leakage:
    return ExitCode::leakage;
  }
  return ExitCode::internal;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void run_indexed(std::size_t count, int threads,
                 const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i)
      body(i);
    return;
  }
  std::vector<std::future<void>> futs;
  std::size_t next = 0;
  while (next < count) {
    futs.clear();
    for (int t = 0; t < threads && next < count; ++t, ++next)
      futs.push_back(std::async(std::launch::async, body, next));
    for (auto& f : futs)
      f.get();
  }
}

json grid_json(const Grid& g) {
  return json{{"dim", g.dim()}, {"n", g.n()}, {"length", g.length()}};
}

json audit_json(const AssumptionAudit& a) {
  return json{{"sup_dtA", a.sup_dtA},
              {"sup_dxA_order1", a.sup_dxA_order1},
              {"sup_dxA_order2", a.sup_dxA_order2},
              {"sup_weighted_dxB", a.sup_weighted_dxB},
              {"pass_clause1", a.pass_clause1},
              {"pass_clause2", a.pass_clause2},
              {"pass_clause3", a.pass_clause3},
              {"pass", a.pass()}};
}

json base_metadata(const RunConfig& cfg, const std::string& command) {
  json meta;
  meta["tool"] = "magnls";
  meta["version"] = "0.1.0";
  meta["command"] = command;
  meta["seed"] = cfg.seed;
  meta["grid"] = grid_json(cfg.grid);
  meta["potential"] = {{"kind", cfg.potential.kind_name()},
                       {"static", cfg.potential.is_static()},
                       {"epsilon_decay", cfg.potential.epsilon_decay}};
  std::string g_kind =
      cfg.nonlinearity.kind == NonlinearityKind::none
          ? "none"
          : (cfg.nonlinearity.kind == NonlinearityKind::power ? "power"
                                                              : "custom");
  meta["nonlinearity"] = {{"g", g_kind},
                          {"sigma", cfg.nonlinearity.sigma},
                          {"sign", cfg.nonlinearity.sign},
                          {"gamma", cfg.nonlinearity.gamma}};
  meta["conventions"] = {
      {"equation", "i du/dt = H_A u - sign * b^gamma * f(u)"},
      {"energy", "E = kinetic - sign * b^gamma * G(u)"},
      {"nl_energy_column", "b^gamma * G (or G_m)"},
      {"correction_integrand",
       "-(1/2)<dH/dt u, u>, continuum limit b Re<dtA u, (i grad - bA)u>"},
      {"truncated_energy_prefactor", "b^gamma applied to G_m"}};
  json echo;
  for (const auto& [section, keys] : cfg.echo) {
    json sec;
    for (const auto& [k, v] : keys)
      sec[k] = v;
    echo[section] = sec;
  }
  meta["config"] = echo;
  return meta;
}

void write_metadata(const std::filesystem::path& outdir, const json& meta) {
  std::ofstream out(outdir / "metadata.json");
  out << meta.dump(2) << '\n';
}

void write_run_snapshots(const std::filesystem::path& outdir,
                         const Trajectory& traj, double b) {
  std::filesystem::create_directories(outdir / "snapshots");
  char name[64];
  for (std::size_t i = 0; i < traj.size(); ++i) {
    std::snprintf(name, sizeof name, "snap_%06zu.field", i);
    write_snapshot(outdir / "snapshots" / name, traj.fields[i], traj.times[i],
                   b);
  }
}

std::string status_name(SolveStatus s) {
  switch (s) {
  case SolveStatus::ok:
    return "ok";
  case SolveStatus::blowup_detected:
    return "blowup_detected";
  case SolveStatus::leakage:
    return "leakage";
  case SolveStatus::solver_divergence:
    return "solver_divergence";
  }
  return "?";
}

// Direct-solver configuration for the semiclassical comparison runs: step
// size coeff/b^2 adjusted to divide the horizon exactly.
SolverConfig semiclassical_solver(const RunConfig& cfg, double b,
                                  double t_end_physical, double dt_coeff) {
  SolverConfig sc;
  sc.b = b;
  sc.cn_tolerance = cfg.has("solver") ? cfg.solver.cn_tolerance : 1e-10;
  sc.cn_max_iterations = cfg.has("solver") ? cfg.solver.cn_max_iterations : 500;
  double dt_nominal = dt_coeff / (b * b);
  long steps = std::max(2L, std::lround(std::ceil(t_end_physical / dt_nominal)));
  sc.dt = t_end_physical / static_cast<double>(steps);
  sc.t_end = t_end_physical;
  sc.snapshot_stride = static_cast<int>(steps); // endpoints only
  sc.store_trajectory = false;
  sc.leakage_check = LeakageCheck::off;
  return sc;
}

ComplexField oscillatory_initial(const ComplexField& a0, const RealField& S,
                                 double b) {
  ComplexField u0(a0.grid());
  for (std::size_t k = 0; k < a0.size(); ++k)
    u0[k] = a0[k] * std::polar(1.0, b * S[k]);
  return u0;
}

void check_wkb_resolution(const Grid& grid, double b, const RealField& S,
                          const PotentialSpec& pot) {
  SpectralWorkspace ws(grid);
  ComplexField sc(grid);
  for (std::size_t k = 0; k < S.size(); ++k)
    sc[k] = Complex{S[k], 0.0};
  RealVectorField A0 = eval_A(pot, 0.0, grid);
  double vmax = 0.0;
  for (int a = 0; a < grid.dim(); ++a) {
    ComplexField dS = ws.derivative(sc, a, 1);
    for (std::size_t k = 0; k < grid.size(); ++k)
      vmax = std::max(vmax,
                      std::abs(dS[k].real() + A0.value(a, k)));
  }
  const double k_max = std::numbers::pi / grid.spacing();
  const double needed = 2.0 * b * vmax; // factor-2 resolution margin
  if (needed > k_max) {
    int n_req = grid.n();
    while (std::numbers::pi * n_req / grid.length() < needed)
      n_req *= 2;
    throw ResolutionError(
        "grid cannot resolve the b*(grad S + A) oscillation; need n >= " +
            std::to_string(n_req),
        n_req);
  }
}

} // namespace

std::vector<CompareRow> compare_to_direct(const RunConfig& cfg,
                                          const std::vector<double>& b_list,
                                          int threads) {
  if (cfg.nonlinearity.kind == NonlinearityKind::none)
    throw ConfigError("nonlinearity", "g",
                      "comparison requires a g' > 0 profile");
  if (cfg.nonlinearity.sign != -1 || cfg.nonlinearity.gamma != 2.0)
    throw ConfigError("nonlinearity", "sign",
                      "comparison requires the +b^2 u g dynamics: sign = -1, "
                      "gamma = 2");
  cfg.nonlinearity.require_gprime_positive();

  struct Task {
    double b;
    int level;
  };
  std::vector<Task> tasks;
  for (double b : b_list)
    for (int level = 0; level < std::max(1, cfg.wkb.refine_levels); ++level)
      tasks.push_back({b, level});

  // Failures surface after the sweep so completed rows can still be
  // written by the caller.
  std::vector<CompareRow> rows(tasks.size());
  std::vector<std::string> errors(tasks.size());
  std::exception_ptr resolution_failure;
  run_indexed(tasks.size(), threads, [&](std::size_t i) {
    const Task& task = tasks[i];
    try {
      Grid grid(cfg.grid.dim(), cfg.grid.n() << task.level,
                cfg.grid.length());
      ComplexField a0 = cfg.wkb.a0.build(grid);
      RealField S = cfg.wkb.build_phase(grid);
      check_wkb_resolution(grid, task.b, S, cfg.potential);

      const double T = cfg.wkb.cfg.t_end;
      SolverConfig sc = semiclassical_solver(
          cfg, task.b, T / task.b,
          cfg.wkb.direct_dt_coeff / static_cast<double>(1 << task.level));
      ComplexField u0 = oscillatory_initial(a0, S, task.b);
      SolveResult direct = solve(u0, cfg.potential, cfg.nonlinearity, sc);
      if (!direct.ok())
        throw Error("direct solve failed in comparison: " + direct.detail);

      WkbConfig wc = cfg.wkb.cfg;
      wc.b = task.b;
      wc.h_override.reset();
      wc.snapshot_stride = 1 << 20; // first and last frames only
      WkbResult traj = wkb_solve(a0, S, wc, cfg.potential, cfg.nonlinearity);
      if (traj.status != WkbStatus::ok)
        throw Error("wkb solve aborted in comparison: " + traj.detail);
      auto recon = reconstruct(traj, S, cfg.potential, task.b);

      CompareRow row;
      row.b = task.b;
      row.level = task.level;
      row.n = grid.n();
      row.dt = sc.dt;
      row.rel_l2_error =
          l2_distance(direct.final_field, recon.back().u) / mass_l2(u0);
      row.recon_defect = recon.back().defect;
      row.direct_steps = sc.step_count();
      row.wkb_steps = traj.steps;
      rows[i] = row;
    } catch (const ResolutionError&) {
      if (!resolution_failure)
        resolution_failure = std::current_exception();
      errors[i] = "resolution refused";
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  std::vector<CompareRow> completed;
  std::string first_error;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (errors[i].empty())
      completed.push_back(rows[i]);
    else if (first_error.empty())
      first_error = errors[i];
  }
  if (!first_error.empty() && completed.empty() && resolution_failure)
    std::rethrow_exception(resolution_failure);
  if (!first_error.empty() && completed.empty())
    throw Error(first_error);
  if (!first_error.empty())
    throw PartialSweep(std::move(completed), first_error);
  return completed;
}

InstabilityRow instability_run(const RunConfig& cfg, double b) {
  cfg.nonlinearity.require_gprime_positive();
  const Grid& grid = cfg.grid;
  ComplexField a0 = cfg.wkb.a0.build(grid);
  RealField S = cfg.wkb.build_phase(grid);
  check_wkb_resolution(grid, b, S, cfg.potential);

  const double delta = std::pow(b, cfg.wkb.delta_exponent);
  ComplexField a0_pert(grid);
  for (std::size_t k = 0; k < a0.size(); ++k)
    a0_pert[k] = (1.0 + delta) * a0[k];

  ComplexField u = oscillatory_initial(a0, S, b);
  ComplexField w = oscillatory_initial(a0_pert, S, b);

  InstabilityRow row;
  row.b = b;
  row.delta = delta;
  row.init_gap = l2_distance(u, w);

  const double horizon = cfg.wkb.horizon / b;
  SolverConfig sc = semiclassical_solver(cfg, b, horizon,
                                         cfg.wkb.direct_dt_coeff);
  const long steps = sc.step_count();

  // Lockstep march of both perturbations; O(1) memory over long sweeps.
  PotentialLinkCache cache(cfg.potential, grid, b);
  LinearStepper stepper(grid, sc.cn_tolerance, sc.cn_max_iterations);
  const bool dynamic = !cache.is_static();
  LinkSet links = cache.links(0.5 * sc.dt);

  long extra_allowance = -1;
  for (long k = 0; k < steps; ++k) {
    const double t = k * sc.dt;
    if (dynamic)
      links = cache.links(t + 0.5 * sc.dt);
    for (ComplexField* f : {&u, &w}) {
      *f = nonlinear_step(*f, cfg.nonlinearity, 0.5 * sc.dt, b);
      stepper.step(*f, links, sc.dt);
      *f = nonlinear_step(*f, cfg.nonlinearity, 0.5 * sc.dt, b);
    }
    const double sep = l2_distance(u, w);
    row.max_separation = std::max(row.max_separation, sep);
    if (!row.separated && sep >= cfg.wkb.separation_threshold) {
      row.separated = true;
      row.t_sep = (k + 1) * sc.dt;
      row.t_sep_times_b = row.t_sep * b;
      extra_allowance = std::max(8L, k / 5); // watch a bit past the crossing
    }
    if (extra_allowance >= 0 && --extra_allowance < 0)
      break;
  }
  return row;
}

std::vector<InstabilityRow>
instability_experiment(const RunConfig& cfg, const std::vector<double>& b_list,
                       int threads) {
  std::vector<InstabilityRow> rows(b_list.size());
  run_indexed(b_list.size(), threads, [&](std::size_t i) {
    rows[i] = instability_run(cfg, b_list[i]);
  });
  return rows;
}

namespace {

double sup_trajectory_distance(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size())
    throw Error("trajectory length mismatch in ladder comparison");
  double sup = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    sup = std::max(sup, l2_distance(a.fields[i], b.fields[i]));
  return sup;
}

} // namespace

std::vector<LadderPoint> piecewise_ladder(const RunConfig& cfg,
                                          const std::vector<int>& n_list,
                                          int threads) {
  cfg.require("solver");
  SolverConfig ref_cfg = cfg.solver;
  ref_cfg.ladder = LadderMode::none;
  ref_cfg.store_trajectory = true;
  ComplexField u0 = cfg.initial.build(cfg.grid);
  SolveResult ref = solve(u0, cfg.potential, cfg.nonlinearity, ref_cfg);
  if (!ref.ok())
    throw Error("reference solve failed: " + ref.detail);

  std::vector<LadderPoint> points(n_list.size());
  run_indexed(n_list.size(), threads, [&](std::size_t i) {
    SolverConfig pc = cfg.solver;
    pc.ladder = LadderMode::piecewise_A;
    pc.ladder_n = n_list[i];
    pc.store_trajectory = true;
    SolveResult res = solve_piecewise_A(u0, cfg.potential, cfg.nonlinearity,
                                        pc);
    if (!res.ok())
      throw Error("piecewise solve failed: " + res.detail);
    LadderPoint p;
    p.param = n_list[i];
    p.sup_l2_error = sup_trajectory_distance(ref.trajectory, res.trajectory);
    p.ledger_residual = std::abs(res.series.back().energy_law_residual);
    p.quadratic_sum = res.quadratic_sum;
    points[i] = p;
  });
  return points;
}

std::vector<LadderPoint> truncation_ladder(const RunConfig& cfg,
                                           const std::vector<int>& m_list,
                                           int threads) {
  cfg.require("solver");
  SolverConfig ref_cfg = cfg.solver;
  ref_cfg.ladder = LadderMode::none;
  ref_cfg.store_trajectory = true;
  ComplexField u0 = cfg.initial.build(cfg.grid);
  SolveResult ref = solve(u0, cfg.potential, cfg.nonlinearity, ref_cfg);
  if (!ref.ok())
    throw Error("reference solve failed: " + ref.detail);

  std::vector<LadderPoint> points(m_list.size());
  run_indexed(m_list.size(), threads, [&](std::size_t i) {
    SolverConfig tc = cfg.solver;
    tc.ladder = LadderMode::truncated;
    tc.ladder_m = m_list[i];
    tc.store_trajectory = true;
    SolveResult res = solve_truncated(u0, cfg.potential, cfg.nonlinearity, tc);
    if (!res.ok())
      throw Error("truncated solve failed: " + res.detail);
    LadderPoint p;
    p.param = m_list[i];
    p.sup_l2_error = sup_trajectory_distance(ref.trajectory, res.trajectory);
    p.ledger_residual = std::abs(res.series.back().energy_law_residual);
    points[i] = p;
  });
  return points;
}

std::vector<ResolutionPoint> resolution_sweep(const RunConfig& cfg,
                                              int levels) {
  cfg.require("solver");
  if (levels < 2)
    throw InvalidParameter("resolution sweep needs at least 2 levels");
  if (cfg.potential.kind == PotentialKind::tabulated)
    throw InvalidParameter(
        "resolution sweep cannot refine a tabulated potential");

  std::vector<ComplexField> finals;
  std::vector<ResolutionPoint> points;
  for (int lvl = 0; lvl < levels; ++lvl) {
    Grid grid(cfg.grid.dim(), cfg.grid.n() << lvl, cfg.grid.length());
    SolverConfig sc = cfg.solver;
    sc.dt = cfg.solver.dt / static_cast<double>(1 << lvl);
    sc.store_trajectory = false;
    sc.snapshot_stride = static_cast<int>(sc.step_count());
    PotentialSpec pot = cfg.potential;
    pot.dim = grid.dim();
    SolveResult res =
        run_solver(cfg.initial.build(grid), pot, cfg.nonlinearity, sc);
    if (!res.ok())
      throw Error("resolution-sweep solve failed: " + res.detail);
    finals.push_back(res.final_field);
    points.push_back({grid.n(), sc.dt, 0.0});
  }

  // Restrict the finest solution onto each coarser grid (shared nodes).
  const ComplexField& fine = finals.back();
  for (int lvl = 0; lvl + 1 < levels; ++lvl) {
    const Grid& coarse = finals[lvl].grid();
    const int factor = 1 << (levels - 1 - lvl);
    ComplexField restricted(coarse);
    const int n = coarse.n();
    if (coarse.dim() == 1) {
      for (int i = 0; i < n; ++i)
        restricted[i] = fine[static_cast<std::size_t>(i) * factor];
    } else {
      const Grid& fg = fine.grid();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          restricted[coarse.index(i, j)] = fine[fg.index(i * factor,
                                                         j * factor)];
    }
    points[lvl].error_vs_finest = l2_distance(finals[lvl], restricted);
  }
  points.pop_back(); // the finest level has no error entry
  return points;
}

double fit_decay_order(const std::vector<double>& params,
                       const std::vector<double>& errors) {
  if (params.size() != errors.size() || params.size() < 2)
    throw InvalidParameter("fit_decay_order needs >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    double x = std::log(params[i]);
    double y = std::log(std::max(errors[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return -slope;
}

// ---------------------------------------------------------------------------
// CLI command drivers
// ---------------------------------------------------------------------------

int cmd_solve(const RunConfig& cfg, const std::filesystem::path& outdir) {
  cfg.require("solver");
  std::filesystem::create_directories(outdir);
  ComplexField u0 = cfg.initial.build(cfg.grid);
  SolveResult res = run_solver(u0, cfg.potential, cfg.nonlinearity,
                               cfg.solver);
  write_diagnostics_csv(res.series, outdir / "diagnostics.csv");
  if (cfg.write_snapshots)
    write_run_snapshots(outdir, res.trajectory, cfg.solver.b);

  json meta = base_metadata(cfg, "solve");
  meta["status"] = status_name(res.status);
  meta["detail"] = res.detail;
  meta["end_time"] = res.end_time;
  meta["cn_iterations"] = res.cn_iterations;
  if (!cfg.potential.is_zero())
    meta["potential"]["audit"] = audit_json(audit_assumption1(
        cfg.potential, cfg.grid, 0.0, cfg.solver.t_end, 2, cfg.audit));
  if (cfg.solver.ladder == LadderMode::piecewise_A) {
    meta["piecewise"] = {{"n", cfg.solver.ladder_n},
                         {"quadratic_sum", res.quadratic_sum},
                         {"ledger_residual",
                          res.series.back().energy_law_residual}};
  }
  write_metadata(outdir, meta);
  return exit_code_for(res.status);
}

int cmd_wkb(const RunConfig& cfg, const std::filesystem::path& outdir) {
  cfg.require("wkb");
  std::filesystem::create_directories(outdir);
  ComplexField a0 = cfg.wkb.a0.build(cfg.grid);
  RealField S = cfg.wkb.build_phase(cfg.grid);
  WkbResult res = wkb_solve(a0, S, cfg.wkb.cfg, cfg.potential,
                            cfg.nonlinearity);
  auto recon = reconstruct(res, S, cfg.potential, cfg.wkb.cfg.b);

  {
    std::ofstream out(outdir / "wkb.csv");
    out << "frame,t_rescaled,t_physical,mass,max_abs,recon_defect\n";
    for (std::size_t i = 0; i < res.frames.size(); ++i) {
      double max_abs = lp_norm(res.frames[i].amplitude,
                               std::numeric_limits<double>::infinity());
      out << i << ',' << fmt(res.frames[i].t) << ','
          << fmt(res.frames[i].t * res.h) << ',' << fmt(res.mass_series[i])
          << ',' << fmt(max_abs) << ',' << fmt(recon[i].defect) << '\n';
    }
  }
  if (cfg.write_snapshots) {
    std::filesystem::create_directories(outdir / "snapshots");
    char name[64];
    for (std::size_t i = 0; i < res.frames.size(); ++i) {
      std::snprintf(name, sizeof name, "wkb_%06zu.field", i);
      SnapshotHeader header;
      header.dim = cfg.grid.dim();
      header.n = cfg.grid.n();
      header.length = cfg.grid.length();
      header.time = res.frames[i].t * res.h;
      header.b = cfg.wkb.cfg.b;
      header.h = res.h;
      header.rescaled_time = res.frames[i].t;
      write_snapshot(outdir / "snapshots" / name, res.frames[i].amplitude,
                     header);
    }
  }

  // Symmetrizer spot check on the initial state, reported in metadata.
  WkbState init = wkb_init(a0, S, cfg.potential, cfg.wkb.cfg.b);
  json sym = json::array();
  for (int axis = 0; axis < cfg.grid.dim(); ++axis) {
    SymmetrizerReport rep = symmetrizer_check(init, cfg.nonlinearity, axis);
    sym.push_back({{"axis", axis},
                   {"max_asymmetry", rep.max_asymmetry},
                   {"min_sigma_eigenvalue", rep.min_sigma_eigenvalue},
                   {"points", rep.points_checked}});
  }

  json meta = base_metadata(cfg, "wkb");
  meta["status"] = res.status == WkbStatus::ok ? "ok"
                   : res.status == WkbStatus::shock ? "shock" : "stalled";
  meta["detail"] = res.detail;
  meta["end_time_rescaled"] = res.end_time;
  meta["steps"] = res.steps;
  meta["h"] = res.h;
  meta["final_recon_defect"] = recon.back().defect;
  meta["symmetrizer"] = sym;
  write_metadata(outdir, meta);
  return ExitCode::ok; // shock aborts are reported, not fatal
}

int cmd_compare(const RunConfig& cfg, const std::filesystem::path& outdir,
                const std::vector<double>& b_list, int threads) {
  cfg.require("wkb");
  std::filesystem::create_directories(outdir);
  const std::vector<double>& bs = b_list.empty() ? cfg.wkb.b_list : b_list;

  std::ofstream out(outdir / "compare.csv");
  out << "b,level,n,dt,rel_l2_error,recon_defect\n";
  int rc = ExitCode::ok;
  std::vector<CompareRow> rows;
  std::string failure;
  try {
    rows = compare_to_direct(cfg, bs, threads);
  } catch (const ResolutionError& e) {
    json meta = base_metadata(cfg, "compare");
    meta["status"] = "resolution_refused";
    meta["detail"] = e.what();
    meta["required_n"] = e.required_n;
    write_metadata(outdir, meta);
    return ExitCode::config_invalid;
  } catch (const PartialSweep& e) {
    rows = e.completed; // persist what finished before exiting nonzero
    failure = e.what();
    rc = ExitCode::internal;
  }
  for (const CompareRow& r : rows)
    out << fmt(r.b) << ',' << r.level << ',' << r.n << ',' << fmt(r.dt) << ','
        << fmt(r.rel_l2_error) << ',' << fmt(r.recon_defect) << '\n';

  json meta = base_metadata(cfg, "compare");
  meta["status"] = failure.empty() ? "ok" : "partial";
  if (!failure.empty())
    meta["detail"] = failure;
  json jrows = json::array();
  for (const CompareRow& r : rows)
    jrows.push_back({{"b", r.b},
                     {"level", r.level},
                     {"rel_l2_error", r.rel_l2_error},
                     {"direct_steps", r.direct_steps},
                     {"wkb_steps", r.wkb_steps}});
  meta["rows"] = jrows;
  write_metadata(outdir, meta);
  return rc;
}

int cmd_instability(const RunConfig& cfg, const std::filesystem::path& outdir,
                    const std::vector<double>& b_list, int threads) {
  cfg.require("wkb");
  std::filesystem::create_directories(outdir);
  const std::vector<double>& bs = b_list.empty() ? cfg.wkb.b_list : b_list;

  std::vector<InstabilityRow> rows(bs.size());
  std::vector<std::string> errors(bs.size());
  run_indexed(bs.size(), threads, [&](std::size_t i) {
    try {
      rows[i] = instability_run(cfg, bs[i]);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  std::ofstream out(outdir / "instability.csv");
  out << "b,delta,init_gap,t_sep,t_sep_times_b,max_separation\n";
  std::string failure;
  bool all = true;
  for (std::size_t i = 0; i < bs.size(); ++i) {
    if (!errors[i].empty()) {
      if (failure.empty())
        failure = errors[i];
      continue;
    }
    const InstabilityRow& r = rows[i];
    all = all && r.separated;
    out << fmt(r.b) << ',' << fmt(r.delta) << ',' << fmt(r.init_gap) << ','
        << fmt(r.t_sep) << ',' << fmt(r.t_sep_times_b) << ','
        << fmt(r.max_separation) << '\n';
  }

  json meta = base_metadata(cfg, "instability");
  meta["status"] = failure.empty() ? "ok" : "partial";
  if (!failure.empty())
    meta["detail"] = failure;
  meta["all_separated"] = all;
  write_metadata(outdir, meta);
  return failure.empty() ? ExitCode::ok : ExitCode::internal;
}

int cmd_convergence(const RunConfig& cfg, const std::filesystem::path& outdir,
                    ConvergenceMode mode, const std::vector<int>& param_list,
                    int levels, int threads) {
  std::filesystem::create_directories(outdir);
  json meta = base_metadata(cfg, "convergence");

  if (mode == ConvergenceMode::piecewise ||
      mode == ConvergenceMode::truncated) {
    const bool piecewise = mode == ConvergenceMode::piecewise;
    std::vector<int> params = param_list;
    if (params.empty())
      params = {piecewise ? 2 : 1, piecewise ? 4 : 2, piecewise ? 8 : 4,
                piecewise ? 16 : 8};
    auto points = piecewise ? piecewise_ladder(cfg, params, threads)
                            : truncation_ladder(cfg, params, threads);

    std::ofstream out(outdir / (piecewise ? "convergence_piecewise.csv"
                                          : "convergence_truncated.csv"));
    if (piecewise)
      out << "n,sup_l2_error,ledger_residual,quadratic_sum\n";
    else
      out << "m,sup_l2_error\n";
    std::vector<double> xs, ys;
    for (const LadderPoint& p : points) {
      if (piecewise)
        out << p.param << ',' << fmt(p.sup_l2_error) << ','
            << fmt(p.ledger_residual) << ',' << fmt(p.quadratic_sum) << '\n';
      else
        out << p.param << ',' << fmt(p.sup_l2_error) << '\n';
      xs.push_back(p.param);
      ys.push_back(p.sup_l2_error);
    }
    meta["mode"] = piecewise ? "piecewise" : "truncated";
    meta["measured_order"] = fit_decay_order(xs, ys);
    if (piecewise) {
      std::vector<double> rs;
      for (const LadderPoint& p : points)
        rs.push_back(p.ledger_residual);
      meta["ledger_residual_order"] = fit_decay_order(xs, rs);
    }
    write_metadata(outdir, meta);
    return ExitCode::ok;
  }

  auto points = resolution_sweep(cfg, levels < 2 ? 3 : levels);
  std::ofstream out(outdir / "convergence_resolution.csv");
  out << "n,dt,l2_error_vs_finest\n";
  std::vector<double> xs, ys;
  for (const ResolutionPoint& p : points) {
    out << p.n << ',' << fmt(p.dt) << ',' << fmt(p.error_vs_finest) << '\n';
    xs.push_back(p.n);
    ys.push_back(p.error_vs_finest);
  }
  meta["mode"] = "resolution";
  meta["measured_order"] = xs.size() >= 2 ? fit_decay_order(xs, ys) : 0.0;
  write_metadata(outdir, meta);
  return ExitCode::ok;
}

int cmd_audit(const RunConfig& cfg, const std::filesystem::path& outdir) {
  std::filesystem::create_directories(outdir);
  AssumptionAudit audit = audit_assumption1(cfg.potential, cfg.grid, 0.0,
                                            cfg.audit_t_end, 2, cfg.audit);
  json meta = base_metadata(cfg, "audit");
  meta["status"] = "ok";
  meta["audit"] = audit_json(audit);
  meta["budgets"] = {{"c_dt", cfg.audit.c_dt},
                     {"c_dx", cfg.audit.c_dx},
                     {"c_b", cfg.audit.c_b}};
  write_metadata(outdir, meta);
  return ExitCode::ok;
}

} // namespace magnls
