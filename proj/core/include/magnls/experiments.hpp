#ifndef MAGNLS_EXPERIMENTS_HPP
#define MAGNLS_EXPERIMENTS_HPP

#include "magnls/config.hpp"
#include "magnls/wkb.hpp"

#include <filesystem>

namespace magnls {

/// Exit codes shared by the CLI and the experiment drivers.
struct ExitCode {
  static constexpr int ok = 0;
  static constexpr int internal = 1;
  static constexpr int config_invalid = 2;
  static constexpr int solver_divergence = 3;
  static constexpr int blowup_detected = 4;
  static constexpr int leakage = 5;
};

int exit_code_for(SolveStatus status);

struct CompareRow {
  double b = 0.0;
  int level = 0;
  int n = 0;
  double dt = 0.0;
  double rel_l2_error = 0.0;
  double recon_defect = 0.0;
  long direct_steps = 0;
  long wkb_steps = 0;
};

/// Thrown when some sweep elements completed while others failed; carries
/// the completed rows so callers can persist them before exiting nonzero.
class PartialSweep : public Error {
public:
  PartialSweep(std::vector<CompareRow> rows, const std::string& why)
      : Error("sweep partially failed: " + why), completed(std::move(rows)) {}
  std::vector<CompareRow> completed;
};

/// Direct solve of u0 = a0 exp(ibS) to physical time T/b versus the
/// reconstructed WKB solution at rescaled time T, per field strength and
/// refinement level. Requires the (3.1)-form configuration: sign = -1
/// (the +b^2 u g dynamics) and gamma = 2.
std::vector<CompareRow> compare_to_direct(const RunConfig& cfg,
                                          const std::vector<double>& b_list,
                                          int threads = 1);

struct InstabilityRow {
  double b = 0.0;
  double delta = 0.0;
  double init_gap = 0.0;
  double t_sep = -1.0; // physical time of first threshold crossing; -1 if none
  double t_sep_times_b = -1.0;
  double max_separation = 0.0;
  bool separated = false;
};

InstabilityRow instability_run(const RunConfig& cfg, double b);
std::vector<InstabilityRow>
instability_experiment(const RunConfig& cfg, const std::vector<double>& b_list,
                       int threads = 1);

struct LadderPoint {
  int param = 0; // n (piecewise) or m (truncated)
  double sup_l2_error = 0.0;
  double ledger_residual = 0.0;
  double quadratic_sum = 0.0;
};

std::vector<LadderPoint> piecewise_ladder(const RunConfig& cfg,
                                          const std::vector<int>& n_list,
                                          int threads = 1);
std::vector<LadderPoint> truncation_ladder(const RunConfig& cfg,
                                           const std::vector<int>& m_list,
                                           int threads = 1);

struct ResolutionPoint {
  int n = 0;
  double dt = 0.0;
  double error_vs_finest = 0.0;
};

std::vector<ResolutionPoint> resolution_sweep(const RunConfig& cfg,
                                              int levels);

/// Least-squares slope p of err ~ C * param^{-p}; zero errors are clamped.
double fit_decay_order(const std::vector<double>& params,
                       const std::vector<double>& errors);

enum class ConvergenceMode { piecewise, truncated, resolution };

// -- CLI command drivers: write CSVs/metadata under outdir, return exit code.

int cmd_solve(const RunConfig& cfg, const std::filesystem::path& outdir);
int cmd_wkb(const RunConfig& cfg, const std::filesystem::path& outdir);
int cmd_compare(const RunConfig& cfg, const std::filesystem::path& outdir,
                const std::vector<double>& b_list, int threads);
int cmd_instability(const RunConfig& cfg, const std::filesystem::path& outdir,
                    const std::vector<double>& b_list, int threads);
int cmd_convergence(const RunConfig& cfg, const std::filesystem::path& outdir,
                    ConvergenceMode mode, const std::vector<int>& param_list,
                    int levels, int threads);
int cmd_audit(const RunConfig& cfg, const std::filesystem::path& outdir);

} // namespace magnls

#endif
