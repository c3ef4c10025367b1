#ifndef MAGNLS_CONFIG_HPP
#define MAGNLS_CONFIG_HPP

#include "magnls/nonlinearity.hpp"
#include "magnls/potential.hpp"
#include "magnls/propagator.hpp"
#include "magnls/wkb.hpp"

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace magnls {

/// INI-style configuration: [section] headers, key = value lines, '#'
/// comments, UTF-8. Keys are tracked so that anything not consumed by a
/// typed getter is reported as an unknown-key error.
class IniFile {
public:
  static IniFile parse_file(const std::filesystem::path& path);
  static IniFile parse_text(const std::string& text);

  bool has_section(const std::string& section) const;
  bool has_key(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback);
  std::string require_string(const std::string& section,
                             const std::string& key);
  double get_double(const std::string& section, const std::string& key,
                    double fallback);
  long get_int(const std::string& section, const std::string& key,
               long fallback);
  bool get_bool(const std::string& section, const std::string& key,
                bool fallback);
  std::vector<double> get_double_list(const std::string& section,
                                      const std::string& key,
                                      const std::vector<double>& fallback);

  /// Throws ConfigError naming the first unconsumed key or unknown section.
  void ensure_consumed(const std::set<std::string>& known_sections) const;

  /// Raw contents for the metadata echo.
  const std::map<std::string, std::map<std::string, std::string>>&
  sections() const {
    return sections_;
  }

private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
  std::set<std::pair<std::string, std::string>> consumed_;
};

/// Parametric initial data for the direct solver and the WKB amplitude.
struct InitialData {
  enum class Kind { gaussian, plane_wave, constant, file };
  Kind kind = Kind::gaussian;
  double amplitude = 1.0;
  double width = 1.0;
  std::array<double, 2> center{0.0, 0.0};
  std::array<double, 2> kick{0.0, 0.0}; // momentum phase exp(i k.x)
  std::array<int, 2> mode{1, 0};        // plane-wave lattice mode
  std::string file;

  ComplexField build(const Grid& grid) const;
};

enum class PhaseKind { zero, gaussian };

struct WkbSection {
  WkbConfig cfg;
  std::vector<double> b_list{4.0, 8.0, 16.0};
  InitialData a0;
  PhaseKind s_kind = PhaseKind::zero;
  double s_amplitude = 0.0;
  double s_width = 1.0;
  double delta_exponent = -0.5;     // perturbation delta_b = b^exponent
  double separation_threshold = 1.0;
  double horizon = 1.0;             // rescaled instability horizon
  double direct_dt_coeff = 1e-3;    // direct solver dt = coeff / b^2
  int refine_levels = 1;

  RealField build_phase(const Grid& grid) const;
};

struct RunConfig {
  Grid grid{1, 64, 16.0};
  PotentialSpec potential = PotentialSpec::make_zero(1);
  AuditBudget audit;
  double audit_t_end = 1.0;
  NonlinearitySpec nonlinearity = NonlinearitySpec::make_none();
  SolverConfig solver;
  InitialData initial;
  WkbSection wkb;
  std::string output_dir = "out";
  unsigned long seed = 0;
  bool write_snapshots = true;

  std::set<std::string> present_sections;
  std::map<std::string, std::map<std::string, std::string>> echo;

  bool has(const std::string& section) const {
    return present_sections.count(section) > 0;
  }
  void require(const std::string& section) const;
};

RunConfig parse_run_config(const std::filesystem::path& path);
RunConfig parse_run_config_text(const std::string& text);

} // namespace magnls

#endif
