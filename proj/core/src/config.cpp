#include "magnls/config.hpp"

#include "magnls/snapshot.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace magnls {

namespace {

std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  auto a = s.find_first_not_of(ws);
  if (a == std::string::npos)
    return "";
  auto b = s.find_last_not_of(ws);
  return s.substr(a, b - a + 1);
}

} // namespace

IniFile IniFile::parse_text(const std::string& text) {
  IniFile ini;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty())
      continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("?", "?", "malformed section header at line " +
                                        std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError("?", "?", "empty section name at line " +
                                        std::to_string(lineno));
      ini.sections_[section]; // register even if empty
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(section.empty() ? "?" : section, line,
                        "expected key = value at line " +
                            std::to_string(lineno));
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      throw ConfigError("?", key, "key outside of any section");
    if (key.empty())
      throw ConfigError(section, key, "empty key");
    if (ini.sections_[section].count(key))
      throw ConfigError(section, key, "duplicate key");
    ini.sections_[section][key] = value;
  }
  return ini;
}

IniFile IniFile::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("?", "?", "cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

bool IniFile::has_section(const std::string& section) const {
  return sections_.count(section) > 0;
}

bool IniFile::has_key(const std::string& section,
                      const std::string& key) const {
  auto it = sections_.find(section);
  return it != sections_.end() && it->second.count(key) > 0;
}

std::string IniFile::get_string(const std::string& section,
                                const std::string& key,
                                const std::string& fallback) {
  if (!has_key(section, key))
    return fallback;
  consumed_.insert({section, key});
  return sections_.at(section).at(key);
}

std::string IniFile::require_string(const std::string& section,
                                    const std::string& key) {
  if (!has_key(section, key))
    throw ConfigError(section, key, "required key missing");
  consumed_.insert({section, key});
  return sections_.at(section).at(key);
}

double IniFile::get_double(const std::string& section, const std::string& key,
                           double fallback) {
  if (!has_key(section, key))
    return fallback;
  std::string v = get_string(section, key, "");
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size())
      throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError(section, key, "not a number: '" + v + "'");
  }
}

long IniFile::get_int(const std::string& section, const std::string& key,
                      long fallback) {
  if (!has_key(section, key))
    return fallback;
  std::string v = get_string(section, key, "");
  try {
    std::size_t pos = 0;
    long x = std::stol(v, &pos);
    if (pos != v.size())
      throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError(section, key, "not an integer: '" + v + "'");
  }
}

bool IniFile::get_bool(const std::string& section, const std::string& key,
                       bool fallback) {
  if (!has_key(section, key))
    return fallback;
  std::string v = get_string(section, key, "");
  if (v == "true" || v == "1" || v == "yes" || v == "on")
    return true;
  if (v == "false" || v == "0" || v == "no" || v == "off")
    return false;
  throw ConfigError(section, key, "not a boolean: '" + v + "'");
}

std::vector<double>
IniFile::get_double_list(const std::string& section, const std::string& key,
                         const std::vector<double>& fallback) {
  if (!has_key(section, key))
    return fallback;
  std::string v = get_string(section, key, "");
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty())
      continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError(section, key, "bad list entry: '" + item + "'");
    }
  }
  if (out.empty())
    throw ConfigError(section, key, "empty list");
  return out;
}

void IniFile::ensure_consumed(
    const std::set<std::string>& known_sections) const {
  for (const auto& [section, keys] : sections_) {
    if (!known_sections.count(section))
      throw ConfigError(section, "?", "unknown section");
    for (const auto& [key, value] : keys)
      if (!consumed_.count({section, key}))
        throw ConfigError(section, key, "unknown key");
  }
}

ComplexField InitialData::build(const Grid& grid) const {
  switch (kind) {
  case Kind::gaussian: {
    const double w2 = 2.0 * width * width;
    return ComplexField::sample(grid, [&](double x, double y) {
      double dx = x - center[0];
      double dy = grid.dim() == 2 ? y - center[1] : 0.0;
      double env = amplitude * std::exp(-(dx * dx + dy * dy) / w2);
      double phase = kick[0] * x + (grid.dim() == 2 ? kick[1] * y : 0.0);
      return std::polar(env, phase);
    });
  }
  case Kind::plane_wave: {
    const double kx = 2.0 * std::numbers::pi * mode[0] / grid.length();
    const double ky = 2.0 * std::numbers::pi * mode[1] / grid.length();
    return ComplexField::sample(grid, [&](double x, double y) {
      double phase = kx * x + (grid.dim() == 2 ? ky * y : 0.0);
      return std::polar(amplitude, phase);
    });
  }
  case Kind::constant:
    return ComplexField::sample(
        grid, [&](double, double) { return Complex{amplitude, 0.0}; });
  case Kind::file: {
    auto [field, header] = read_snapshot(file);
    if (field.grid() != grid)
      throw DimensionError("initial-data snapshot grid does not match [grid]");
    return field;
  }
  }
  throw InvalidParameter("unknown initial data kind");
}

RealField WkbSection::build_phase(const Grid& grid) const {
  switch (s_kind) {
  case PhaseKind::zero:
    return RealField(grid);
  case PhaseKind::gaussian: {
    const double w2 = 2.0 * s_width * s_width;
    return RealField::sample(grid, [&](double x, double y) {
      double r2 = x * x + (grid.dim() == 2 ? y * y : 0.0);
      return s_amplitude * std::exp(-r2 / w2);
    });
  }
  }
  return RealField(grid);
}

void RunConfig::require(const std::string& section) const {
  if (!has(section))
    throw ConfigError(section, "?", "required section missing");
}

namespace {

PotentialSpec parse_potential(IniFile& ini, const Grid& grid) {
  const std::string sec = "potential";
  if (!ini.has_section(sec))
    return PotentialSpec::make_zero(grid.dim());

  std::string kind = ini.get_string(sec, "kind", "zero");
  PotentialSpec spec = PotentialSpec::make_zero(grid.dim());
  if (kind == "zero") {
    // defaults
  } else if (kind == "constant_field") {
    spec = PotentialSpec::make_constant_field(
        ini.get_double(sec, "b0", 1.0));
  } else if (kind == "linear_plus_bump") {
    spec = PotentialSpec::make_linear_plus_bump(
        ini.get_double(sec, "b0", 1.0),
        ini.get_double(sec, "bump_amplitude", 0.5),
        ini.get_double(sec, "bump_width", 1.0),
        ini.get_double(sec, "bump_center_x", 0.0),
        ini.get_double(sec, "bump_center_y", 0.0));
  } else if (kind == "tabulated") {
    std::string file = ini.require_string(sec, "file");
    std::ifstream in(file);
    if (!in)
      throw ConfigError(sec, "file", "cannot open " + file);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      throw ConfigError(sec, "file", std::string("bad JSON: ") + e.what());
    }
    int dim = j.at("dim").get<int>();
    int n = j.at("n").get<int>();
    double length = j.at("length").get<double>();
    Grid tgrid(dim, n, length);
    if (tgrid != grid)
      throw ConfigError(sec, "file", "table grid does not match [grid]");
    RealVectorField table(tgrid);
    auto comps = j.at("components");
    if (static_cast<int>(comps.size()) != dim)
      throw ConfigError(sec, "file", "component count mismatch");
    for (int a = 0; a < dim; ++a) {
      auto arr = comps[a].get<std::vector<double>>();
      if (arr.size() != tgrid.size())
        throw ConfigError(sec, "file", "component length mismatch");
      std::copy(arr.begin(), arr.end(), table.component(a).begin());
    }
    spec = PotentialSpec::make_tabulated(std::move(table));
  } else {
    throw ConfigError(sec, "kind", "unknown potential kind '" + kind + "'");
  }

  std::string mod = ini.get_string(sec, "modulation", "none");
  if (mod == "sinusoidal") {
    spec = spec.with_sinusoidal_modulation(
        ini.get_double(sec, "mod_amplitude", 1.0),
        ini.get_double(sec, "mod_frequency", 1.0));
  } else if (mod != "none") {
    throw ConfigError(sec, "modulation", "unknown modulation '" + mod + "'");
  }
  spec.epsilon_decay = ini.get_double(sec, "epsilon_decay", 1.0);
  try {
    spec.validate(grid.dim());
  } catch (const Error& e) {
    throw ConfigError(sec, "kind", e.what());
  }
  return spec;
}

NonlinearitySpec parse_nonlinearity(IniFile& ini) {
  const std::string sec = "nonlinearity";
  if (!ini.has_section(sec))
    return NonlinearitySpec::make_none();
  std::string g = ini.get_string(sec, "g", "power");
  long sign = ini.get_int(sec, "sign", 1);
  double gamma = ini.get_double(sec, "gamma", 0.0);
  if (sign != 1 && sign != -1)
    throw ConfigError(sec, "sign", "must be +1 or -1");
  if (g == "none")
    return NonlinearitySpec::make_none();
  if (g == "power") {
    double sigma = ini.get_double(sec, "sigma", 1.0);
    try {
      return NonlinearitySpec::make_power(sigma, static_cast<int>(sign),
                                          gamma);
    } catch (const Error& e) {
      throw ConfigError(sec, "sigma", e.what());
    }
  }
  throw ConfigError(sec, "g", "unknown profile '" + g + "'");
}

InitialData parse_initial(IniFile& ini, const std::string& sec,
                          const std::string& prefix) {
  InitialData init;
  std::string kind = ini.get_string(sec, prefix + "initial", "gaussian");
  if (kind == "gaussian")
    init.kind = InitialData::Kind::gaussian;
  else if (kind == "plane_wave")
    init.kind = InitialData::Kind::plane_wave;
  else if (kind == "constant")
    init.kind = InitialData::Kind::constant;
  else if (kind == "file")
    init.kind = InitialData::Kind::file;
  else
    throw ConfigError(sec, prefix + "initial",
                      "unknown initial data kind '" + kind + "'");
  init.amplitude = ini.get_double(sec, prefix + "amplitude", 1.0);
  init.width = ini.get_double(sec, prefix + "width", 1.0);
  init.center[0] = ini.get_double(sec, prefix + "center_x", 0.0);
  init.center[1] = ini.get_double(sec, prefix + "center_y", 0.0);
  init.kick[0] = ini.get_double(sec, prefix + "kick_x", 0.0);
  init.kick[1] = ini.get_double(sec, prefix + "kick_y", 0.0);
  init.mode[0] = static_cast<int>(ini.get_int(sec, prefix + "mode_x", 1));
  init.mode[1] = static_cast<int>(ini.get_int(sec, prefix + "mode_y", 0));
  init.file = ini.get_string(sec, prefix + "file", "");
  if (init.kind == InitialData::Kind::file && init.file.empty())
    throw ConfigError(sec, prefix + "file", "required for file initial data");
  if (init.kind == InitialData::Kind::gaussian && !(init.width > 0.0))
    throw ConfigError(sec, prefix + "width", "must be positive");
  return init;
}

RunConfig parse_config(IniFile ini) {
  RunConfig cfg;

  if (!ini.has_section("grid"))
    throw ConfigError("grid", "?", "required section missing");
  {
    long dim = ini.get_int("grid", "dim", 1);
    long n = ini.get_int("grid", "n", 64);
    double length = ini.get_double("grid", "length", 16.0);
    try {
      cfg.grid = Grid(static_cast<int>(dim), static_cast<int>(n), length);
    } catch (const Error& e) {
      throw ConfigError("grid", "n", e.what());
    }
  }

  cfg.potential = parse_potential(ini, cfg.grid);
  cfg.audit.c_dt = ini.get_double("potential", "audit_c_dt", 100.0);
  cfg.audit.c_dx = ini.get_double("potential", "audit_c_dx", 100.0);
  cfg.audit.c_b = ini.get_double("potential", "audit_c_b", 100.0);
  cfg.audit_t_end = ini.get_double("potential", "audit_t_end", 1.0);

  cfg.nonlinearity = parse_nonlinearity(ini);

  if (ini.has_section("solver")) {
    const std::string sec = "solver";
    cfg.solver.b = ini.get_double(sec, "b", 1.0);
    cfg.solver.dt = ini.get_double(sec, "dt", 1e-3);
    cfg.solver.t_end = ini.get_double(sec, "t_end", 1.0);
    std::string scheme = ini.get_string(sec, "scheme", "strang");
    if (scheme != "strang")
      throw ConfigError(sec, "scheme", "only 'strang' is available");
    cfg.solver.cn_tolerance = ini.get_double(sec, "cn_tolerance", 1e-10);
    cfg.solver.cn_max_iterations =
        static_cast<int>(ini.get_int(sec, "cn_max_iterations", 500));
    std::string ladder = ini.get_string(sec, "ladder", "none");
    if (ladder == "none")
      cfg.solver.ladder = LadderMode::none;
    else if (ladder == "truncated")
      cfg.solver.ladder = LadderMode::truncated;
    else if (ladder == "piecewise_A")
      cfg.solver.ladder = LadderMode::piecewise_A;
    else
      throw ConfigError(sec, "ladder", "unknown ladder '" + ladder + "'");
    cfg.solver.ladder_m = static_cast<int>(ini.get_int(sec, "ladder_m", 1));
    cfg.solver.ladder_n = static_cast<int>(ini.get_int(sec, "ladder_n", 1));
    cfg.solver.snapshot_stride =
        static_cast<int>(ini.get_int(sec, "snapshot_stride", 1));
    cfg.solver.blowup_ceiling = ini.get_double(sec, "blowup_ceiling", 1e3);
    std::string leak = ini.get_string(sec, "leakage_check", "auto");
    if (leak == "auto")
      cfg.solver.leakage_check = LeakageCheck::automatic;
    else if (leak == "on")
      cfg.solver.leakage_check = LeakageCheck::on;
    else if (leak == "off")
      cfg.solver.leakage_check = LeakageCheck::off;
    else
      throw ConfigError(sec, "leakage_check", "expected auto|on|off");
    try {
      cfg.solver.validate();
    } catch (const Error& e) {
      throw ConfigError(sec, "dt", e.what());
    }
    cfg.initial = parse_initial(ini, sec, "");
  }

  if (ini.has_section("wkb")) {
    const std::string sec = "wkb";
    cfg.wkb.cfg.b = ini.get_double(sec, "b", 4.0);
    cfg.wkb.cfg.t_end = ini.get_double(sec, "t_end", 0.5);
    cfg.wkb.cfg.cfl_safety = ini.get_double(sec, "cfl_safety", 0.5);
    cfg.wkb.cfg.dt_override = ini.get_double(sec, "dt", 0.0);
    cfg.wkb.cfg.snapshot_stride =
        static_cast<int>(ini.get_int(sec, "snapshot_stride", 16));
    cfg.wkb.cfg.shock_ceiling = ini.get_double(sec, "shock_ceiling", 1e3);
    std::string dealias = ini.get_string(sec, "dealiasing", "two_thirds");
    if (dealias != "two_thirds")
      throw ConfigError(sec, "dealiasing", "only 'two_thirds' is available");
    cfg.wkb.b_list =
        ini.get_double_list(sec, "b_list", std::vector<double>{4, 8, 16});
    cfg.wkb.a0 = parse_initial(ini, sec, "a0_");
    std::string s_kind = ini.get_string(sec, "s_kind", "zero");
    if (s_kind == "zero")
      cfg.wkb.s_kind = PhaseKind::zero;
    else if (s_kind == "gaussian")
      cfg.wkb.s_kind = PhaseKind::gaussian;
    else
      throw ConfigError(sec, "s_kind", "expected zero|gaussian");
    cfg.wkb.s_amplitude = ini.get_double(sec, "s_amplitude", 0.0);
    cfg.wkb.s_width = ini.get_double(sec, "s_width", 1.0);
    cfg.wkb.delta_exponent = ini.get_double(sec, "delta_exponent", -0.5);
    cfg.wkb.separation_threshold =
        ini.get_double(sec, "separation_threshold", 1.0);
    cfg.wkb.horizon = ini.get_double(sec, "horizon", 1.0);
    cfg.wkb.direct_dt_coeff = ini.get_double(sec, "direct_dt_coeff", 1e-3);
    cfg.wkb.refine_levels =
        static_cast<int>(ini.get_int(sec, "refine_levels", 1));
    try {
      cfg.wkb.cfg.validate();
    } catch (const Error& e) {
      throw ConfigError(sec, "t_end", e.what());
    }
  }

  if (ini.has_section("output")) {
    cfg.output_dir = ini.get_string("output", "dir", "out");
    cfg.seed = static_cast<unsigned long>(ini.get_int("output", "seed", 0));
    cfg.write_snapshots = ini.get_bool("output", "snapshots", true);
  }

  for (const auto& [name, keys] : ini.sections())
    cfg.present_sections.insert(name);
  cfg.echo = ini.sections();

  ini.ensure_consumed(
      {"grid", "potential", "nonlinearity", "solver", "wkb", "output"});
  return cfg;
}

} // namespace

RunConfig parse_run_config(const std::filesystem::path& path) {
  return parse_config(IniFile::parse_file(path));
}

RunConfig parse_run_config_text(const std::string& text) {
  return parse_config(IniFile::parse_text(text));
}

} // namespace magnls
