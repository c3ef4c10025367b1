#include "magnls/potential.hpp"

#include "magnls/spectral.hpp"

#include <cmath>

namespace magnls {

PotentialSpec PotentialSpec::make_zero(int dim) {
  PotentialSpec s;
  s.dim = dim;
  s.kind = PotentialKind::zero;
  return s;
}

PotentialSpec PotentialSpec::make_constant_field(double b0) {
  PotentialSpec s;
  s.dim = 2;
  s.kind = PotentialKind::constant_field;
  s.b0 = b0;
  return s;
}

PotentialSpec PotentialSpec::make_linear_plus_bump(double b0, double amp,
                                                   double width, double cx,
                                                   double cy) {
  if (!(width > 0.0))
    throw InvalidParameter("bump width must be positive");
  PotentialSpec s;
  s.dim = 2;
  s.kind = PotentialKind::linear_plus_bump;
  s.b0 = b0;
  s.bump_amplitude = amp;
  s.bump_width = width;
  s.bump_center = {cx, cy};
  return s;
}

PotentialSpec PotentialSpec::make_tabulated(RealVectorField base) {
  PotentialSpec s;
  s.dim = base.grid().dim();
  s.kind = PotentialKind::tabulated;
  s.table = std::make_shared<const RealVectorField>(std::move(base));
  return s;
}

PotentialSpec
PotentialSpec::with_sinusoidal_modulation(double amplitude,
                                          double frequency) const {
  PotentialSpec s = *this;
  s.modulation = TimeModulation::sinusoidal;
  s.mod_amplitude = amplitude;
  s.mod_frequency = frequency;
  return s;
}

void PotentialSpec::validate(int grid_dim) const {
  if (dim != grid_dim)
    throw DimensionError("potential dim does not match grid dim");
  if (grid_dim == 1 && kind != PotentialKind::zero &&
      kind != PotentialKind::tabulated)
    throw InvalidParameter(
        "1D potentials must be zero or tabulated (no magnetic field in 1D)");
  if (!(epsilon_decay > 0.0))
    throw InvalidParameter("epsilon_decay must be positive");
}

double PotentialSpec::modulation_factor(double t) const {
  if (modulation == TimeModulation::none)
    return 1.0;
  return 1.0 + mod_amplitude * std::sin(mod_frequency * t);
}

double PotentialSpec::modulation_rate(double t) const {
  if (modulation == TimeModulation::none)
    return 0.0;
  return mod_amplitude * mod_frequency * std::cos(mod_frequency * t);
}

double PotentialSpec::modulation_increment(double t0, double t1) const {
  if (modulation == TimeModulation::none)
    return 0.0;
  return mod_amplitude *
         (std::sin(mod_frequency * t1) - std::sin(mod_frequency * t0));
}

std::array<double, 2> PotentialSpec::base_at(double x, double y) const {
  switch (kind) {
  case PotentialKind::zero:
    return {0.0, 0.0};
  case PotentialKind::constant_field:
    return {-0.5 * b0 * y, 0.5 * b0 * x};
  case PotentialKind::linear_plus_bump: {
    const double dx = x - bump_center[0];
    const double dy = y - bump_center[1];
    const double w2 = bump_width * bump_width;
    const double env = 0.5 * bump_amplitude *
                       std::exp(-(dx * dx + dy * dy) / w2);
    return {-0.5 * b0 * y - env * dy, 0.5 * b0 * x + env * dx};
  }
  case PotentialKind::tabulated:
    throw InvalidParameter("tabulated potential has no off-grid evaluation");
  }
  return {0.0, 0.0};
}

double PotentialSpec::base_field_at(double x, double y) const {
  switch (kind) {
  case PotentialKind::zero:
    return 0.0;
  case PotentialKind::constant_field:
    return b0;
  case PotentialKind::linear_plus_bump: {
    const double dx = x - bump_center[0];
    const double dy = y - bump_center[1];
    const double w2 = bump_width * bump_width;
    const double r2 = dx * dx + dy * dy;
    return b0 + bump_amplitude * std::exp(-r2 / w2) * (1.0 - r2 / w2);
  }
  case PotentialKind::tabulated:
    throw InvalidParameter("tabulated potential has no closed-form field");
  }
  return 0.0;
}

std::string PotentialSpec::kind_name() const {
  switch (kind) {
  case PotentialKind::zero:
    return "zero";
  case PotentialKind::constant_field:
    return "constant_field";
  case PotentialKind::linear_plus_bump:
    return "linear_plus_bump";
  case PotentialKind::tabulated:
    return "tabulated";
  }
  return "?";
}

namespace {

RealVectorField sample_base(const PotentialSpec& spec, const Grid& grid) {
  if (spec.kind == PotentialKind::tabulated) {
    if (spec.table->grid() != grid)
      throw DimensionError("tabulated potential grid mismatch");
    return *spec.table;
  }
  RealVectorField A(grid);
  const int n = grid.n();
  if (grid.dim() == 1) {
    // zero kind only (validate() rejects other 1D analytic kinds)
    return A;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      auto v = spec.base_at(grid.coord(i), grid.coord(j));
      A.value(0, grid.index(i, j)) = v[0];
      A.value(1, grid.index(i, j)) = v[1];
    }
  return A;
}

RealVectorField scaled_base(const PotentialSpec& spec, const Grid& grid,
                            double factor) {
  spec.validate(grid.dim());
  RealVectorField A = sample_base(spec, grid);
  for (int a = 0; a < grid.dim(); ++a)
    for (double& v : A.component(a))
      v *= factor;
  return A;
}

} // namespace

RealVectorField eval_A(const PotentialSpec& spec, double t, const Grid& grid) {
  return scaled_base(spec, grid, spec.modulation_factor(t));
}

RealVectorField eval_dtA(const PotentialSpec& spec, double t,
                         const Grid& grid) {
  return scaled_base(spec, grid, spec.modulation_rate(t));
}

RealVectorField potential_increment(const PotentialSpec& spec, double t,
                                    double t2, const Grid& grid) {
  return scaled_base(spec, grid, spec.modulation_increment(t, t2));
}

RealField eval_B(const PotentialSpec& spec, double t, const Grid& grid) {
  spec.validate(grid.dim());
  RealField B(grid);
  if (grid.dim() == 1)
    return B;
  const double factor = spec.modulation_factor(t);
  if (spec.kind == PotentialKind::tabulated) {
    // No closed form for tables: spectral curl of the base samples.
    SpectralWorkspace ws(grid);
    ComplexField a0(grid), a1(grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      a0[k] = Complex{spec.table->value(0, k), 0.0};
      a1[k] = Complex{spec.table->value(1, k), 0.0};
    }
    ComplexField d0a1 = ws.derivative(a1, 0, 1);
    ComplexField d1a0 = ws.derivative(a0, 1, 1);
    for (std::size_t k = 0; k < grid.size(); ++k)
      B[k] = factor * (d0a1[k].real() - d1a0[k].real());
    return B;
  }
  const int n = grid.n();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      B[grid.index(i, j)] =
          factor * spec.base_field_at(grid.coord(i), grid.coord(j));
  return B;
}

namespace {

// Sampled spatial-derivative fields of the base potential and base field.
// Analytic kinds use small-step central differences of the closed forms;
// tabulated kinds use spectral derivatives of the table.
struct BaseDerivatives {
  // A-component derivatives indexed [component][multi-index]
  // multi-indices: {} handled separately; order1: d0, d1; order2: d00, d11, d01
  std::vector<std::vector<double>> dA1; // |alpha| = 1
  std::vector<std::vector<double>> dA2; // |alpha| = 2
  std::vector<std::vector<double>> dB1;
  std::vector<std::vector<double>> dB2;
};

BaseDerivatives base_derivatives(const PotentialSpec& spec, const Grid& grid,
                                 int order) {
  BaseDerivatives out;
  const std::size_t N = grid.size();
  const int dim = grid.dim();

  auto tov = [](const RealField& f) {
    return std::vector<double>(f.values().begin(), f.values().end());
  };

  if (spec.kind == PotentialKind::zero || dim == 1) {
    if (spec.kind == PotentialKind::tabulated && dim == 1) {
      SpectralWorkspace ws(grid);
      RealField a(grid);
      for (std::size_t k = 0; k < N; ++k)
        a[k] = spec.table->value(0, k);
      out.dA1.push_back(tov(ws.derivative(a, 0, 1)));
      if (order >= 2)
        out.dA2.push_back(tov(ws.derivative(a, 0, 2)));
    }
    return out;
  }

  if (spec.kind == PotentialKind::tabulated) {
    SpectralWorkspace ws(grid);
    RealField a0(grid), a1(grid);
    for (std::size_t k = 0; k < N; ++k) {
      a0[k] = spec.table->value(0, k);
      a1[k] = spec.table->value(1, k);
    }
    RealField d0a0 = ws.derivative(a0, 0, 1), d1a0 = ws.derivative(a0, 1, 1);
    RealField d0a1 = ws.derivative(a1, 0, 1), d1a1 = ws.derivative(a1, 1, 1);
    out.dA1 = {tov(d0a0), tov(d1a0), tov(d0a1), tov(d1a1)};
    RealField B(grid);
    for (std::size_t k = 0; k < N; ++k)
      B[k] = d0a1[k] - d1a0[k];
    out.dB1 = {tov(ws.derivative(B, 0, 1)), tov(ws.derivative(B, 1, 1))};
    if (order >= 2) {
      out.dA2 = {tov(ws.derivative(a0, 0, 2)), tov(ws.derivative(a0, 1, 2)),
                 tov(ws.derivative(a1, 0, 2)), tov(ws.derivative(a1, 1, 2)),
                 tov(ws.derivative(ws.derivative(a0, 0, 1), 1, 1)),
                 tov(ws.derivative(ws.derivative(a1, 0, 1), 1, 1))};
      out.dB2 = {tov(ws.derivative(B, 0, 2)), tov(ws.derivative(B, 1, 2)),
                 tov(ws.derivative(ws.derivative(B, 0, 1), 1, 1))};
    }
    return out;
  }

  // Analytic kinds: finite differences of the closed forms, evaluated
  // off-grid. Steps chosen for an advisory audit, not certified bounds.
  const double d1 = 1e-4, d2 = 1e-3;
  auto Ac = [&](int c, double x, double y) { return spec.base_at(x, y)[c]; };
  auto Bc = [&](double x, double y) { return spec.base_field_at(x, y); };

  auto fd1 = [&](auto&& f, int axis) {
    std::vector<double> v(N);
    for (int i = 0; i < grid.n(); ++i)
      for (int j = 0; j < grid.n(); ++j) {
        double x = grid.coord(i), y = grid.coord(j);
        double xp = x + (axis == 0 ? d1 : 0), xm = x - (axis == 0 ? d1 : 0);
        double yp = y + (axis == 1 ? d1 : 0), ym = y - (axis == 1 ? d1 : 0);
        v[grid.index(i, j)] = (f(xp, yp) - f(xm, ym)) / (2 * d1);
      }
    return v;
  };
  auto fd2 = [&](auto&& f, int a0, int a1) {
    std::vector<double> v(N);
    for (int i = 0; i < grid.n(); ++i)
      for (int j = 0; j < grid.n(); ++j) {
        double x = grid.coord(i), y = grid.coord(j);
        if (a0 == a1) {
          double ex = a0 == 0 ? d2 : 0, ey = a0 == 1 ? d2 : 0;
          v[grid.index(i, j)] = (f(x + ex, y + ey) - 2 * f(x, y) +
                                 f(x - ex, y - ey)) /
                                (d2 * d2);
        } else {
          v[grid.index(i, j)] =
              (f(x + d2, y + d2) - f(x + d2, y - d2) - f(x - d2, y + d2) +
               f(x - d2, y - d2)) /
              (4 * d2 * d2);
        }
      }
    return v;
  };

  auto A0 = [&](double x, double y) { return Ac(0, x, y); };
  auto A1 = [&](double x, double y) { return Ac(1, x, y); };
  out.dA1 = {fd1(A0, 0), fd1(A0, 1), fd1(A1, 0), fd1(A1, 1)};
  out.dB1 = {fd1(Bc, 0), fd1(Bc, 1)};
  if (order >= 2) {
    out.dA2 = {fd2(A0, 0, 0), fd2(A0, 1, 1), fd2(A1, 0, 0),
               fd2(A1, 1, 1), fd2(A0, 0, 1), fd2(A1, 0, 1)};
    out.dB2 = {fd2(Bc, 0, 0), fd2(Bc, 1, 1), fd2(Bc, 0, 1)};
  }
  return out;
}

double max_abs(const std::vector<std::vector<double>>& fields) {
  double m = 0.0;
  for (const auto& f : fields)
    for (double v : f)
      m = std::max(m, std::abs(v));
  return m;
}

} // namespace

AssumptionAudit audit_assumption1(const PotentialSpec& spec, const Grid& grid,
                                  double t0, double t1, int order,
                                  const AuditBudget& budget) {
  spec.validate(grid.dim());
  if (order < 0 || order > 2)
    throw InvalidParameter("audit order must be 0, 1 or 2");

  AssumptionAudit audit;

  // Base-potential amplitude and derivative suprema (time-independent part).
  double supA0 = 0.0; // |A_base| itself, order 0, needed for clause 1
  {
    RealVectorField A = sample_base(spec, grid);
    for (int a = 0; a < grid.dim(); ++a)
      for (double v : A.component(a))
        supA0 = std::max(supA0, std::abs(v));
  }
  BaseDerivatives der = base_derivatives(spec, grid, order);
  const double supA1 = max_abs(der.dA1);
  const double supA2 = max_abs(der.dA2);

  // Weighted field-derivative supremum <x>^{1+eps} |d^a B_base|, |a| >= 1.
  double supWB = 0.0;
  if (grid.dim() == 2) {
    const double p = 1.0 + spec.epsilon_decay;
    auto weigh = [&](const std::vector<std::vector<double>>& fields) {
      for (const auto& f : fields)
        for (int i = 0; i < grid.n(); ++i)
          for (int j = 0; j < grid.n(); ++j) {
            double x = grid.coord(i), y = grid.coord(j);
            double w = std::pow(1.0 + x * x + y * y, 0.5 * p);
            supWB = std::max(supWB, w * std::abs(f[grid.index(i, j)]));
          }
    };
    weigh(der.dB1);
    weigh(der.dB2);
  }

  // Time factors sampled on a uniform mesh over the window.
  double max_rate = 0.0, max_factor = 0.0;
  const int nt = 17;
  for (int i = 0; i < nt; ++i) {
    double t = t0 + (t1 - t0) * i / (nt - 1);
    max_rate = std::max(max_rate, std::abs(spec.modulation_rate(t)));
    max_factor = std::max(max_factor, std::abs(spec.modulation_factor(t)));
  }

  audit.sup_dtA = max_rate * supA0;
  audit.sup_dxA_order1 = max_factor * supA1;
  audit.sup_dxA_order2 = max_factor * supA2;
  audit.sup_weighted_dxB = max_factor * supWB;

  const double sup_dt_all =
      max_rate * std::max({supA0, supA1, supA2}); // |d^a dtA|, |a| <= order
  audit.pass_clause1 = sup_dt_all <= budget.c_dt;
  audit.pass_clause2 =
      std::max(audit.sup_dxA_order1, audit.sup_dxA_order2) <= budget.c_dx;
  audit.pass_clause3 = audit.sup_weighted_dxB <= budget.c_b;
  return audit;
}

} // namespace magnls
