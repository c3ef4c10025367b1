#ifndef MAGNLS_POTENTIAL_HPP
#define MAGNLS_POTENTIAL_HPP

#include "magnls/field.hpp"

#include <array>
#include <memory>
#include <string>

namespace magnls {

enum class PotentialKind { zero, constant_field, linear_plus_bump, tabulated };
enum class TimeModulation { none, sinusoidal };

/// Analytic description of the magnetic potential A(t,x); evaluations of
/// A, dtA, the field B and the increment W are exact (no differentiation
/// noise). Time dependence is a multiplicative modulation of a static base:
/// A(t,x) = mod(t) * A_base(x) with mod(t) = 1 + a sin(omega t).
struct PotentialSpec {
  int dim = 2;
  PotentialKind kind = PotentialKind::zero;
  double b0 = 0.0;
  double bump_amplitude = 0.0;
  double bump_width = 1.0;
  std::array<double, 2> bump_center{0.0, 0.0};
  TimeModulation modulation = TimeModulation::none;
  double mod_amplitude = 0.0;
  double mod_frequency = 1.0;
  double epsilon_decay = 1.0;
  std::shared_ptr<const RealVectorField> table; // tabulated base samples

  static PotentialSpec make_zero(int dim);
  /// Constant field B0 in the symmetric gauge A = (-B0 y/2, B0 x/2); 2D only.
  static PotentialSpec make_constant_field(double b0);
  /// Symmetric-gauge linear part plus a localized axisymmetric field bump
  /// of amplitude `amp` and width `width` centered at (cx, cy); 2D only.
  static PotentialSpec make_linear_plus_bump(double b0, double amp,
                                             double width, double cx,
                                             double cy);
  static PotentialSpec make_tabulated(RealVectorField base);

  PotentialSpec with_sinusoidal_modulation(double amplitude,
                                           double frequency) const;

  /// 1D admits only zero or tabulated kinds (no magnetic field in 1D).
  void validate(int grid_dim) const;

  bool is_static() const {
    return modulation == TimeModulation::none || kind == PotentialKind::zero;
  }
  bool is_zero() const { return kind == PotentialKind::zero; }

  double modulation_factor(double t) const;
  double modulation_rate(double t) const;                    // d/dt factor
  double modulation_increment(double t0, double t1) const;   // exact integral

  /// Base potential at an arbitrary point (analytic kinds only).
  std::array<double, 2> base_at(double x, double y) const;
  /// Base field B12 at an arbitrary point (closed form; analytic kinds).
  double base_field_at(double x, double y) const;

  std::string kind_name() const;
};

RealVectorField eval_A(const PotentialSpec& spec, double t, const Grid& grid);
RealVectorField eval_dtA(const PotentialSpec& spec, double t,
                         const Grid& grid);
/// Scalar B12(t,x); identically zero in 1D.
RealField eval_B(const PotentialSpec& spec, double t, const Grid& grid);
/// W(t,t2,x) = integral of dtA over [t, t2]; exact.
RealVectorField potential_increment(const PotentialSpec& spec, double t,
                                    double t2, const Grid& grid);

struct AuditBudget {
  double c_dt = 100.0;
  double c_dx = 100.0;
  double c_b = 100.0;
};

/// Sampled suprema for the potential-regularity assumptions. Advisory:
/// samples the grid nodes and a uniform time mesh, certifies nothing
/// beyond the sampled window.
struct AssumptionAudit {
  double sup_dtA = 0.0; // m_A, the sup of |dtA| itself
  double sup_dxA_order1 = 0.0;
  double sup_dxA_order2 = 0.0;
  double sup_weighted_dxB = 0.0; // max of <x>^{1+eps} |d^a B|, |a| >= 1
  bool pass_clause1 = true;      // |d^a dtA| bounded
  bool pass_clause2 = true;      // |d^a A| bounded, |a| >= 1
  bool pass_clause3 = true;      // weighted field derivatives bounded
  bool pass() const { return pass_clause1 && pass_clause2 && pass_clause3; }
};

AssumptionAudit audit_assumption1(const PotentialSpec& spec, const Grid& grid,
                                  double t0, double t1, int order = 2,
                                  const AuditBudget& budget = {});

} // namespace magnls

#endif
