#ifndef MAGNLS_NONLINEARITY_HPP
#define MAGNLS_NONLINEARITY_HPP

#include "magnls/field.hpp"
#include "magnls/gauge.hpp"
#include "magnls/potential.hpp"

#include <functional>

namespace magnls {

enum class NonlinearityKind { none, power, custom };

/// Nonlinearity f(z) = z g(|z|^2) with profile g, its Lipschitz/tail
/// splitting, tail clipping, and the associated energy densities.
///
/// Sign convention (recorded in every run's metadata): the simulated
/// equation is
///     i du/dt = H_A u - sign * b^gamma * f(u),
/// and the energy is E = (1/2)||(i grad - bA)u||^2 - sign * b^gamma * G(u).
/// With a power-law profile, sign=+1 is the focusing form and sign=-1 the
/// defocusing form.
struct NonlinearitySpec {
  NonlinearityKind kind = NonlinearityKind::power;
  double sigma = 1.0; // g(s) = s^sigma for the power kind
  int sign = +1;
  double gamma = 0.0;
  std::function<double(double)> custom_g;
  std::function<double(double)> custom_gprime;

  static NonlinearitySpec make_none();
  static NonlinearitySpec make_power(double sigma, int sign, double gamma);
  /// Custom profiles are accepted only if g' samples positive on [0, 100].
  static NonlinearitySpec make_custom(std::function<double(double)> g,
                                      std::function<double(double)> gprime,
                                      int sign, double gamma);

  double g(double s) const;
  double gprime(double s) const;
  double growth_exponent() const { return 2.0 * sigma; } // alpha

  /// Subcriticality and sign checks for the target dimension.
  void validate(int dim) const;
  /// Assumption needed by the WKB system: g' > 0 (sampled).
  void require_gprime_positive(double s_max = 100.0) const;

  double f_radial(double r) const; // f(r) = r g(r^2), r >= 0
  Complex f(Complex z) const;      // gauge structure f(z) = (z/|z|) f(|z|)

  Complex lipschitz_part(Complex z) const;            // linear beyond |z|=1
  Complex tail_part(Complex z) const;                 // f - lipschitz part
  Complex tail_clipped(Complex z, int m) const;       // linear beyond |z|=m
  Complex f_truncated(Complex z, int m) const;        // lipschitz + clipped

  /// Phase-rotation multipliers of the isolated nonlinear flows; both the
  /// full and the truncated nonlinearity keep |u| pointwise invariant
  /// because the gauge structure survives the splitting.
  double rotation_rate(double r) const;                  // g(r^2)
  double rotation_rate_truncated(double r, int m) const; // g(min(r,m)^2)

  double density(Complex z) const;                  // F = int_0^|z| f
  double density_truncated(Complex z, int m) const; // F_m, closed form
};

/// G(u) = integral of F(u(x)) over the box (grid quadrature).
double nonlinear_energy(const NonlinearitySpec& nl, const ComplexField& u);
double nonlinear_energy_truncated(const NonlinearitySpec& nl,
                                  const ComplexField& u, int m);

struct EnergyBreakdown {
  double kinetic = 0.0;   // (1/2) <H u, u>
  double nonlinear = 0.0; // b^gamma G (or G_m)
  double total = 0.0;     // kinetic - sign * nonlinear
};

EnergyBreakdown total_energy(const NonlinearitySpec& nl, double b,
                             const ComplexField& u, const LinkSet& links);
EnergyBreakdown total_energy_truncated(const NonlinearitySpec& nl, double b,
                                       const ComplexField& u,
                                       const LinkSet& links, int m);

/// Spec-level convenience: energy at time t with midpoint links built from
/// the potential.
EnergyBreakdown total_energy(const NonlinearitySpec& nl, double b, double t,
                             const ComplexField& u, const PotentialSpec& pot);

} // namespace magnls

#endif
