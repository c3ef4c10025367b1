#include "magnls/nonlinearity.hpp"

#include <cmath>

namespace magnls {

NonlinearitySpec NonlinearitySpec::make_none() {
  NonlinearitySpec s;
  s.kind = NonlinearityKind::none;
  s.sigma = 0.0;
  return s;
}

NonlinearitySpec NonlinearitySpec::make_power(double sigma, int sign,
                                              double gamma) {
  if (!(sigma > 0.0))
    throw InvalidParameter("power nonlinearity requires sigma > 0");
  if (sign != 1 && sign != -1)
    throw InvalidParameter("sign must be +1 or -1");
  if (gamma < 0.0)
    throw InvalidParameter("gamma must be nonnegative");
  NonlinearitySpec s;
  s.kind = NonlinearityKind::power;
  s.sigma = sigma;
  s.sign = sign;
  s.gamma = gamma;
  return s;
}

NonlinearitySpec
NonlinearitySpec::make_custom(std::function<double(double)> g,
                              std::function<double(double)> gprime, int sign,
                              double gamma) {
  if (sign != 1 && sign != -1)
    throw InvalidParameter("sign must be +1 or -1");
  NonlinearitySpec s;
  s.kind = NonlinearityKind::custom;
  s.custom_g = std::move(g);
  s.custom_gprime = std::move(gprime);
  s.sign = sign;
  s.gamma = gamma;
  s.require_gprime_positive();
  return s;
}

double NonlinearitySpec::g(double s) const {
  switch (kind) {
  case NonlinearityKind::none:
    return 0.0;
  case NonlinearityKind::power:
    return std::pow(s, sigma);
  case NonlinearityKind::custom:
    return custom_g(s);
  }
  return 0.0;
}

double NonlinearitySpec::gprime(double s) const {
  switch (kind) {
  case NonlinearityKind::none:
    return 0.0;
  case NonlinearityKind::power:
    return sigma * std::pow(s, sigma - 1.0);
  case NonlinearityKind::custom:
    return custom_gprime(s);
  }
  return 0.0;
}

void NonlinearitySpec::validate(int dim) const {
  if (dim > 2 && growth_exponent() >= 4.0 / (dim - 2))
    throw InvalidParameter("nonlinearity growth is supercritical");
}

void NonlinearitySpec::require_gprime_positive(double s_max) const {
  if (kind == NonlinearityKind::none)
    throw InvalidParameter("WKB system requires g' > 0 (profile is zero)");
  const int samples = 256;
  for (int i = 1; i <= samples; ++i) {
    double s = s_max * i / samples;
    if (!(gprime(s) > 0.0))
      throw InvalidParameter("g' must sample positive on (0, " +
                             std::to_string(s_max) + "]");
  }
}

double NonlinearitySpec::f_radial(double r) const { return r * g(r * r); }

Complex NonlinearitySpec::f(Complex z) const {
  double r = std::abs(z);
  if (r == 0.0)
    return {0.0, 0.0};
  return z * g(r * r); // (z/|z|) f(|z|) with f(r) = r g(r^2)
}

Complex NonlinearitySpec::lipschitz_part(Complex z) const {
  double r = std::abs(z);
  if (r <= 1.0)
    return f(z);
  return g(1.0) * z; // f(1) z
}

Complex NonlinearitySpec::tail_part(Complex z) const {
  double r = std::abs(z);
  if (r <= 1.0)
    return {0.0, 0.0};
  return f(z) - g(1.0) * z;
}

Complex NonlinearitySpec::tail_clipped(Complex z, int m) const {
  if (m < 1)
    throw InvalidParameter("truncation level m must be >= 1");
  double r = std::abs(z);
  if (r <= m)
    return tail_part(z);
  double md = static_cast<double>(m);
  double tail_at_m = f_radial(md) - g(1.0) * md;
  return tail_at_m * z / md;
}

Complex NonlinearitySpec::f_truncated(Complex z, int m) const {
  return lipschitz_part(z) + tail_clipped(z, m);
}

double NonlinearitySpec::rotation_rate(double r) const { return g(r * r); }

double NonlinearitySpec::rotation_rate_truncated(double r, int m) const {
  if (m < 1)
    throw InvalidParameter("truncation level m must be >= 1");
  double rc = std::min(r, static_cast<double>(m));
  return g(rc * rc);
}

namespace {

// Simpson quadrature of f(s) = s g(s^2) on [0, r] for custom profiles.
double radial_integral(const NonlinearitySpec& nl, double r) {
  if (r == 0.0)
    return 0.0;
  const int panels = 512;
  const double h = r / panels;
  double s = nl.f_radial(0.0) + nl.f_radial(r);
  for (int i = 1; i < panels; ++i)
    s += (i % 2 ? 4.0 : 2.0) * nl.f_radial(i * h);
  return s * h / 3.0;
}

double density_radial(const NonlinearitySpec& nl, double r) {
  switch (nl.kind) {
  case NonlinearityKind::none:
    return 0.0;
  case NonlinearityKind::power:
    return std::pow(r, 2.0 * nl.sigma + 2.0) / (2.0 * nl.sigma + 2.0);
  case NonlinearityKind::custom:
    return radial_integral(nl, r);
  }
  return 0.0;
}

} // namespace

double NonlinearitySpec::density(Complex z) const {
  return density_radial(*this, std::abs(z));
}

double NonlinearitySpec::density_truncated(Complex z, int m) const {
  if (m < 1)
    throw InvalidParameter("truncation level m must be >= 1");
  double r = std::abs(z);
  double md = static_cast<double>(m);
  if (r <= md)
    return density_radial(*this, r);
  // f_m(s) = s g(m^2) beyond the clip radius
  return density_radial(*this, md) + 0.5 * (r * r - md * md) * g(md * md);
}

double nonlinear_energy(const NonlinearitySpec& nl, const ComplexField& u) {
  if (nl.kind == NonlinearityKind::none)
    return 0.0;
  double s = 0.0;
  for (const Complex& z : u.values())
    s += density_radial(nl, std::abs(z));
  return s * u.grid().cell_volume();
}

double nonlinear_energy_truncated(const NonlinearitySpec& nl,
                                  const ComplexField& u, int m) {
  if (nl.kind == NonlinearityKind::none)
    return 0.0;
  double s = 0.0;
  for (const Complex& z : u.values())
    s += nl.density_truncated(z, m);
  return s * u.grid().cell_volume();
}

EnergyBreakdown total_energy(const NonlinearitySpec& nl, double b,
                             const ComplexField& u, const LinkSet& links) {
  EnergyBreakdown e;
  e.kinetic = kinetic_energy(u, links);
  e.nonlinear = std::pow(b, nl.gamma) * nonlinear_energy(nl, u);
  e.total = e.kinetic - nl.sign * e.nonlinear;
  return e;
}

EnergyBreakdown total_energy_truncated(const NonlinearitySpec& nl, double b,
                                       const ComplexField& u,
                                       const LinkSet& links, int m) {
  EnergyBreakdown e;
  e.kinetic = kinetic_energy(u, links);
  e.nonlinear = std::pow(b, nl.gamma) * nonlinear_energy_truncated(nl, u, m);
  e.total = e.kinetic - nl.sign * e.nonlinear;
  return e;
}

EnergyBreakdown total_energy(const NonlinearitySpec& nl, double b, double t,
                             const ComplexField& u, const PotentialSpec& pot) {
  return total_energy(nl, b, u, links_from_potential(pot, t, u.grid(), b));
}

} // namespace magnls
