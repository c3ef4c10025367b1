#ifndef MAGNLS_GAUGE_HPP
#define MAGNLS_GAUGE_HPP

#include "magnls/field.hpp"
#include "magnls/potential.hpp"
#include "magnls/spectral.hpp"

#include <array>
#include <optional>

namespace magnls {

/// Peierls link phases on grid edges. link[a][k] = exp(-i * theta_a(x_k))
/// sits on the edge from node x_k to x_k + h*e_a, with theta the line
/// integral of b*A along the edge (midpoint quadrature unless an exact
/// integral is supplied, e.g. for gauge shifts).
struct LinkSet {
  Grid grid;
  double b = 1.0;
  std::array<std::vector<Complex>, 2> link;

  explicit LinkSet(const Grid& g, double b_ = 1.0) : grid(g), b(b_) {
    for (int a = 0; a < g.dim(); ++a)
      link[a].assign(g.size(), Complex{1.0, 0.0});
  }
};

/// Links from node samples of A: the midpoint value is the average of the
/// two edge endpoints (second-order quadrature of the line integral).
LinkSet links_from_node_samples(const RealVectorField& A, double b);

/// Links from edge-midpoint samples of b*h*A (theta arrays given directly).
LinkSet links_from_theta(const Grid& grid, double b,
                         const std::array<std::vector<double>, 2>& theta);

/// Multiply links by the exact line integral of grad(chi):
/// link'_a(x) = link_a(x) * exp(-i b (chi(x+h e_a) - chi(x))).
LinkSet gauge_shifted_links(const LinkSet& base, const RealField& chi);

/// Pointwise phase map u -> exp(-i b chi) u of a gauge transformation.
ComplexField apply_gauge_phase(const ComplexField& u, const RealField& chi,
                               double b);

/// Centered gauge-covariant gradient: component a is
///   (i d_a - b A_a) u ~ i [conj(L_a(x)) u(x+he_a) - L_a(x-he_a) u(x-he_a)] / (2h).
std::array<ComplexField, 2> covariant_gradient(const ComplexField& u,
                                               const LinkSet& links);

/// Convenience overload building midpoint links from node samples of A.
std::array<ComplexField, 2> covariant_gradient(const ComplexField& u,
                                               const RealVectorField& A,
                                               double b);

/// Spectral variant (exact derivative, pointwise A product); diagnostics only.
std::array<ComplexField, 2>
covariant_gradient_spectral(const ComplexField& u, const RealVectorField& A,
                            double b, const SpectralWorkspace& ws);

/// Forward covariant difference [conj(L_a(x)) u(x+he_a) - u(x)] / h.
/// Its squared L2 sum is the quadratic form of the discrete Hamiltonian.
ComplexField covariant_forward_difference(const ComplexField& u,
                                          const LinkSet& links, int axis);

/// Discrete magnetic Hamiltonian H u = sum_a (i d_a - b A_a)^2 u with the
/// Hermitian three-point link stencil.
ComplexField magnetic_laplacian(const ComplexField& u, const LinkSet& links);
void magnetic_laplacian_into(std::span<const Complex> u, const LinkSet& links,
                             std::span<Complex> out);

/// Kinetic energy (1/2) <H u, u> = (1/2) sum_a ||D+_a u||^2.
double kinetic_energy(const ComplexField& u, const LinkSet& links);

/// Magnetic Sobolev norm ||(i grad - bA) u||_L2 + ||u||_L2 with the
/// centered covariant gradient.
double magnetic_h1_norm(const ComplexField& u, const LinkSet& links);
double magnetic_h1_norm(const ComplexField& u, const RealVectorField& A,
                        double b);

/// Instantaneous rate -1/2 <dH/dt u, u> driving the energy-law correction
/// integral; theta_dot[a][k] is the time derivative of the link angle.
/// Continuum limit: b * Re< dtA u, (i grad - bA) u >.
double energy_correction_rate(const ComplexField& u, const LinkSet& links,
                              const std::array<std::vector<double>, 2>& theta_dot);

/// Link angles for a potential spec, rebuilt in O(N) per requested time.
/// Analytic kinds evaluate A exactly at edge midpoints; tabulated kinds
/// average the two edge endpoints. An optional static gauge function chi
/// multiplies every link by the exact line integral of grad(chi).
class PotentialLinkCache {
public:
  PotentialLinkCache(const PotentialSpec& spec, const Grid& grid, double b,
                     const RealField* gauge_chi = nullptr);

  LinkSet links(double t) const;
  /// d/dt of the link angles at time t (gauge shift is static, drops out).
  std::array<std::vector<double>, 2> theta_dot(double t) const;

  bool is_static() const { return spec_.is_static(); }
  double field_strength() const { return b_; }
  const Grid& grid() const { return grid_; }
  const PotentialSpec& spec() const { return spec_; }

private:
  PotentialSpec spec_;
  Grid grid_;
  double b_;
  std::array<std::vector<double>, 2> theta_base_; // b*h*A_base at midpoints
  std::array<std::vector<double>, 2> chi_diff_;   // b*(chi(x+he)-chi(x))
  bool has_chi_ = false;
};

/// One-off midpoint links for a potential at time t.
LinkSet links_from_potential(const PotentialSpec& spec, double t,
                             const Grid& grid, double b);

} // namespace magnls

#endif
