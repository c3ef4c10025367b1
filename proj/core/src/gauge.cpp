#include "magnls/gauge.hpp"

#include <cmath>

namespace magnls {

namespace {

// Neighbor index tables make the wrap-around stencils branch-free.
struct Stencil {
  const Grid& g;
  int n;
  explicit Stencil(const Grid& grid) : g(grid), n(grid.n()) {}
  std::size_t shift(std::size_t k, int axis, int dir) const {
    if (g.dim() == 1) {
      int i = static_cast<int>(k) + dir;
      return g.wrap(i);
    }
    int i = static_cast<int>(k) / n;
    int j = static_cast<int>(k) % n;
    if (axis == 0)
      i = g.wrap(i + dir);
    else
      j = g.wrap(j + dir);
    return g.index(i, j);
  }
};

} // namespace

LinkSet links_from_node_samples(const RealVectorField& A, double b) {
  const Grid& g = A.grid();
  LinkSet links(g, b);
  const double h = g.spacing();
  Stencil st(g);
  for (int a = 0; a < g.dim(); ++a) {
    for (std::size_t k = 0; k < g.size(); ++k) {
      std::size_t kp = st.shift(k, a, +1);
      double mid = 0.5 * (A.value(a, k) + A.value(a, kp));
      links.link[a][k] = std::polar(1.0, -b * h * mid);
    }
  }
  return links;
}

LinkSet links_from_theta(const Grid& grid, double b,
                         const std::array<std::vector<double>, 2>& theta) {
  LinkSet links(grid, b);
  for (int a = 0; a < grid.dim(); ++a) {
    if (theta[a].size() != grid.size())
      throw DimensionError("links_from_theta: theta size mismatch");
    for (std::size_t k = 0; k < grid.size(); ++k)
      links.link[a][k] = std::polar(1.0, -theta[a][k]);
  }
  return links;
}

LinkSet gauge_shifted_links(const LinkSet& base, const RealField& chi) {
  if (chi.grid() != base.grid)
    throw DimensionError("gauge_shifted_links: grid mismatch");
  LinkSet out = base;
  Stencil st(base.grid);
  for (int a = 0; a < base.grid.dim(); ++a) {
    for (std::size_t k = 0; k < base.grid.size(); ++k) {
      std::size_t kp = st.shift(k, a, +1);
      out.link[a][k] *= std::polar(1.0, -base.b * (chi[kp] - chi[k]));
    }
  }
  return out;
}

ComplexField apply_gauge_phase(const ComplexField& u, const RealField& chi,
                               double b) {
  if (chi.grid() != u.grid())
    throw DimensionError("apply_gauge_phase: grid mismatch");
  ComplexField out(u.grid());
  for (std::size_t k = 0; k < u.size(); ++k)
    out[k] = std::polar(1.0, -b * chi[k]) * u[k];
  return out;
}

std::array<ComplexField, 2> covariant_gradient(const ComplexField& u,
                                               const LinkSet& links) {
  const Grid& g = u.grid();
  if (g != links.grid)
    throw DimensionError("covariant_gradient: grid mismatch");
  const double inv2h = 1.0 / (2.0 * g.spacing());
  Stencil st(g);
  std::array<ComplexField, 2> out{ComplexField(g), ComplexField(g)};
  const Complex I{0.0, 1.0};
  for (int a = 0; a < g.dim(); ++a) {
    const auto& L = links.link[a];
    for (std::size_t k = 0; k < g.size(); ++k) {
      std::size_t kp = st.shift(k, a, +1);
      std::size_t km = st.shift(k, a, -1);
      out[a][k] = I * (std::conj(L[k]) * u[kp] - L[km] * u[km]) * inv2h;
    }
  }
  return out;
}

std::array<ComplexField, 2> covariant_gradient(const ComplexField& u,
                                               const RealVectorField& A,
                                               double b) {
  return covariant_gradient(u, links_from_node_samples(A, b));
}

std::array<ComplexField, 2>
covariant_gradient_spectral(const ComplexField& u, const RealVectorField& A,
                            double b, const SpectralWorkspace& ws) {
  const Grid& g = u.grid();
  if (g != A.grid())
    throw DimensionError("covariant_gradient_spectral: grid mismatch");
  std::array<ComplexField, 2> out{ComplexField(g), ComplexField(g)};
  const Complex I{0.0, 1.0};
  for (int a = 0; a < g.dim(); ++a) {
    ComplexField du = ws.derivative(u, a, 1);
    for (std::size_t k = 0; k < g.size(); ++k)
      out[a][k] = I * du[k] - b * A.value(a, k) * u[k];
  }
  return out;
}

ComplexField covariant_forward_difference(const ComplexField& u,
                                          const LinkSet& links, int axis) {
  const Grid& g = u.grid();
  if (g != links.grid)
    throw DimensionError("covariant_forward_difference: grid mismatch");
  const double invh = 1.0 / g.spacing();
  Stencil st(g);
  ComplexField out(g);
  const auto& L = links.link[axis];
  for (std::size_t k = 0; k < g.size(); ++k) {
    std::size_t kp = st.shift(k, axis, +1);
    out[k] = (std::conj(L[k]) * u[kp] - u[k]) * invh;
  }
  return out;
}

void magnetic_laplacian_into(std::span<const Complex> u, const LinkSet& links,
                             std::span<Complex> out) {
  const Grid& g = links.grid;
  if (u.size() != g.size() || out.size() != g.size())
    throw DimensionError("magnetic_laplacian: size mismatch");
  const double invh2 = 1.0 / (g.spacing() * g.spacing());
  const int n = g.n();
  std::fill(out.begin(), out.end(), Complex{0.0, 0.0});
  if (g.dim() == 1) {
    const auto& L = links.link[0];
    for (int i = 0; i < n; ++i) {
      int ip = i + 1 == n ? 0 : i + 1;
      int im = i == 0 ? n - 1 : i - 1;
      out[i] = -(std::conj(L[i]) * u[ip] - 2.0 * u[i] + L[im] * u[im]) * invh2;
    }
    return;
  }
  const auto& L0 = links.link[0];
  const auto& L1 = links.link[1];
  for (int i = 0; i < n; ++i) {
    const int ip = i + 1 == n ? 0 : i + 1;
    const int im = i == 0 ? n - 1 : i - 1;
    const std::size_t row = static_cast<std::size_t>(i) * n;
    const std::size_t rp = static_cast<std::size_t>(ip) * n;
    const std::size_t rm = static_cast<std::size_t>(im) * n;
    for (int j = 0; j < n; ++j) {
      const int jp = j + 1 == n ? 0 : j + 1;
      const int jm = j == 0 ? n - 1 : j - 1;
      const std::size_t k = row + j;
      Complex acc = std::conj(L0[k]) * u[rp + j] + L0[rm + j] * u[rm + j] +
                    std::conj(L1[k]) * u[row + jp] + L1[row + jm] * u[row + jm];
      out[k] = -(acc - 4.0 * u[k]) * invh2;
    }
  }
}

ComplexField magnetic_laplacian(const ComplexField& u, const LinkSet& links) {
  if (u.grid() != links.grid)
    throw DimensionError("magnetic_laplacian: grid mismatch");
  ComplexField out(u.grid());
  magnetic_laplacian_into(u.values(), links, out.values());
  return out;
}

double kinetic_energy(const ComplexField& u, const LinkSet& links) {
  double s = 0.0;
  for (int a = 0; a < u.grid().dim(); ++a) {
    ComplexField d = covariant_forward_difference(u, links, a);
    for (const Complex& z : d.values())
      s += std::norm(z);
  }
  return 0.5 * s * u.grid().cell_volume();
}

double magnetic_h1_norm(const ComplexField& u, const LinkSet& links) {
  auto grad = covariant_gradient(u, links);
  double s = 0.0;
  for (int a = 0; a < u.grid().dim(); ++a)
    for (const Complex& z : grad[a].values())
      s += std::norm(z);
  return std::sqrt(s * u.grid().cell_volume()) + mass_l2(u);
}

double magnetic_h1_norm(const ComplexField& u, const RealVectorField& A,
                        double b) {
  return magnetic_h1_norm(u, links_from_node_samples(A, b));
}

PotentialLinkCache::PotentialLinkCache(const PotentialSpec& spec,
                                       const Grid& grid, double b,
                                       const RealField* gauge_chi)
    : spec_(spec), grid_(grid), b_(b) {
  spec.validate(grid.dim());
  const double h = grid.spacing();
  const int n = grid.n();
  Stencil st(grid);

  for (int a = 0; a < grid.dim(); ++a)
    theta_base_[a].assign(grid.size(), 0.0);

  if (spec.kind == PotentialKind::tabulated) {
    const RealVectorField& A = *spec.table;
    if (A.grid() != grid)
      throw DimensionError("tabulated potential grid mismatch");
    for (int a = 0; a < grid.dim(); ++a)
      for (std::size_t k = 0; k < grid.size(); ++k) {
        std::size_t kp = st.shift(k, a, +1);
        theta_base_[a][k] = b * h * 0.5 * (A.value(a, k) + A.value(a, kp));
      }
  } else if (spec.kind != PotentialKind::zero) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const std::size_t k = grid.index(i, j);
        double x = grid.coord(i), y = grid.coord(j);
        theta_base_[0][k] = b * h * spec.base_at(x + 0.5 * h, y)[0];
        theta_base_[1][k] = b * h * spec.base_at(x, y + 0.5 * h)[1];
      }
  }

  if (gauge_chi) {
    if (gauge_chi->grid() != grid)
      throw DimensionError("gauge chi grid mismatch");
    has_chi_ = true;
    for (int a = 0; a < grid.dim(); ++a) {
      chi_diff_[a].assign(grid.size(), 0.0);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        std::size_t kp = st.shift(k, a, +1);
        chi_diff_[a][k] = b * ((*gauge_chi)[kp] - (*gauge_chi)[k]);
      }
    }
  }
}

LinkSet PotentialLinkCache::links(double t) const {
  const double factor = spec_.modulation_factor(t);
  LinkSet out(grid_, b_);
  for (int a = 0; a < grid_.dim(); ++a)
    for (std::size_t k = 0; k < grid_.size(); ++k) {
      double theta = factor * theta_base_[a][k];
      if (has_chi_)
        theta += chi_diff_[a][k];
      out.link[a][k] = std::polar(1.0, -theta);
    }
  return out;
}

std::array<std::vector<double>, 2>
PotentialLinkCache::theta_dot(double t) const {
  const double rate = spec_.modulation_rate(t);
  std::array<std::vector<double>, 2> out;
  for (int a = 0; a < grid_.dim(); ++a) {
    out[a].resize(grid_.size());
    for (std::size_t k = 0; k < grid_.size(); ++k)
      out[a][k] = rate * theta_base_[a][k];
  }
  return out;
}

LinkSet links_from_potential(const PotentialSpec& spec, double t,
                             const Grid& grid, double b) {
  return PotentialLinkCache(spec, grid, b).links(t);
}

double energy_correction_rate(
    const ComplexField& u, const LinkSet& links,
    const std::array<std::vector<double>, 2>& theta_dot) {
  const Grid& g = u.grid();
  const double invh2 = 1.0 / (g.spacing() * g.spacing());
  Stencil st(g);
  double s = 0.0;
  for (int a = 0; a < g.dim(); ++a) {
    const auto& L = links.link[a];
    const auto& td = theta_dot[a];
    for (std::size_t k = 0; k < g.size(); ++k) {
      std::size_t kp = st.shift(k, a, +1);
      // Re[ i theta_dot conj(L) u(x+e) conj(u(x)) ] / h^2
      Complex t = Complex{0.0, td[k]} * std::conj(L[k]) * u[kp] *
                  std::conj(u[k]);
      s += t.real();
    }
  }
  return s * invh2 * g.cell_volume();
}

} // namespace magnls
