#include "choq/grid.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace choq {

RadialGrid make_grid(Eigen::Index n, double r_max, GridScheme scheme) {
  if (n < 8) throw std::invalid_argument("make_grid: n must be >= 8");
  if (!(r_max > 0.0)) throw std::invalid_argument("make_grid: r_max must be positive");

  RadialGrid g;
  g.r_max = r_max;
  g.scheme = scheme;
  g.nodes.resize(n);
  g.weights.resize(n);
  g.edges.resize(n + 1);

  g.edges[0] = 0.0;
  for (Eigen::Index i = 1; i <= n; ++i) {
    const double xi = static_cast<double>(i) / static_cast<double>(n);
    g.edges[i] = (scheme == GridScheme::UniformMidpoint) ? r_max * xi : r_max * xi * xi;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    g.nodes[i] = 0.5 * (g.edges[i] + g.edges[i + 1]);
    // 2*pi*r*(cell width); node at the cell midpoint makes the total
    // weight sum to pi*R^2 exactly for both schemes.
    g.weights[i] = 2.0 * M_PI * g.nodes[i] * (g.edges[i + 1] - g.edges[i]);
  }
  return g;
}

GridScheme parse_scheme(const std::string& name) {
  if (name == "uniform-midpoint" || name == "uniform") return GridScheme::UniformMidpoint;
  if (name == "graded") return GridScheme::Graded;
  throw std::invalid_argument("unknown grid scheme: " + name);
}

std::string scheme_name(GridScheme scheme) {
  return scheme == GridScheme::UniformMidpoint ? "uniform-midpoint" : "graded";
}

static void check_size(const RadialGrid& grid, const Eigen::Ref<const Vector>& u, const char* who) {
  if (u.size() != grid.size())
    throw std::invalid_argument(std::string(who) + ": field size does not match grid");
}

double integrate(const RadialGrid& grid, const Eigen::Ref<const Vector>& g) {
  check_size(grid, g, "integrate");
  return grid.weights.dot(g);
}

double grad_norm_sq(const RadialGrid& grid, const Eigen::Ref<const Vector>& u) {
  check_size(grid, u, "grad_norm_sq");
  const Eigen::Index n = grid.size();
  double acc = 0.0;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    const double span = grid.nodes[k + 1] - grid.nodes[k];
    const double d = (u[k + 1] - u[k]) / span;
    acc += grid.edges[k + 1] * d * d * span;
  }
  // Dirichlet closure u(R) = 0: the zero extension beyond R carries the
  // jump energy; without it the truncated disk admits gradient-free
  // constants, which H^1(R^2) does not
  const double span = grid.r_max - grid.nodes[n - 1];
  acc += grid.r_max * u[n - 1] * u[n - 1] / span;
  return 2.0 * M_PI * acc;
}

double lp_norm(const RadialGrid& grid, const Eigen::Ref<const Vector>& u, double p) {
  check_size(grid, u, "lp_norm");
  if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
  const double s = grid.weights.dot(u.array().abs().pow(p).matrix());
  return std::pow(s, 1.0 / p);
}

Vector rescale_mass(const RadialGrid& grid, const Eigen::Ref<const Vector>& u, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("rescale_mass: a must be positive");
  const double norm = lp_norm(grid, u, 2.0);
  if (norm == 0.0) throw std::domain_error("rescale_mass: degenerate field with zero L2 norm");
  return (a / norm) * u;
}

Vector radial_laplacian_fv(const RadialGrid& grid, const Eigen::Ref<const Vector>& u) {
  check_size(grid, u, "radial_laplacian_fv");
  const Eigen::Index n = grid.size();
  Vector lap(n);
  double flux_lo = 0.0;  // r*u' at the inner cell edge; zero at r = 0
  for (Eigen::Index i = 0; i < n; ++i) {
    double flux_hi;
    if (i + 1 < n) {
      const double span = grid.nodes[i + 1] - grid.nodes[i];
      flux_hi = grid.edges[i + 1] * (u[i + 1] - u[i]) / span;
    } else {
      // Dirichlet closure: flux toward the zero extension at R
      flux_hi = grid.r_max * (0.0 - u[i]) / (grid.r_max - grid.nodes[i]);
    }
    const double cell = grid.edges[i + 1] - grid.edges[i];
    lap[i] = (flux_hi - flux_lo) / (grid.nodes[i] * cell);
    flux_lo = flux_hi;
  }
  return lap;
}

double interp_radial(const RadialGrid& grid, const Eigen::Ref<const Vector>& u, double q) {
  const Eigen::Index n = grid.size();
  q = std::abs(q);
  if (q >= grid.r_max) return 0.0;
  if (q <= grid.nodes[0]) return u[0];
  const double* begin = grid.nodes.data();
  const double* pos = std::upper_bound(begin, begin + n, q);
  const Eigen::Index j = pos - begin;  // first node > q; j >= 1
  if (j >= n) {
    // between the last node and R, interpolate toward the zero extension
    const double t = (q - grid.nodes[n - 1]) / (grid.r_max - grid.nodes[n - 1]);
    return u[n - 1] * (1.0 - t);
  }
  const double t = (q - grid.nodes[j - 1]) / (grid.nodes[j] - grid.nodes[j - 1]);
  return u[j - 1] * (1.0 - t) + u[j] * t;
}

double interp_radial_cubic(const RadialGrid& grid, const Eigen::Ref<const Vector>& u, double q) {
  const Eigen::Index n = grid.size();
  q = std::abs(q);
  if (q >= grid.r_max) return 0.0;
  const double* begin = grid.nodes.data();
  const double* pos = std::upper_bound(begin, begin + n, q);
  const Eigen::Index j = pos - begin;  // first node > q
  // four-point Lagrange stencil; even reflection through 0, zero at R
  double xs[4], vs[4];
  if (j == 0) {
    xs[0] = -grid.nodes[1]; xs[1] = -grid.nodes[0]; xs[2] = grid.nodes[0]; xs[3] = grid.nodes[1];
    vs[0] = u[1]; vs[1] = u[0]; vs[2] = u[0]; vs[3] = u[1];
  } else if (j == 1) {
    xs[0] = -grid.nodes[0]; xs[1] = grid.nodes[0]; xs[2] = grid.nodes[1]; xs[3] = grid.nodes[2];
    vs[0] = u[0]; vs[1] = u[0]; vs[2] = u[1]; vs[3] = u[2];
  } else if (j >= n - 1) {
    xs[0] = grid.nodes[n - 3]; xs[1] = grid.nodes[n - 2]; xs[2] = grid.nodes[n - 1];
    xs[3] = grid.r_max;
    vs[0] = u[n - 3]; vs[1] = u[n - 2]; vs[2] = u[n - 1]; vs[3] = 0.0;
  } else {
    for (int k = 0; k < 4; ++k) {
      xs[k] = grid.nodes[j - 2 + k];
      vs[k] = u[j - 2 + k];
    }
  }
  double acc = 0.0;
  for (int k = 0; k < 4; ++k) {
    double lk = 1.0;
    for (int l = 0; l < 4; ++l)
      if (l != k) lk *= (q - xs[l]) / (xs[k] - xs[l]);
    acc += lk * vs[k];
  }
  return acc;
}

void write_field_csv(std::ostream& out, const RadialGrid& grid, const Eigen::Ref<const Vector>& u) {
  check_size(grid, u, "write_field_csv");
  out << "r,u\n";
  out.precision(17);
  for (Eigen::Index i = 0; i < grid.size(); ++i) out << grid.nodes[i] << ',' << u[i] << '\n';
}

void write_grid_csv(std::ostream& out, const RadialGrid& grid) {
  out << "r,w\n";
  out.precision(17);
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    out << grid.nodes[i] << ',' << grid.weights[i] << '\n';
}

Vector read_field_csv(std::istream& in, const RadialGrid& grid) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("read_field_csv: empty stream");
  Vector u(grid.size());
  Eigen::Index i = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (i >= grid.size()) throw std::invalid_argument("read_field_csv: too many rows for grid");
    std::istringstream row(line);
    double r = 0.0, val = 0.0;
    char comma = 0;
    if (!(row >> r >> comma >> val) || comma != ',')
      throw std::invalid_argument("read_field_csv: malformed row: " + line);
    u[i++] = val;
  }
  if (i != grid.size()) throw std::invalid_argument("read_field_csv: row count does not match grid");
  return u;
}

}  // namespace choq
