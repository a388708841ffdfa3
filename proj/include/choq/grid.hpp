#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>

namespace choq {

using Vector = Eigen::VectorXd;

enum class GridScheme { UniformMidpoint, Graded };

/// Radial discretization of the plane reduced to (0, R].
///
/// Nodes are cell centres, weights carry the full 2*pi*r Jacobian so that
/// integrate(grid, g) approximates the integral of g(|x|) over R^2.  Cell
/// edges are kept alongside: edges[0] = 0, edges[n] = r_max.
struct RadialGrid {
  Vector nodes;
  Vector weights;
  Vector edges;
  double r_max = 0.0;
  GridScheme scheme = GridScheme::UniformMidpoint;

  Eigen::Index size() const { return nodes.size(); }
};

RadialGrid make_grid(Eigen::Index n, double r_max, GridScheme scheme);

GridScheme parse_scheme(const std::string& name);
std::string scheme_name(GridScheme scheme);

double integrate(const RadialGrid& grid, const Eigen::Ref<const Vector>& g);

/// Discrete Dirichlet energy: quadrature of |u'|^2 over the plane, with the
/// derivative taken as the difference quotient across each interior cell
/// edge.  Zero-flux conventions at r = 0 and r = R keep constants exactly
/// gradient-free; the form is the exact energy of the finite-volume radial
/// Laplacian (see radial_laplacian_fv).
double grad_norm_sq(const RadialGrid& grid, const Eigen::Ref<const Vector>& u);

double lp_norm(const RadialGrid& grid, const Eigen::Ref<const Vector>& u, double p);

/// Rescale u to have L^2 norm exactly a.  Throws on a zero field.
Vector rescale_mass(const RadialGrid& grid, const Eigen::Ref<const Vector>& u, double a);

/// Finite-volume radial Laplacian (-u'' - u'/r in conservative form) with
/// zero flux at both boundary edges.  Its weighted form w .* (-lap) is the
/// exact gradient of 0.5 * grad_norm_sq.
Vector radial_laplacian_fv(const RadialGrid& grid, const Eigen::Ref<const Vector>& u);

/// Piecewise-linear evaluation of a sampled radial function at radius q,
/// even at the origin and zero beyond r_max.
double interp_radial(const RadialGrid& grid, const Eigen::Ref<const Vector>& u, double q);

/// Four-point Lagrange evaluation with the same boundary conventions; used
/// where the O(h^2) linear error would pollute cancellation-sensitive
/// functionals (the fiber rescaling of solver iterates).
double interp_radial_cubic(const RadialGrid& grid, const Eigen::Ref<const Vector>& u, double q);

void write_field_csv(std::ostream& out, const RadialGrid& grid, const Eigen::Ref<const Vector>& u);
void write_grid_csv(std::ostream& out, const RadialGrid& grid);
Vector read_field_csv(std::istream& in, const RadialGrid& grid);

}  // namespace choq
