#pragma once

#include "choq/grid.hpp"
#include "choq/nonlin.hpp"
#include "choq/riesz.hpp"

#include <stdexcept>
#include <utility>

namespace choq {

class EnergyOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnergyBreakdown {
  double kinetic = 0.0;   // 0.5 |grad u|_2^2
  double nonlocal = 0.0;  // 0.5 int (I_a * F(u)) F(u)
  double J = 0.0;         // kinetic - nonlocal
  double pohozaev = 0.0;  // 2 kinetic + (2+alpha) nonlocal - coupling
  double coupling = 0.0;  // int (I_a * F(u)) f(u) u
  double lambda_est = 0.0;
  double mass = 0.0;
};

EnergyBreakdown evaluate_energy(const RadialGrid& grid, const RieszKernelMatrix& kernel,
                                const NonlinearityModel& model, const Eigen::Ref<const Vector>& u,
                                double a);

/// Nodewise Euler-Lagrange residual -lap(u) + lambda u - (I_a*F(u)) f(u)
/// with a high-order independent discretization of the radial Laplacian,
/// and its L2 norm relative to |-lap(u) + lambda u|.
std::pair<Vector, double> el_residual(const RadialGrid& grid, const RieszKernelMatrix& kernel,
                                      const NonlinearityModel& model,
                                      const Eigen::Ref<const Vector>& u, double lambda);

namespace detail {

/// Shared nonlocal machinery: F(u) and f(u) nodewise, the convolved field
/// I_a * F(u), the pair quadrature int (I_a*F)F, and the coupling
/// int (I_a*F) f(u) u.  Throws EnergyOverflow on amplitude sentinels.
struct NonlocalEval {
  Vector big_f;   // F(u_i)
  Vector little_f;  // f(u_i)
  Vector conv;    // (I_a * F(u))(r_i)
  double quad = 0.0;
  double coupling = 0.0;
};

NonlocalEval nonlocal_eval(const RadialGrid& grid, const RieszKernelMatrix& kernel,
                           const NonlinearityModel& model, const Eigen::Ref<const Vector>& u);

}  // namespace detail

}  // namespace choq
