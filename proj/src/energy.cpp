#include "choq/energy.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace choq {

namespace detail {

NonlocalEval nonlocal_eval(const RadialGrid& grid, const RieszKernelMatrix& kernel,
                           const NonlinearityModel& model, const Eigen::Ref<const Vector>& u) {
  if (u.size() != grid.size() || kernel.size() != grid.size())
    throw std::invalid_argument("nonlocal_eval: grid/kernel/field sizes disagree");
  const Eigen::Index n = grid.size();
  NonlocalEval out;
  out.big_f.resize(n);
  out.little_f.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const NonlinValue v = evaluate(model, u[i]);
    if (v.overflow) {
      std::ostringstream msg;
      msg << "nonlocal_eval: amplitude " << u[i] << " at r=" << grid.nodes[i]
          << " exceeds the overflow threshold (log f ~ " << v.log_f << ")";
      throw EnergyOverflow(msg.str());
    }
    out.big_f[i] = v.F;
    out.little_f[i] = v.f;
  }
  out.conv = kernel.k * out.big_f;
  out.quad = grid.weights.dot(out.conv.cwiseProduct(out.big_f));
  out.coupling = grid.weights.dot(out.conv.cwiseProduct(out.little_f).cwiseProduct(u));
  if (!std::isfinite(out.quad) || !std::isfinite(out.coupling))
    throw EnergyOverflow("nonlocal_eval: nonlocal quadrature overflowed");
  return out;
}

}  // namespace detail

EnergyBreakdown evaluate_energy(const RadialGrid& grid, const RieszKernelMatrix& kernel,
                                const NonlinearityModel& model, const Eigen::Ref<const Vector>& u,
                                double a) {
  if (!(a > 0.0)) throw std::invalid_argument("evaluate_energy: a must be positive");
  const detail::NonlocalEval ne = detail::nonlocal_eval(grid, kernel, model, u);
  EnergyBreakdown e;
  e.kinetic = 0.5 * grad_norm_sq(grid, u);
  e.nonlocal = 0.5 * ne.quad;
  e.J = e.kinetic - e.nonlocal;
  e.coupling = ne.coupling;
  e.pohozaev = 2.0 * e.kinetic + (2.0 + model.alpha) * e.nonlocal - e.coupling;
  e.lambda_est = (1.0 + 0.5 * model.alpha) * ne.quad / (a * a);
  e.mass = lp_norm(grid, u, 2.0);
  return e;
}

std::pair<Vector, double> el_residual(const RadialGrid& grid, const RieszKernelMatrix& kernel,
                                      const NonlinearityModel& model,
                                      const Eigen::Ref<const Vector>& u, double lambda) {
  if (!std::isfinite(lambda)) throw std::invalid_argument("el_residual: lambda must be finite");
  const detail::NonlocalEval ne = detail::nonlocal_eval(grid, kernel, model, u);
  const Vector linear = -radial_laplacian_fv(grid, u) + lambda * u;
  const Vector residual = linear - ne.conv.cwiseProduct(ne.little_f);
  const double denom = lp_norm(grid, linear, 2.0);
  const double norm = denom > 0.0 ? lp_norm(grid, residual, 2.0) / denom : 0.0;
  return {residual, norm};
}

}  // namespace choq
