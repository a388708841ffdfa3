#include "choq/fiber.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace choq {

namespace {

// B and C of the amplitude-scaled field e^s u.
struct FiberTerms {
  double quad;
  double coupling;
};

FiberTerms fiber_terms(const RadialGrid& grid, const RieszKernelMatrix& kernel,
                       const NonlinearityModel& model, const Eigen::Ref<const Vector>& u,
                       double s) {
  const Vector v = std::exp(s) * u;
  const detail::NonlocalEval ne = detail::nonlocal_eval(grid, kernel, model, v);
  return {ne.quad, ne.coupling};
}

}  // namespace

double jtilde(const RadialGrid& grid, const RieszKernelMatrix& kernel,
              const NonlinearityModel& model, const Eigen::Ref<const Vector>& u, double s) {
  const double kin = grad_norm_sq(grid, u);
  const FiberTerms t = fiber_terms(grid, kernel, model, u, s);
  return 0.5 * std::exp(2.0 * s) * kin - 0.5 * std::exp(-(2.0 + model.alpha) * s) * t.quad;
}

double pohozaev_scaled(const RadialGrid& grid, const RieszKernelMatrix& kernel,
                       const NonlinearityModel& model, const Eigen::Ref<const Vector>& u,
                       double s) {
  const double kin = grad_norm_sq(grid, u);
  const FiberTerms t = fiber_terms(grid, kernel, model, u, s);
  const double shrink = std::exp(-(2.0 + model.alpha) * s);
  return std::exp(2.0 * s) * kin + (2.0 + model.alpha) * (0.5 * (shrink * t.quad)) -
         shrink * t.coupling;
}

namespace {

// Pohozaev along the fiber with amplitude overflow read as "already past the
// maximum": the fiber energy decays to -inf on that side.
double pohozaev_or_neg(const RadialGrid& grid, const RieszKernelMatrix& kernel,
                       const NonlinearityModel& model, const Eigen::Ref<const Vector>& u,
                       double s) {
  try {
    return pohozaev_scaled(grid, kernel, model, u, s);
  } catch (const EnergyOverflow&) {
    return -std::numeric_limits<double>::infinity();
  }
}

}  // namespace

double project_pohozaev(const RadialGrid& grid, const RieszKernelMatrix& kernel,
                        const NonlinearityModel& model, const Eigen::Ref<const Vector>& u,
                        double tol) {
  const double kin = grad_norm_sq(grid, u);
  if (!(kin > 0.0))
    throw ProjectionFailed("project_pohozaev: degenerate field with zero gradient");
  constexpr double kCap = 20.0;

  auto pz = [&](double s) { return pohozaev_or_neg(grid, kernel, model, u, s); };

  double lo = -1.0, hi = 1.0;
  while (pz(lo) <= 0.0) {
    lo *= 2.0;
    if (lo < -kCap)
      throw ProjectionFailed("project_pohozaev: no sign change down to s = -20");
  }
  while (pz(hi) >= 0.0) {
    hi *= 2.0;
    if (hi > kCap) throw ProjectionFailed("project_pohozaev: no sign change up to s = +20");
  }

  // under (f6) the fiber derivative changes sign exactly once
  {
    int changes = 0;
    double prev = pz(lo);
    for (int k = 1; k <= 8; ++k) {
      const double s = lo + (hi - lo) * k / 8.0;
      const double val = (k == 8) ? pz(hi) : pz(s);
      if ((prev > 0.0) != (val > 0.0)) ++changes;
      prev = val;
    }
    if (changes != 1)
      throw MonotonicityViolation(
          "project_pohozaev: multiple sign changes across the fiber scan");
  }

  double a = lo, b = hi;
  double mid = 0.5 * (a + b);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (a + b);
    const double val = pz(mid);
    if (std::abs(val) < tol * std::exp(2.0 * mid) * kin) return mid;
    if (val > 0.0)
      a = mid;
    else
      b = mid;
    if (b - a < 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(mid)))
      break;
  }
  return mid;
}

Vector scale_field(const RadialGrid& grid, const Eigen::Ref<const Vector>& u, double s) {
  if (u.size() != grid.size())
    throw std::invalid_argument("scale_field: field size does not match grid");
  if (s == 0.0) return u;
  const double amp = std::exp(s);
  Vector out(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    out[i] = amp * interp_radial_cubic(grid, u, amp * grid.nodes[i]);
  return out;
}

FiberScan scan_fiber(const RadialGrid& grid, const RieszKernelMatrix& kernel,
                     const NonlinearityModel& model, const Eigen::Ref<const Vector>& u,
                     double s_min, double s_max, int count) {
  if (count < 2 || !(s_max > s_min)) throw std::invalid_argument("scan_fiber: bad scan range");
  FiberScan scan;
  scan.s_values.resize(count);
  scan.jtilde_values.resize(count);
  scan.pohozaev_values.resize(count);
  for (int k = 0; k < count; ++k) {
    const double s = s_min + (s_max - s_min) * k / (count - 1);
    scan.s_values[k] = s;
    try {
      scan.jtilde_values[k] = jtilde(grid, kernel, model, u, s);
      scan.pohozaev_values[k] = pohozaev_scaled(grid, kernel, model, u, s);
    } catch (const EnergyOverflow&) {
      scan.jtilde_values[k] = std::numeric_limits<double>::quiet_NaN();
      scan.pohozaev_values[k] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  try {
    scan.root = project_pohozaev(grid, kernel, model, u);
  } catch (const std::runtime_error&) {
    scan.root = std::nullopt;
  }
  return scan;
}

void write_fiber_csv(std::ostream& out, const FiberScan& scan) {
  out << "s,jtilde,pohozaev\n";
  out.precision(17);
  for (Eigen::Index k = 0; k < scan.s_values.size(); ++k)
    out << scan.s_values[k] << ',' << scan.jtilde_values[k] << ',' << scan.pohozaev_values[k]
        << '\n';
}

}  // namespace choq
