#include "choq/moser.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace choq {

Vector moser_field(const RadialGrid& grid, int n) {
  if (n < 2) throw std::invalid_argument("moser_field: n must be >= 2");
  if (grid.r_max < 1.0)
    throw std::invalid_argument("moser_field: grid must extend to r_max >= 1");
  const double plateau = 1.0 / n;
  Eigen::Index inside = 0;
  while (inside < grid.size() && grid.nodes[inside] <= plateau) ++inside;
  if (inside < 4) {
    std::ostringstream msg;
    msg << "moser_field: only " << inside << " nodes resolve the plateau [0, 1/" << n
        << "]; use a graded grid or raise N";
    throw ResolutionError(msg.str());
  }
  const double log_n = std::log(static_cast<double>(n));
  const double norm = 1.0 / std::sqrt(2.0 * M_PI);
  Vector w(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double r = grid.nodes[i];
    if (r <= plateau)
      w[i] = norm * std::sqrt(log_n);
    else if (r < 1.0)
      w[i] = norm * std::log(1.0 / r) / std::sqrt(log_n);
    else
      w[i] = 0.0;
  }
  return w;
}

Vector normalized_moser(const RadialGrid& grid, int n, double a) {
  return rescale_mass(grid, moser_field(grid, n), a);
}

double mp_upper_bound(double alpha, double gamma0) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("mp_upper_bound: alpha must lie in (0,2)");
  if (!(gamma0 > 0.0)) throw std::invalid_argument("mp_upper_bound: gamma0 must be positive");
  return (2.0 + alpha) * M_PI / (2.0 * gamma0);
}

Vector log_spaced(double lo, double hi, int count) {
  if (!(lo > 0.0 && hi > lo) || count < 2)
    throw std::invalid_argument("log_spaced: need 0 < lo < hi and count >= 2");
  Vector t(count);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int k = 0; k < count; ++k)
    t[k] = std::exp(llo + (lhi - llo) * k / (count - 1));
  return t;
}

MoserScanResult g_scan(const RadialGrid& grid, const RieszKernelMatrix& kernel,
                       const NonlinearityModel& model, int n, double a,
                       const Eigen::Ref<const Vector>& t_grid) {
  if (t_grid.size() < 3) throw std::invalid_argument("g_scan: t grid too short");
  for (Eigen::Index k = 0; k + 1 < t_grid.size(); ++k)
    if (!(t_grid[k] > 0.0 && t_grid[k + 1] > t_grid[k]))
      throw std::invalid_argument("g_scan: t grid must be positive increasing");

  const Vector w = normalized_moser(grid, n, a);
  const double kin = grad_norm_sq(grid, w);

  auto g_at = [&](double t) -> double {
    const detail::NonlocalEval ne = detail::nonlocal_eval(grid, kernel, model, t * w);
    return 0.5 * t * t * kin - 0.5 * std::pow(t, -(2.0 + model.alpha)) * ne.quad;
  };

  MoserScanResult out;
  out.n = n;
  out.t_values = t_grid;
  out.g_values.resize(t_grid.size());
  Eigen::Index best = -1;
  for (Eigen::Index k = 0; k < t_grid.size(); ++k) {
    try {
      out.g_values[k] = g_at(t_grid[k]);
      if (best < 0 || out.g_values[k] > out.g_values[best]) best = k;
    } catch (const EnergyOverflow&) {
      out.g_values[k] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  if (best < 0) throw ScanOverflow("g_scan: every sample overflowed; reduce the t range");

  out.t_n = t_grid[best];
  out.g_max = out.g_values[best];
  // parabolic refinement in log t around the discrete argmax
  if (best > 0 && best + 1 < t_grid.size() && std::isfinite(out.g_values[best - 1]) &&
      std::isfinite(out.g_values[best + 1])) {
    const double x0 = std::log(t_grid[best - 1]), x1 = std::log(t_grid[best]),
                 x2 = std::log(t_grid[best + 1]);
    const double y0 = out.g_values[best - 1], y1 = out.g_values[best], y2 = out.g_values[best + 1];
    const double d1 = (y1 - y0) / (x1 - x0), d2 = (y2 - y1) / (x2 - x1);
    const double curv = (d2 - d1) / (0.5 * (x2 - x0));
    if (curv < 0.0) {
      const double x_star = 0.5 * (x0 + x1) - d1 / curv;
      if (x_star > x0 && x_star < x2) {
        try {
          const double t_star = std::exp(x_star);
          const double g_star = g_at(t_star);
          if (g_star > out.g_max) {
            out.g_max = g_star;
            out.t_n = t_star;
          }
        } catch (const EnergyOverflow&) {
        }
      }
    }
  }

  if (model.exponential_growth()) {
    out.bound = mp_upper_bound(model.alpha, model.gamma0);
    out.margin = out.bound - out.g_max;
  } else {
    out.bound = std::numeric_limits<double>::quiet_NaN();
    out.margin = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

void write_moser_csv(std::ostream& out, const MoserScanResult& scan) {
  out << "t,g\n";
  out.precision(17);
  for (Eigen::Index k = 0; k < scan.t_values.size(); ++k)
    out << scan.t_values[k] << ',' << scan.g_values[k] << '\n';
}

}  // namespace choq
