#pragma once

#include "choq/energy.hpp"

#include <iosfwd>

namespace choq {

class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ScanOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Normalised log-plateau profile: sqrt(log n)/sqrt(2 pi) inside r <= 1/n,
/// log(1/r)/sqrt(2 pi log n) on (1/n, 1), zero beyond.  Its Dirichlet energy
/// is exactly 1 in the continuum for every n.
Vector moser_field(const RadialGrid& grid, int n);

/// moser_field rescaled to mass exactly a.
Vector normalized_moser(const RadialGrid& grid, int n, double a);

struct MoserScanResult {
  int n = 0;
  Vector t_values;
  Vector g_values;  // NaN where the amplitude overflowed
  double t_n = 0.0;
  double g_max = 0.0;
  double bound = 0.0;
  double margin = 0.0;
};

/// Scan of g_n(t) = t^2/2 |grad w_n|^2 - t^-(2+alpha)/2 int (I_a*F(t w_n)) F(t w_n)
/// with a parabolic refinement of the maximum in log t.
MoserScanResult g_scan(const RadialGrid& grid, const RieszKernelMatrix& kernel,
                       const NonlinearityModel& model, int n, double a,
                       const Eigen::Ref<const Vector>& t_grid);

/// The mountain-pass ceiling (2+alpha) pi / (2 gamma0).
double mp_upper_bound(double alpha, double gamma0);

Vector log_spaced(double lo, double hi, int count);

void write_moser_csv(std::ostream& out, const MoserScanResult& scan);

}  // namespace choq
