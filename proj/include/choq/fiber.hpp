#pragma once

#include "choq/energy.hpp"

#include <iosfwd>
#include <optional>

namespace choq {

class ProjectionFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MonotonicityViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Energy along the mass-preserving fiber H(u,s) = e^s u(e^s .), evaluated
/// through the closed form: only the amplitude is scaled, no interpolation.
double jtilde(const RadialGrid& grid, const RieszKernelMatrix& kernel,
              const NonlinearityModel& model, const Eigen::Ref<const Vector>& u, double s);

/// Pohozaev functional of H(u,s) via the same closed form; equals the
/// s-derivative of jtilde.
double pohozaev_scaled(const RadialGrid& grid, const RieszKernelMatrix& kernel,
                       const NonlinearityModel& model, const Eigen::Ref<const Vector>& u,
                       double s);

/// Unique fiber maximum: the scaling s* with P(H(u,s*)) = 0, found by
/// bracket expansion from [-1,1] (capped at [-20,20]) and bisection down to
/// |P| < tol * e^(2 s*) |grad u|^2.  A sign pattern with more than one
/// change across the bracket raises MonotonicityViolation.
double project_pohozaev(const RadialGrid& grid, const RieszKernelMatrix& kernel,
                        const NonlinearityModel& model, const Eigen::Ref<const Vector>& u,
                        double tol = 1e-11);

/// Spatially realized H(u,s) by linear interpolation on the source grid.
Vector scale_field(const RadialGrid& grid, const Eigen::Ref<const Vector>& u, double s);

struct FiberScan {
  Vector s_values;
  Vector jtilde_values;
  Vector pohozaev_values;
  std::optional<double> root;
};

FiberScan scan_fiber(const RadialGrid& grid, const RieszKernelMatrix& kernel,
                     const NonlinearityModel& model, const Eigen::Ref<const Vector>& u,
                     double s_min, double s_max, int count);

void write_fiber_csv(std::ostream& out, const FiberScan& scan);

}  // namespace choq
