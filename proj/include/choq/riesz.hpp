#pragma once

#include "choq/grid.hpp"

#include <optional>
#include <string>
#include <vector>

namespace choq {

/// Normalisation constant of the planar Riesz kernel c/|x|^(2-alpha).
double riesz_constant(double alpha);

/// Dense cell-averaged realization of g -> I_alpha * g for radial g:
/// (I_alpha * g)(r_i) ~= sum_j k(i,j) g_j.  Entries are nonnegative and
/// satisfy the weighted symmetry k(i,j) w_i = k(j,i) w_j exactly, which
/// makes the discrete convolution self-adjoint under the grid pairing.
struct RieszKernelMatrix {
  double alpha = 0.0;
  double r_max = 0.0;
  GridScheme scheme = GridScheme::UniformMidpoint;
  Eigen::MatrixXd k;

  Eigen::Index size() const { return k.rows(); }
};

RieszKernelMatrix assemble_kernel(const RadialGrid& grid, double alpha);

Vector convolve(const RieszKernelMatrix& kernel, const Eigen::Ref<const Vector>& g);

struct OracleConfig {
  double eps = 1e-4;     // excluded ball radius around the singularity
  int gl_order = 8;      // Gauss-Legendre points per radial panel
  int n_theta = 256;     // angular samples
};

/// Direct 2D tensor quadrature of the Riesz convolution at the requested
/// radii, independent of the kernel-matrix path.  The singular ball of
/// radius eps is excluded and replaced by its analytic local value
/// c * g(r) * 2*pi*eps^alpha / alpha.
std::vector<double> brute_force_oracle(const RadialGrid& grid, const Eigen::Ref<const Vector>& g,
                                       double alpha, const std::vector<double>& eval_radii,
                                       const OracleConfig& cfg = {});

/// Binary kernel cache: 16-byte header "RIESZK1\0" + u64 row count,
/// then little-endian f64 payload (alpha, r_max, scheme, row-major matrix).
void save_kernel(const std::string& path, const RieszKernelMatrix& kernel);
std::optional<RieszKernelMatrix> load_kernel(const std::string& path, const RadialGrid& grid,
                                             double alpha);

/// Cache-aware assembly: results are bit-identical with and without cache.
RieszKernelMatrix assemble_kernel_cached(const RadialGrid& grid, double alpha,
                                         const std::string& cache_dir);

namespace detail {
/// Angular reduction of the kernel: integral over the circle of
/// |x-y|^(alpha-2) at |x| = r, |y| = s (without the Riesz constant).
double angular_kernel_factor(double alpha, double r, double s);
}  // namespace detail

}  // namespace choq
