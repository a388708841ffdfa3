#pragma once

#include "choq/fiber.hpp"

#include <string>
#include <vector>

namespace choq {

enum class Profile { Gaussian, Tent };

Profile parse_profile(const std::string& name);
std::string profile_name(Profile profile);

struct SolverConfig {
  double mass = 1.0;
  double step = 0.5;
  double tol_grad = 1e-5;
  double tol_pohozaev = 1e-4;
  int max_iter = 5000;
  Profile profile = Profile::Gaussian;
  double armijo_factor = 0.5;
  double armijo_c = 1e-4;
  double projection_tol = 1e-11;
  // inverse-Helmholtz smoothing of the descent direction; the raw L2
  // gradient needs O(1/h^2) iterations and is kept as a fallback
  bool h1_precondition = true;
};

struct IterationRecord {
  int iter = 0;
  double energy = 0.0;
  double pohozaev_rel = 0.0;
  double grad_rel = 0.0;
  double step = 0.0;
  // true when this iterate was produced by re-centering the fiber gauge
  // (spatial realization of H(u,s*)) rather than by an Armijo step
  bool rescaled = false;
};

struct SolveResult {
  Vector field;
  double lambda = 0.0;
  EnergyBreakdown energy;
  int iterations = 0;
  bool converged = false;
  std::string diagnostic;
  std::vector<IterationRecord> history;
};

Vector initial_guess(const RadialGrid& grid, double a, Profile profile);

/// Minimise the reduced functional E(v) = max_s Jtilde(v,s) over the radial
/// mass sphere: project onto the Pohozaev manifold along the fiber, descend
/// along the sphere-tangential gradient with Armijo backtracking, keep the
/// positive part, renormalise the mass.
SolveResult minimize_reduced(const SolverConfig& config, const RadialGrid& grid,
                             const RieszKernelMatrix& kernel, const NonlinearityModel& model);

struct VerificationCheck {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  double observed = 0.0;
  double bound = 0.0;
  std::string detail;
};

struct VerificationReport {
  std::vector<VerificationCheck> checks;
  bool all_passed() const;
  const VerificationCheck* find(const std::string& name) const;
};

/// Post-solve audit: Pohozaev residual, Euler-Lagrange residual, the
/// frequency window, the gradient-norm bound, interior positivity, and the
/// mountain-pass level ceiling.
VerificationReport verify_solution(const SolveResult& result, const RadialGrid& grid,
                                   const RieszKernelMatrix& kernel, const NonlinearityModel& model,
                                   const SolverConfig& config);

}  // namespace choq
