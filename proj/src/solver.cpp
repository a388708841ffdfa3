#include "choq/solver.hpp"

#include "choq/moser.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace choq {

Profile parse_profile(const std::string& name) {
  if (name == "gaussian") return Profile::Gaussian;
  if (name == "tent") return Profile::Tent;
  throw std::invalid_argument("unknown initial profile: " + name);
}

std::string profile_name(Profile profile) {
  return profile == Profile::Gaussian ? "gaussian" : "tent";
}

Vector initial_guess(const RadialGrid& grid, double a, Profile profile) {
  Vector u(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double r = grid.nodes[i];
    u[i] = profile == Profile::Gaussian ? std::exp(-r * r) : 1.0 - r / grid.r_max;
  }
  return rescale_mass(grid, u, a);
}

namespace {

double weighted_dot(const RadialGrid& grid, const Vector& x, const Vector& y) {
  return grid.weights.dot(x.cwiseProduct(y));
}

// solve (I - lap_fv) d = g by the Thomas algorithm; the operator is the
// exact Hessian of 0.5*(mass + grad_norm_sq), SPD in the weighted pairing
Vector helmholtz_solve(const RadialGrid& grid, const Vector& g) {
  const Eigen::Index n = grid.size();
  Vector diag(n), sub(n), sup(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double cell = (grid.edges[i + 1] - grid.edges[i]) * grid.nodes[i];
    double lo = 0.0, hi;
    if (i > 0) lo = grid.edges[i] / ((grid.nodes[i] - grid.nodes[i - 1]) * cell);
    if (i + 1 < n)
      hi = grid.edges[i + 1] / ((grid.nodes[i + 1] - grid.nodes[i]) * cell);
    else
      hi = grid.r_max / ((grid.r_max - grid.nodes[i]) * cell);
    sub[i] = -lo;
    sup[i] = i + 1 < n ? -hi : 0.0;
    diag[i] = 1.0 + lo + hi;
  }
  Vector c(n), d(n);
  c[0] = sup[0] / diag[0];
  d[0] = g[0] / diag[0];
  for (Eigen::Index i = 1; i < n; ++i) {
    const double m = diag[i] - sub[i] * c[i - 1];
    c[i] = sup[i] / m;
    d[i] = (g[i] - sub[i] * d[i - 1]) / m;
  }
  Vector x(n);
  x[n - 1] = d[n - 1];
  for (Eigen::Index i = n - 2; i >= 0; --i) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

struct ReducedEval {
  double s_star = 0.0;
  double energy = 0.0;
};

ReducedEval reduced_energy(const SolverConfig& config, const RadialGrid& grid,
                           const RieszKernelMatrix& kernel, const NonlinearityModel& model,
                           const Vector& u) {
  ReducedEval re;
  re.s_star = project_pohozaev(grid, kernel, model, u, config.projection_tol);
  re.energy = jtilde(grid, kernel, model, u, re.s_star);
  return re;
}

// Exact sphere-tangential gradient of the reduced functional at u: by the
// envelope theorem the fiber maximum contributes no s-derivative, so
// grad E = e^{2s} (-lap u) - e^{-(1+alpha)s} (I*F(e^s u)) f(e^s u), with the
// multiplier theta = -<grad E, u>/a^2.  Valid for any u, on or off the
// Pohozaev manifold.
struct TangentialGradient {
  Vector direction;  // grad E + theta u
  Vector linear;     // e^{2s}(-lap u) + theta u
  double theta = 0.0;
  double rel = 0.0;
  double pohozaev = 0.0;
  double kin = 0.0;
  double quad = 0.0;
};

TangentialGradient reduced_gradient(const RadialGrid& grid, const RieszKernelMatrix& kernel,
                                    const NonlinearityModel& model, const Vector& u, double s,
                                    double a2) {
  TangentialGradient out;
  const double amp = std::exp(s);
  const detail::NonlocalEval ne = detail::nonlocal_eval(grid, kernel, model, amp * u);
  out.kin = grad_norm_sq(grid, u);
  out.quad = ne.quad;
  const double shrink = std::exp(-(2.0 + model.alpha) * s);
  out.pohozaev = amp * amp * out.kin + (2.0 + model.alpha) * (0.5 * (shrink * ne.quad)) -
                 shrink * ne.coupling;
  const Vector neg_lap = -radial_laplacian_fv(grid, u);
  const Vector grad_e = amp * amp * neg_lap -
                        std::exp(-(1.0 + model.alpha) * s) * ne.conv.cwiseProduct(ne.little_f);
  out.theta = -grid.weights.dot(grad_e.cwiseProduct(u)) / a2;
  out.direction = grad_e + out.theta * u;
  out.linear = amp * amp * neg_lap + out.theta * u;
  const double denom = std::max(lp_norm(grid, out.linear, 2.0), 1e-300);
  out.rel = lp_norm(grid, out.direction, 2.0) / denom;
  return out;
}

void validate(const SolverConfig& config) {
  if (!(config.mass > 0.0)) throw std::invalid_argument("solver: mass must be positive");
  if (!(config.step > 0.0)) throw std::invalid_argument("solver: step must be positive");
  if (!(config.tol_grad > 0.0 && config.tol_pohozaev > 0.0 && config.projection_tol > 0.0))
    throw std::invalid_argument("solver: tolerances must be positive");
  if (config.max_iter < 1) throw std::invalid_argument("solver: max_iter must be >= 1");
  if (!(config.armijo_factor > 0.0 && config.armijo_factor < 1.0))
    throw std::invalid_argument("solver: armijo factor must lie in (0,1)");
  if (!(config.armijo_c > 0.0 && config.armijo_c < 1.0))
    throw std::invalid_argument("solver: armijo constant must lie in (0,1)");
}

}  // namespace

SolveResult minimize_reduced(const SolverConfig& config, const RadialGrid& grid,
                             const RieszKernelMatrix& kernel, const NonlinearityModel& model) {
  validate(config);
  const double a = config.mass;
  const double a2 = a * a;
  // realized iterates must sit close enough to the fiber origin that the
  // residual dilation factor e^{-(2+alpha)s} cannot pollute the reported
  // Euler-Lagrange residual
  const double s_gauge_tol = 1e-6;

  // feasibility cap on nodal amplitudes: beyond it the nonlocal quadrature
  // cannot be represented in doubles, and the continuum functional prices
  // such concentration at or above the Trudinger-Moser threshold anyway
  const double amp_cap =
      model.exponential_growth()
          ? std::sqrt(0.5 * kOverflowExponent / model.gamma0)
          : std::exp((0.5 * kOverflowExponent + std::log(model.p)) / model.p);

  SolveResult result;
  Vector u = initial_guess(grid, a, config.profile);
  ReducedEval re = reduced_energy(config, grid, kernel, model, u);
  double step = config.step;
  double lambda = 0.0;
  bool grad_converged = false;
  bool just_rescaled = false;
  int gauge_resets = 0;

  auto project_out = [&](Vector& x, const Vector& dir_vec) {
    const double nn = weighted_dot(grid, dir_vec, dir_vec);
    if (nn > 0.0) x -= (weighted_dot(grid, x, dir_vec) / nn) * dir_vec;
  };

  for (int it = 1; it <= config.max_iter; ++it) {
    result.iterations = it;
    TangentialGradient tg;
    try {
      tg = reduced_gradient(grid, kernel, model, u, re.s_star, a2);
    } catch (const EnergyOverflow& e) {
      result.diagnostic = std::string("energy-overflow: ") + e.what();
      break;
    }
    lambda = tg.theta;

    // The reduced energy is constant along the dilation fiber, so descent
    // and the convergence measure live in the gauge-fixed subspace
    // orthogonal to the sphere normal u and the discrete fiber tangent
    // tau = u + r u'.  The fiber component of the full gradient is the
    // Pohozaev residual, which the projection already controls; at the
    // gauge origin (s* = 0) it vanishes with it.
    Vector tau(grid.size());
    {
      const Eigen::Index n = grid.size();
      for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index lo = std::max<Eigen::Index>(0, i - 1);
        const Eigen::Index hi = std::min<Eigen::Index>(n - 1, i + 1);
        const double du = (u[hi] - u[lo]) / (grid.nodes[hi] - grid.nodes[lo]);
        tau[i] = u[i] + grid.nodes[i] * du;
      }
    }
    Vector tau_t = tau;
    project_out(tau_t, u);
    Vector g_fixed = tg.direction;
    project_out(g_fixed, tau_t);
    const double denom = std::max(lp_norm(grid, tg.linear, 2.0), 1e-300);
    const double rel = lp_norm(grid, g_fixed, 2.0) / denom;

    result.history.push_back(
        {it, re.energy, std::abs(tg.pohozaev) / tg.kin, rel, step, just_rescaled});
    just_rescaled = false;

    if (rel < config.tol_grad) {
      if (re.energy <= 0.0) {
        result.diagnostic = "trivial-branch: gradient vanished at nonpositive energy";
        break;
      }
      if (std::abs(re.s_star) <= s_gauge_tol) {
        grad_converged = true;
        break;
      }
      // shape converged but the representative sits away from the fiber
      // origin: re-center the gauge spatially and polish again.  Each reset
      // shrinks |s*| superlinearly (the reset error is O(h^2 |s*|)).
      if (++gauge_resets > 50) {
        result.diagnostic = "gauge-stall: fiber origin not reached";
        break;
      }
      try {
        u = rescale_mass(grid, scale_field(grid, u, re.s_star), a);
        re = reduced_energy(config, grid, kernel, model, u);
      } catch (const std::runtime_error& e) {
        result.diagnostic = std::string("gauge-reset-failed: ") + e.what();
        break;
      }
      just_rescaled = true;
      continue;
    }

    Vector dir;
    if (config.h1_precondition) {
      dir = helmholtz_solve(grid, g_fixed);
      project_out(dir, u);
      project_out(dir, tau_t);
      dir = -dir;
    } else {
      dir = -g_fixed;
    }
    const double decrease = weighted_dot(grid, g_fixed, dir);  // negative for descent

    bool accepted = false;
    Vector u_trial;
    ReducedEval re_trial;
    for (int trial = 0; trial < 64; ++trial) {
      try {
        u_trial = rescale_mass(grid, (u + step * dir).cwiseMax(0.0), a);
        if (u_trial.maxCoeff() <= amp_cap) {
          re_trial = reduced_energy(config, grid, kernel, model, u_trial);
          if (re_trial.energy <= re.energy + config.armijo_c * step * decrease) {
            accepted = true;
            break;
          }
        }
      } catch (const EnergyOverflow&) {
      } catch (const ProjectionFailed&) {
      } catch (const MonotonicityViolation&) {
      } catch (const std::domain_error&) {
      }
      step *= config.armijo_factor;
      if (step < 1e-16 * config.step) break;
    }
    if (!accepted) {
      result.diagnostic = "line-search-stalled";
      break;
    }
    u = u_trial;
    re = re_trial;
    step = std::min(step * 1.3, 10.0 * config.step);
  }

  result.field = u;
  result.lambda = lambda;
  result.energy = evaluate_energy(grid, kernel, model, u, a);

  const double grad_sq = 2.0 * result.energy.kinetic;
  const bool pohozaev_ok =
      std::abs(result.energy.pohozaev) < config.tol_pohozaev * std::max(grad_sq, 1e-300);
  result.converged = grad_converged && pohozaev_ok && result.energy.J > 0.0;
  if (result.diagnostic.empty()) {
    if (!grad_converged)
      result.diagnostic = "max-iterations";
    else if (!pohozaev_ok)
      result.diagnostic = "pohozaev-residual-above-tolerance";
    else if (result.energy.J <= 0.0)
      result.diagnostic = "trivial-branch: nonpositive energy";
    else
      result.diagnostic = "converged";
  }
  return result;
}

bool VerificationReport::all_passed() const {
  for (const auto& c : checks)
    if (c.status == CheckStatus::Fail) return false;
  return true;
}

const VerificationCheck* VerificationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

VerificationReport verify_solution(const SolveResult& result, const RadialGrid& grid,
                                   const RieszKernelMatrix& kernel, const NonlinearityModel& model,
                                   const SolverConfig& config) {
  if (!result.converged)
    throw std::logic_error("verify_solution: invalid state, result did not converge");
  VerificationReport report;
  const double a = config.mass;
  const double mu = model.mu();
  const double alpha = model.alpha;
  const EnergyBreakdown& e = result.energy;
  const double grad_sq = 2.0 * e.kinetic;

  {
    VerificationCheck c{"pohozaev", CheckStatus::Pass, std::abs(e.pohozaev) / grad_sq,
                        config.tol_pohozaev, ""};
    if (!(c.observed < c.bound)) c.status = CheckStatus::Fail;
    report.checks.push_back(c);
  }
  {
    VerificationCheck c{"el-residual", CheckStatus::Pass, 0.0, 1e-4, ""};
    c.observed = el_residual(grid, kernel, model, result.field, result.lambda).second;
    if (!(c.observed < c.bound)) c.status = CheckStatus::Fail;
    report.checks.push_back(c);
  }
  {
    VerificationCheck c{"lambda-range", CheckStatus::Pass, result.lambda, 0.0, ""};
    if (!model.exponential_growth()) {
      c.status = CheckStatus::NotApplicable;
      c.detail = "power model has no critical growth rate, bound needs gamma0";
    } else {
      c.bound = std::pow(2.0 + alpha, 2) * M_PI /
                (2.0 * model.gamma0 * a * a * (mu - (2.0 + 0.5 * alpha)));
      if (!(result.lambda > 0.0 && result.lambda < c.bound)) c.status = CheckStatus::Fail;
    }
    report.checks.push_back(c);
  }
  {
    VerificationCheck c{"gradient-bound", CheckStatus::Pass, grad_sq, 0.0, ""};
    const double numer = mu - 0.5 * (2.0 + alpha);
    const double denom = mu - (2.0 + 0.5 * alpha);
    c.bound = 2.0 * e.J * numer / denom * (1.0 + 1e-3);
    if (!(denom > 0.0 && e.J > 0.0 && grad_sq <= c.bound)) c.status = CheckStatus::Fail;
    report.checks.push_back(c);
  }
  {
    VerificationCheck c{"positivity", CheckStatus::Pass, 0.0, 0.0, ""};
    const Eigen::Index n = grid.size();
    const double last_cell = grid.edges[n] - grid.edges[n - 1];
    const double interior = grid.r_max - 2.0 * last_cell;
    double min_val = std::numeric_limits<double>::infinity();
    Eigen::Index min_at = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (result.field[i] < 0.0) {
        c.status = CheckStatus::Fail;
        min_at = i;
        min_val = result.field[i];
        break;
      }
      if (grid.nodes[i] < interior && result.field[i] < min_val) {
        min_val = result.field[i];
        min_at = i;
      }
    }
    if (!(min_val > 0.0)) c.status = CheckStatus::Fail;
    c.observed = min_val;
    std::ostringstream msg;
    msg << "minimum " << min_val << " at node " << min_at << " (r=" << grid.nodes[min_at] << ")";
    c.detail = msg.str();
    report.checks.push_back(c);
  }
  {
    VerificationCheck c{"level-bound", CheckStatus::Pass, e.J, 0.0, ""};
    if (!model.exponential_growth()) {
      c.status = CheckStatus::NotApplicable;
      c.detail = "mountain-pass ceiling needs gamma0";
    } else {
      c.bound = mp_upper_bound(alpha, model.gamma0);
      if (!(e.J < c.bound)) c.status = CheckStatus::Fail;
    }
    report.checks.push_back(c);
  }
  return report;
}

}  // namespace choq
