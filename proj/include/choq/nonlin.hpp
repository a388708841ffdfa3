#pragma once

#include <limits>
#include <string>
#include <vector>

namespace choq {

enum class NonlinVariant { ExpCritical, Power, ExpPower };

/// Nonlinearity families: the exponential-critical model
///   f(s) = s^(sigma-1)                                    on (0, s0)
///   f(s) = beta0 (gamma0 s^2 - 1) e^(gamma0 s^2)/(gamma0 s^3)  on [s0, inf)
/// with s0 the continuity matching point, a pure-power oracle f = t^(p-1),
/// and a second exponential family with F = s^p below s0 and
/// F ~ B e^(gamma0 s^2)/s^q above.  F is always the exact antiderivative
/// of f, and Ftilde(t) = f(t) t - (2+alpha)/2 F(t).
struct NonlinearityModel {
  NonlinVariant variant = NonlinVariant::ExpCritical;
  double alpha = 1.0;
  double sigma = 4.0;
  double gamma0 = 1.0;
  double beta0 = 1.0;
  double s0 = 0.0;
  double p = 4.0;
  double q = 2.0;
  double matching_coef = 0.0;  // B of the exp-power family

  double mu() const { return variant == NonlinVariant::ExpCritical ? sigma : p; }
  bool exponential_growth() const { return variant != NonlinVariant::Power; }
  /// Asymptote of t f(t) e^(-gamma0 t^2); the de Figueiredo-Miyagaki-Ruf constant.
  double ruf_constant() const;
  std::string name() const;
};

NonlinearityModel make_exp_critical(double sigma, double gamma0, double beta0, double alpha);
NonlinearityModel make_power(double p, double alpha);
NonlinearityModel make_exp_power(double p, double q, double gamma0, double s0, double alpha);

/// Root of s^(sigma-1) = beta0 (gamma0 s^2 - 1) e^(gamma0 s^2)/(gamma0 s^3)
/// on (1/sqrt(gamma0), inf); the largest root in the expanded bracket.
double solve_matching(double sigma, double gamma0, double beta0, double alpha);

struct NonlinValue {
  double f = 0.0;
  double F = 0.0;
  double Ftilde = 0.0;
  bool overflow = false;
  // natural-log magnitudes, valid whenever the quantity is positive
  double log_f = -std::numeric_limits<double>::infinity();
  double log_F = -std::numeric_limits<double>::infinity();
};

/// Amplitudes with gamma0 t^2 beyond the overflow threshold come back as a
/// flagged sentinel carrying only log magnitudes; energy evaluation refuses
/// to consume sentinels.
NonlinValue evaluate(const NonlinearityModel& model, double t);

constexpr double kOverflowExponent = 700.0;

enum class CheckStatus { Pass, Fail, NotApplicable };

struct AssumptionCheck {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  double witness = 0.0;
  std::string detail;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;
  bool all_passed() const;
  const AssumptionCheck* find(const std::string& name) const;
};

struct CheckTolerances {
  double identity = 1e-9;    // slack on pointwise identities and monotonicity
  double small_limit = 1e-6; // limit threshold for the behaviour at 0
  double asymptotic = 1e-2;  // slack on finite-sample limits at infinity
};

/// Sampled audit of the growth assumptions on f: behaviour at 0, critical
/// exponential growth, Ambrosetti-Rabinowitz, the compactness quotient
/// F/(f t), the Ruf lower bound, monotonicity of Ftilde, and the derived
/// bound on F t^2 e^(-gamma0 t^2).
AssumptionReport check_assumptions(const NonlinearityModel& model,
                                   const std::vector<double>& t_small,
                                   const std::vector<double>& t_large,
                                   const CheckTolerances& tol = {});

}  // namespace choq
