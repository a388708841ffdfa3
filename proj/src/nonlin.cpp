#include "choq/nonlin.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace choq {

namespace {

double quiet_nan() { return std::numeric_limits<double>::quiet_NaN(); }

// log of the exponential branch of f, defined for gamma0 s^2 > 1
double log_f_exp_branch(double beta0, double gamma0, double s) {
  const double e = gamma0 * s * s;
  return std::log(beta0) + std::log(e - 1.0) + e - std::log(gamma0 * s * s * s);
}

// sign of s^(sigma-1) - beta0 (gamma0 s^2-1) e^(gamma0 s^2)/(gamma0 s^3),
// evaluated in log space to survive huge exponents
double matching_gap(double sigma, double gamma0, double beta0, double s) {
  return (sigma - 1.0) * std::log(s) - log_f_exp_branch(beta0, gamma0, s);
}

}  // namespace

double solve_matching(double sigma, double gamma0, double beta0, double alpha) {
  if (!(gamma0 > 0.0) || !(beta0 > 0.0))
    throw std::invalid_argument("solve_matching: gamma0 and beta0 must be positive");
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("solve_matching: alpha must lie in (0,2)");
  if (!(sigma > 1.0)) throw std::invalid_argument("solve_matching: sigma must exceed 1");

  const double root_gamma = std::sqrt(gamma0);
  const double lo = (1.0 + 1e-9) / root_gamma;
  double hi = 10.0 / root_gamma;
  const double cap = 1e6 / root_gamma;
  while (matching_gap(sigma, gamma0, beta0, hi) > 0.0) {
    hi *= 2.0;
    if (hi > cap) throw std::runtime_error("solve_matching: no matching point below bracket cap");
  }

  // largest root: walk from the right until the gap turns positive
  const int scan = 4096;
  double a = lo, b = hi;
  bool found = false;
  double prev = hi;
  for (int k = 1; k <= scan; ++k) {
    const double x = hi - (hi - lo) * static_cast<double>(k) / scan;
    if (matching_gap(sigma, gamma0, beta0, x) > 0.0) {
      a = x;
      b = prev;
      found = true;
      break;
    }
    prev = x;
  }
  if (!found) throw std::runtime_error("solve_matching: no matching point found in bracket");

  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (matching_gap(sigma, gamma0, beta0, mid) > 0.0)
      a = mid;
    else
      b = mid;
    if (b - a < 1e-13 * a) break;
  }
  return 0.5 * (a + b);
}

double NonlinearityModel::ruf_constant() const {
  switch (variant) {
    case NonlinVariant::ExpCritical: return beta0;
    case NonlinVariant::ExpPower: return 2.0 * gamma0 * matching_coef;
    case NonlinVariant::Power: return 0.0;
  }
  return 0.0;
}

std::string NonlinearityModel::name() const {
  std::ostringstream s;
  switch (variant) {
    case NonlinVariant::ExpCritical:
      s << "exp-critical(sigma=" << sigma << ",gamma0=" << gamma0 << ",beta0=" << beta0
        << ",alpha=" << alpha << ")";
      break;
    case NonlinVariant::Power: s << "power(p=" << p << ",alpha=" << alpha << ")"; break;
    case NonlinVariant::ExpPower:
      s << "exp-power(p=" << p << ",q=" << q << ",gamma0=" << gamma0 << ",s0=" << s0
        << ",alpha=" << alpha << ")";
      break;
  }
  return s.str();
}

NonlinearityModel make_exp_critical(double sigma, double gamma0, double beta0, double alpha) {
  NonlinearityModel m;
  m.variant = NonlinVariant::ExpCritical;
  m.alpha = alpha;
  m.sigma = sigma;
  m.gamma0 = gamma0;
  m.beta0 = beta0;
  m.s0 = solve_matching(sigma, gamma0, beta0, alpha);
  return m;
}

NonlinearityModel make_power(double p, double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("make_power: alpha must lie in (0,2)");
  if (!(p > 2.0 + 0.5 * alpha))
    throw std::invalid_argument("make_power: p must exceed 2 + alpha/2 (mass-supercritical)");
  NonlinearityModel m;
  m.variant = NonlinVariant::Power;
  m.alpha = alpha;
  m.p = p;
  return m;
}

NonlinearityModel make_exp_power(double p, double q, double gamma0, double s0, double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("make_exp_power: alpha must lie in (0,2)");
  if (!(p > 2.0 + 0.5 * alpha))
    throw std::invalid_argument("make_exp_power: p must exceed 2 + alpha/2");
  if (!(q <= 2.0)) throw std::invalid_argument("make_exp_power: q must not exceed 2");
  if (!(gamma0 > 0.0)) throw std::invalid_argument("make_exp_power: gamma0 must be positive");
  const double s0_min = std::sqrt(std::max(p + q, 0.0) / (2.0 * gamma0));
  if (!(s0 > s0_min))
    throw std::invalid_argument("make_exp_power: s0 must exceed sqrt(max(p+q,0)/(2 gamma0))");
  NonlinearityModel m;
  m.variant = NonlinVariant::ExpPower;
  m.alpha = alpha;
  m.p = p;
  m.q = q;
  m.gamma0 = gamma0;
  m.s0 = s0;
  // continuity of f at s0 fixes B; F then carries the matching constant
  m.matching_coef = p * std::pow(s0, p + q) * std::exp(-gamma0 * s0 * s0) /
                    (2.0 * gamma0 * s0 * s0 - q);
  return m;
}

NonlinValue evaluate(const NonlinearityModel& m, double t) {
  NonlinValue v;
  if (t <= 0.0) return v;
  const double half_alpha_factor = 0.5 * (2.0 + m.alpha);
  const double lt = std::log(t);

  switch (m.variant) {
    case NonlinVariant::Power: {
      if (m.p * lt > kOverflowExponent) {
        v.overflow = true;
        v.log_f = (m.p - 1.0) * lt;
        v.log_F = m.p * lt - std::log(m.p);
        v.f = v.F = v.Ftilde = quiet_nan();
        return v;
      }
      v.f = std::pow(t, m.p - 1.0);
      v.F = std::pow(t, m.p) / m.p;
      v.log_f = (m.p - 1.0) * lt;
      v.log_F = m.p * lt - std::log(m.p);
      break;
    }
    case NonlinVariant::ExpCritical: {
      if (t < m.s0) {
        v.f = std::pow(t, m.sigma - 1.0);
        v.F = std::pow(t, m.sigma) / m.sigma;
        v.log_f = (m.sigma - 1.0) * lt;
        v.log_F = m.sigma * lt - std::log(m.sigma);
      } else {
        const double e = m.gamma0 * t * t;
        v.log_f = log_f_exp_branch(m.beta0, m.gamma0, t);
        v.log_F = std::log(0.5 * m.beta0 / m.gamma0) + e - 2.0 * lt;
        if (e > kOverflowExponent) {
          v.overflow = true;
          v.f = v.F = v.Ftilde = quiet_nan();
          return v;
        }
        const double ee = std::exp(e);
        const double e0 = m.gamma0 * m.s0 * m.s0;
        v.f = m.beta0 * (e - 1.0) * ee / (m.gamma0 * t * t * t);
        v.F = std::pow(m.s0, m.sigma) / m.sigma +
              0.5 * m.beta0 / m.gamma0 * (ee / (t * t) - std::exp(e0) / (m.s0 * m.s0));
        v.log_F = std::log(v.F);
      }
      break;
    }
    case NonlinVariant::ExpPower: {
      if (t < m.s0) {
        v.f = m.p * std::pow(t, m.p - 1.0);
        v.F = std::pow(t, m.p);
        v.log_f = std::log(m.p) + (m.p - 1.0) * lt;
        v.log_F = m.p * lt;
      } else {
        const double e = m.gamma0 * t * t;
        v.log_f = std::log(m.matching_coef) + std::log(2.0 * e - m.q) + e - (m.q + 1.0) * lt;
        v.log_F = std::log(m.matching_coef) + e - m.q * lt;
        if (e > kOverflowExponent) {
          v.overflow = true;
          v.f = v.F = v.Ftilde = quiet_nan();
          return v;
        }
        const double ee = std::exp(e);
        const double e0 = m.gamma0 * m.s0 * m.s0;
        v.f = m.matching_coef * ee * (2.0 * e - m.q) / std::pow(t, m.q + 1.0);
        v.F = std::pow(m.s0, m.p) +
              m.matching_coef * (ee / std::pow(t, m.q) - std::exp(e0) / std::pow(m.s0, m.q));
        v.log_F = std::log(v.F);
      }
      break;
    }
  }
  v.Ftilde = v.f * t - half_alpha_factor * v.F;
  return v;
}

bool AssumptionReport::all_passed() const {
  for (const auto& c : checks)
    if (c.status == CheckStatus::Fail) return false;
  return true;
}

const AssumptionCheck* AssumptionReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

void require_sorted(const std::vector<double>& grid, const char* who) {
  if (grid.empty()) throw std::invalid_argument(std::string(who) + ": empty sample grid");
  for (size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0)) throw std::invalid_argument(std::string(who) + ": samples must be positive");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw std::invalid_argument(std::string(who) + ": sample grid not sorted strictly increasing");
  }
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

}  // namespace

AssumptionReport check_assumptions(const NonlinearityModel& m, const std::vector<double>& t_small,
                                   const std::vector<double>& t_large, const CheckTolerances& tol) {
  require_sorted(t_small, "check_assumptions");
  require_sorted(t_large, "check_assumptions");
  AssumptionReport report;
  const bool exp_growth = m.exponential_growth();

  // (f0) vanishing on the nonpositive axis: structural, verified pointwise
  {
    AssumptionCheck c{"f0", CheckStatus::Pass, 0.0, "f(t)=0 for t<=0"};
    for (double t : {-1.0, -1e-8, 0.0}) {
      const NonlinValue v = evaluate(m, t);
      if (v.f != 0.0 || v.F != 0.0) {
        c.status = CheckStatus::Fail;
        c.witness = v.f;
      }
    }
    report.checks.push_back(c);
  }

  // (f1) f(t) = o(t^(1+alpha/2)) at 0+
  {
    AssumptionCheck c{"f1", CheckStatus::Pass, 0.0, ""};
    std::vector<double> ratio(t_small.size());
    for (size_t i = 0; i < t_small.size(); ++i)
      ratio[i] = evaluate(m, t_small[i]).f / std::pow(t_small[i], 1.0 + 0.5 * m.alpha);
    c.witness = ratio.front();
    if (!(ratio.front() < tol.small_limit)) c.status = CheckStatus::Fail;
    for (size_t i = 0; i + 1 < ratio.size(); ++i)
      if (ratio[i] > ratio[i + 1] * (1.0 + 1e-12) + 1e-300) c.status = CheckStatus::Fail;
    c.detail = "f/t^(1+a/2) at t=" + fmt(t_small.front()) + " is " + fmt(c.witness);
    report.checks.push_back(c);
  }

  // (f2) critical exponential growth of order gamma0
  {
    AssumptionCheck c{"f2", CheckStatus::Pass, 0.0, ""};
    if (!exp_growth) {
      c.status = CheckStatus::NotApplicable;
      c.detail = "power-law model has no exponential growth";
    } else {
      const double t = t_large.back();
      const NonlinValue v = evaluate(m, t);
      const double above = std::exp(v.log_f - 1.1 * m.gamma0 * t * t);
      const double below = std::exp(v.log_f - 0.9 * m.gamma0 * t * t);
      c.witness = above;
      if (!(above < tol.asymptotic && below > 1.0 / tol.asymptotic)) c.status = CheckStatus::Fail;
      c.detail = "f e^{-1.1 g t^2}=" + fmt(above) + ", f e^{-0.9 g t^2}=" + fmt(below);
    }
    report.checks.push_back(c);
  }

  // (f3) Ambrosetti-Rabinowitz: mu > 2+alpha/2 and mu F <= f t with F > 0
  {
    AssumptionCheck c{"f3", CheckStatus::Pass, 0.0, ""};
    const double mu = m.mu();
    const double mu_margin = mu - (2.0 + 0.5 * m.alpha);
    double worst = std::numeric_limits<double>::infinity();
    for (const auto* grid : {&t_small, &t_large})
      for (double t : *grid) {
        const NonlinValue v = evaluate(m, t);
        if (v.overflow) continue;
        if (!(v.F > 0.0)) {
          worst = std::min(worst, -1.0);
          continue;
        }
        const double gap = (v.f * t - mu * v.F) / std::max(v.f * t, 1e-300);
        worst = std::min(worst, gap);
      }
    if (!(mu_margin > 0.0)) {
      c.status = CheckStatus::Fail;
      c.witness = mu_margin;
      c.detail = "mu - (2+alpha/2) = " + fmt(mu_margin) + " is not positive";
    } else if (!(worst >= -tol.identity)) {
      c.status = CheckStatus::Fail;
      c.witness = worst;
      c.detail = "min (f t - mu F)/(f t) = " + fmt(worst);
    } else {
      c.witness = worst;
      c.detail = "mu margin " + fmt(mu_margin) + ", min relative gap " + fmt(worst);
    }
    report.checks.push_back(c);
  }

  // (f4) F/(f t) -> 0 at infinity
  {
    AssumptionCheck c{"f4", CheckStatus::Pass, 0.0, ""};
    std::vector<double> quot;
    for (double t : t_large) {
      const NonlinValue v = evaluate(m, t);
      if (!v.overflow && v.f > 0.0) quot.push_back(v.F / (v.f * t));
    }
    const size_t tail = std::min<size_t>(5, quot.size());
    c.witness = quot.back();
    bool ok = quot.back() < 0.05;
    for (size_t i = quot.size() - tail; i + 1 < quot.size(); ++i)
      if (quot[i] < quot[i + 1] * (1.0 - 1e-12)) ok = false;
    if (!ok) c.status = CheckStatus::Fail;
    c.detail = "F/(f t) at t=" + fmt(t_large.back()) + " is " + fmt(c.witness);
    report.checks.push_back(c);
  }

  // (f5) t f(t) e^{-gamma0 t^2} bounded below by beta0
  {
    AssumptionCheck c{"f5", CheckStatus::Pass, 0.0, ""};
    if (!exp_growth) {
      c.status = CheckStatus::NotApplicable;
      c.detail = "power-law model: limit is 0, no Ruf constant";
    } else {
      const double t = t_large.back();
      const NonlinValue v = evaluate(m, t);
      const double ratio = std::exp(std::log(t) + v.log_f - m.gamma0 * t * t);
      c.witness = ratio;
      if (!(ratio >= m.ruf_constant() * (1.0 - tol.asymptotic))) c.status = CheckStatus::Fail;
      c.detail = "t f e^{-g t^2} = " + fmt(ratio) + " vs beta0 = " + fmt(m.ruf_constant());
    }
    report.checks.push_back(c);
  }

  // (f6) Ftilde nondecreasing on (0, inf)
  {
    AssumptionCheck c{"f6", CheckStatus::Pass, 0.0, ""};
    std::vector<double> ts;
    ts.insert(ts.end(), t_small.begin(), t_small.end());
    ts.insert(ts.end(), t_large.begin(), t_large.end());
    std::sort(ts.begin(), ts.end());
    double prev = -std::numeric_limits<double>::infinity();
    for (double t : ts) {
      const NonlinValue v = evaluate(m, t);
      if (v.overflow) break;
      if (v.Ftilde < prev - tol.identity * std::max(std::abs(prev), 1.0)) {
        c.status = CheckStatus::Fail;
        c.witness = v.Ftilde - prev;
        c.detail = "Ftilde decreases near t=" + fmt(t);
      }
      prev = v.Ftilde;
    }
    if (c.status == CheckStatus::Pass) c.detail = "nondecreasing over " + fmt(double(ts.size())) + " samples";
    report.checks.push_back(c);
  }

  // (F_Ruf) derived bound F t^2 e^{-gamma0 t^2} >= beta0/(2 gamma0)
  {
    AssumptionCheck c{"F_Ruf", CheckStatus::Pass, 0.0, ""};
    if (!exp_growth) {
      c.status = CheckStatus::NotApplicable;
      c.detail = "power-law model";
    } else {
      const double t = t_large.back();
      const NonlinValue v = evaluate(m, t);
      const double ratio = std::exp(v.log_F + 2.0 * std::log(t) - m.gamma0 * t * t);
      const double target = 0.5 * m.ruf_constant() / m.gamma0;
      c.witness = ratio;
      if (!(ratio >= target * (1.0 - tol.asymptotic))) c.status = CheckStatus::Fail;
      c.detail = "F t^2 e^{-g t^2} = " + fmt(ratio) + " vs beta0/(2 gamma0) = " + fmt(target);
    }
    report.checks.push_back(c);
  }

  return report;
}

}  // namespace choq
