// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.  Tolerances are pinned in code next to each check.
#include "choq/cli.hpp"
#include "choq/moser.hpp"
#include "choq/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <vector>

using namespace choq;
namespace fs = std::filesystem;

namespace {

int failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] %2d. %s: %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

Vector sample(const RadialGrid& g, const std::function<double(double)>& f) {
  Vector u(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) u[i] = f(g.nodes[i]);
  return u;
}

// 1. convolve vs brute-force oracle: three smooth fields, three alphas
void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  const RadialGrid g = make_grid(256, 10.0, GridScheme::UniformMidpoint);
  const std::vector<std::pair<const char*, std::function<double(double)>>> fields = {
      {"gaussian", [](double r) { return std::exp(-r * r); }},
      {"bump", [](double r) { return r < 2.0 ? std::pow(1.0 - 0.25 * r * r, 3) : 0.0; }},
      {"poly", [](double r) { return r < 3.0 ? std::pow(1.0 - r * r / 9.0, 2) : 0.0; }}};
  std::vector<double> radii;
  std::vector<Eigen::Index> idx;
  for (int k = 0; k < 9; ++k) {
    idx.push_back(g.size() * (2 * k + 1) / 18);
    radii.push_back(g.nodes[idx.back()]);
  }
  double worst = 0.0;
  std::string where;
  for (const double alpha : {0.5, 1.0, 1.5}) {
    const RieszKernelMatrix K = assemble_kernel(g, alpha);
    for (const auto& [name, f] : fields) {
      const Vector u = sample(g, f);
      const Vector conv = convolve(K, u);
      const std::vector<double> oracle = brute_force_oracle(g, u, alpha, radii);
      for (size_t k = 0; k < radii.size(); ++k) {
        const double rel = std::abs(conv[idx[k]] - oracle[k]) / std::abs(oracle[k]);
        if (rel > worst) {
          worst = rel;
          where = std::string(name) + " alpha=" + fmt(alpha);
        }
      }
    }
  }
  const double wall = seconds_since(t0);
  report(1, "riesz oracle equivalence", worst < 1e-3 && wall < 60.0,
         "max rel sup-error " + fmt(worst) + " (tol 1e-3, worst at " + where + "), " +
             fmt(wall) + " s (limit 60)");
}

// 2. dilation covariance of the convolution
void criterion_2() {
  const int n = 256;
  const double R = 10.0;
  const RadialGrid g1 = make_grid(n, R, GridScheme::UniformMidpoint);
  const Vector u = sample(g1, [](double r) { return std::exp(-r * r); });
  double worst = 0.0;
  for (const double lam : {0.5, 2.0}) {
    const RadialGrid g2 = make_grid(n, R / lam, GridScheme::UniformMidpoint);
    for (const double alpha : {0.7, 1.5}) {
      const Vector lhs = convolve(assemble_kernel(g2, alpha), u);
      const Vector rhs = convolve(assemble_kernel(g1, alpha), u);
      for (Eigen::Index i = n / 10; i < 6 * n / 10; ++i)
        worst = std::max(worst,
                         std::abs(lhs[i] - std::pow(lam, -alpha) * rhs[i]) /
                             std::abs(std::pow(lam, -alpha) * rhs[i]));
    }
  }
  report(2, "riesz scaling law", worst < 1e-3,
         "max rel error " + fmt(worst) + " at lambda in {0.5,2} (tol 1e-3)");
}

// 3. d/ds Jtilde = Pohozaev(H(u,s)) at second order
void criterion_3() {
  const RadialGrid g = make_grid(256, 10.0, GridScheme::UniformMidpoint);
  const RieszKernelMatrix K = assemble_kernel(g, 1.0);
  const NonlinearityModel m = make_exp_critical(4.0, 1.0, 1.0, 1.0);
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> sdist(-0.5, 0.5), wdist(0.4, 1.6), adist(0.5, 1.5),
      cdist(0.0, 1.0);
  double lo = 10.0, hi = 0.0;
  int checked = 0;
  for (int trial = 0; trial < 10; ++trial) {
    Vector u(g.size());
    const double a = adist(rng), w = wdist(rng), c = cdist(rng);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      const double r = g.nodes[i];
      u[i] = a * (1.0 + 0.3 * std::cos(c * r)) * std::exp(-w * r * r);
    }
    u = rescale_mass(g, u, 1.0);
    const double s = sdist(rng);
    auto fd = [&](double h) {
      return (jtilde(g, K, m, u, s + h) - jtilde(g, K, m, u, s - h)) / (2.0 * h);
    };
    const double target = pohozaev_scaled(g, K, m, u, s);
    const double e1 = std::abs(fd(1e-2) - target);
    const double e2 = std::abs(fd(5e-3) - target);
    if (e1 < 1e-10) continue;  // identity already at roundoff
    const double ratio = e1 / e2;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    ++checked;
  }
  report(3, "fiber derivative identity", checked >= 8 && lo >= 3.5 && hi <= 4.5,
         "step-halving ratios in [" + fmt(lo) + ", " + fmt(hi) + "] over " +
             std::to_string(checked) + " samples (need [3.5, 4.5])");
}

// 4. Moser norms at n = 1000 on the graded grid
void criterion_4() {
  const RadialGrid g = make_grid(4096, 1.0, GridScheme::Graded);
  const Vector w = moser_field(g, 1000);
  const double grad = grad_norm_sq(g, w);
  const double mass_law = 4.0 * std::log(1000.0) * std::pow(lp_norm(g, w, 2.0), 2);
  const bool pass = std::abs(grad - 1.0) < 1e-3 && mass_law > 0.9 && mass_law < 1.1;
  report(4, "moser norms", pass,
         "|grad w|^2 = 1 + " + fmt(grad - 1.0) + " (tol 1e-3), 4 log(n) |w|^2 = " +
             fmt(mass_law) + " (need (0.9, 1.1))");
}

// 5. mountain-pass level bound witnessed by a Moser path scan
void criterion_5() {
  const auto t0 = std::chrono::steady_clock::now();
  const NonlinearityModel m = make_exp_critical(4.0, 1.0, 1.0, 1.0);
  const Vector t_grid = log_spaced(0.01, 10.0, 81);
  const double bound = mp_upper_bound(1.0, 1.0);

  const RadialGrid g1 = make_grid(4096, 1.0, GridScheme::Graded);
  const RieszKernelMatrix k1 = assemble_kernel(g1, 1.0);
  double best_margin = -1e300;
  int best_n = 0;
  for (int n = 4; n <= 1024; n *= 2) {
    const MoserScanResult scan = g_scan(g1, k1, m, n, 1.0, t_grid);
    if (scan.margin > best_margin) {
      best_margin = scan.margin;
      best_n = n;
    }
  }
  // stability of the reported margin under N-doubling
  const RadialGrid g2 = make_grid(8192, 1.0, GridScheme::Graded);
  const RieszKernelMatrix k2 = assemble_kernel(g2, 1.0);
  const MoserScanResult refined = g_scan(g2, k2, m, best_n, 1.0, t_grid);
  const double drift = std::abs(refined.margin - best_margin) / std::abs(best_margin);

  // diagnostic when the scanned range holds no witness: the first index
  // with a positive margin may simply sit beyond it, so look further
  std::string beyond;
  if (best_margin <= 0.0) {
    for (const int n : {1536, 2048, 3072, 4096}) {
      const MoserScanResult scan = g_scan(g2, k2, m, n, 1.0, t_grid);
      if (scan.margin > 0.0) {
        beyond = "; first positive margin beyond the pinned range: n=" + std::to_string(n) +
                 " margin " + fmt(scan.margin) + " (N=8192)";
        break;
      }
    }
  }
  const double wall = seconds_since(t0);
  const bool pass = best_margin > 0.0 && drift < 0.2 && wall < 600.0;
  report(5, "mountain-pass level bound witness", pass,
         "best margin over n in {4,...,1024} is " + fmt(best_margin) + " at n=" +
             std::to_string(best_n) + " against bound " + fmt(bound) + ", refinement drift " +
             fmt(drift * 100.0) + "% (limit 20%), " + fmt(wall) + " s (limit 600)" + beyond);
}

// 6+7. reference solve: self-consistency and the two frequency formulas
void criteria_6_and_7() {
  const auto t0 = std::chrono::steady_clock::now();
  const RadialGrid g = make_grid(512, 12.0, GridScheme::Graded);
  const RieszKernelMatrix K = assemble_kernel(g, 1.0);
  const NonlinearityModel m = make_exp_critical(4.0, 1.0, 1.0, 1.0);
  SolverConfig cfg;
  cfg.tol_grad = 1e-6;
  const SolveResult res = minimize_reduced(cfg, g, K, m);
  const double wall = seconds_since(t0);

  const double mu = 4.0;
  const double grad_sq = 2.0 * res.energy.kinetic;
  const double el = el_residual(g, K, m, res.field, res.lambda).second;
  const double pohozaev_rel = std::abs(res.energy.pohozaev) / grad_sq;
  const double level_bound = 1.5 * M_PI;
  const double lambda_bound = 3.0 * M_PI;
  const double grad_bound = 2.0 * res.energy.J * (mu - 1.5) / (mu - 2.5) * (1.0 + 1e-3);
  double min_interior = 1e300;
  const double interior = g.r_max - 2.0 * (g.edges[g.size()] - g.edges[g.size() - 1]);
  for (Eigen::Index i = 0; i < g.size(); ++i)
    if (g.nodes[i] < interior) min_interior = std::min(min_interior, res.field[i]);

  const bool pass6 = res.converged && el < 1e-4 && pohozaev_rel < 1e-4 && min_interior > 0.0 &&
                     res.energy.J < level_bound && grad_sq <= grad_bound &&
                     res.lambda > 0.0 && res.lambda < lambda_bound && wall < 900.0;
  report(6, "solver self-consistency (reference model)", pass6,
         "converged=" + std::to_string(res.converged) + ", EL rel " + fmt(el) +
             " (tol 1e-4), |P|/|grad|^2 " + fmt(pohozaev_rel) + " (tol 1e-4), J = " +
             fmt(res.energy.J) + " < " + fmt(level_bound) + ", |grad|^2 = " + fmt(grad_sq) +
             " <= " + fmt(grad_bound) + ", lambda = " + fmt(res.lambda) + " in (0, " +
             fmt(lambda_bound) + "), min interior u = " + fmt(min_interior) + ", " + fmt(wall) +
             " s (limit 900)");

  const double lambda_diff =
      std::abs(res.lambda - res.energy.lambda_est) / std::abs(res.lambda);
  report(7, "two-formula lambda agreement", res.converged && lambda_diff < 1e-3,
         "multiplier " + fmt(res.lambda) + " vs Pohozaev " + fmt(res.energy.lambda_est) +
             ", rel diff " + fmt(lambda_diff) + " (tol 1e-3)");
}

// 8. refinement trend for the power oracle
void criterion_8() {
  const NonlinearityModel m = make_power(4.0, 1.0);
  SolverConfig cfg;
  cfg.tol_grad = 1e-6;
  auto solve_at = [&](Eigen::Index n) {
    const RadialGrid g = make_grid(n, 12.0, GridScheme::Graded);
    const RieszKernelMatrix K = assemble_kernel(g, 1.0);
    const SolveResult res = minimize_reduced(cfg, g, K, m);
    const double el = el_residual(g, K, m, res.field, res.lambda).second;
    return std::tuple<bool, double, double>(res.converged, res.energy.J, el);
  };
  const auto [ok1, j1, el1] = solve_at(256);
  const auto [ok2, j2, el2] = solve_at(512);
  const double jdiff = std::abs(j1 - j2) / std::abs(j2);
  const bool pass = ok1 && ok2 && jdiff < 0.01 && el2 < el1;
  report(8, "power-oracle refinement trend", pass,
         "J(256) = " + fmt(j1) + " vs J(512) = " + fmt(j2) + ", rel diff " + fmt(jdiff) +
             " (tol 1%), EL residual " + fmt(el1) + " -> " + fmt(el2) + " (must decrease)");
}

// 9. assumption audit: reference passes, sigma <= 2 + alpha/2 fails (f3)
void criterion_9() {
  auto grids = [](const NonlinearityModel& m) {
    const double cap = 0.999 * std::sqrt(kOverflowExponent / m.gamma0);
    const Vector lo = log_spaced(1e-6, m.s0 * 0.999, 200);
    const Vector hi = log_spaced(m.s0 * 1.001, cap, 200);
    return std::pair<std::vector<double>, std::vector<double>>({lo.begin(), lo.end()},
                                                               {hi.begin(), hi.end()});
  };
  const NonlinearityModel ref = make_exp_critical(4.0, 1.0, 1.0, 1.0);
  const auto [small_ref, large_ref] = grids(ref);
  const AssumptionReport good = check_assumptions(ref, small_ref, large_ref);
  bool ref_pass = true;
  for (const char* name : {"f1", "f2", "f3", "f4", "f5", "f6"})
    ref_pass = ref_pass && good.find(name)->status == CheckStatus::Pass;

  const NonlinearityModel broken = make_exp_critical(2.0, 1.0, 1.0, 1.0);
  const auto [small_bad, large_bad] = grids(broken);
  const AssumptionReport bad = check_assumptions(broken, small_bad, large_bad);
  const bool f3_fails = bad.find("f3")->status == CheckStatus::Fail;

  report(9, "assumption audit", ref_pass && f3_fails,
         std::string("reference passes (f1)-(f6): ") + (ref_pass ? "yes" : "no") +
             "; sigma=2 flags (f3): " + (f3_fails ? "yes" : "no") + " (witness " +
             fmt(bad.find("f3")->witness) + ")");
}

// 10. bit-identical summaries for identical runs
void criterion_10() {
  const fs::path out = fs::temp_directory_path() / "choq_acceptance_determinism";
  fs::remove_all(out);
  fs::create_directories(out);
  RunConfig cfg = parse_config({"solve", "--grid-n", "128", "--grid-r", "10",
                                "--grid-scheme", "uniform-midpoint", "--out", out.string()});
  auto slurp = [&] {
    std::ifstream in(out / "result.json");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  const int rc1 = run(cfg);
  const std::string first = slurp();
  const int rc2 = run(cfg);
  const std::string second = slurp();
  fs::remove_all(out);
  const bool pass = rc1 == 0 && rc2 == 0 && !first.empty() && first == second;
  report(10, "determinism", pass,
         "two identical runs, " + std::to_string(first.size()) + "-byte summaries " +
             (first == second ? "bit-identical" : "DIFFER"));
}

}  // namespace

int main() {
  std::printf("acceptance suite: planar Choquard normalized ground states\n");
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criteria_6_and_7();
  criterion_8();
  criterion_9();
  criterion_10();
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
