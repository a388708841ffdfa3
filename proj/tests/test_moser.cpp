#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "choq/fiber.hpp"
#include "choq/moser.hpp"

#include <cmath>
#include <sstream>

using namespace choq;

TEST_CASE("moser field matches its defining formula and support") {
  const RadialGrid g = make_grid(4096, 1.0, GridScheme::Graded);
  const int n = 10;
  const Vector w = moser_field(g, n);
  const double log_n = std::log(10.0);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double r = g.nodes[i];
    if (r <= 0.1)
      CHECK(w[i] == doctest::Approx(std::sqrt(log_n / (2.0 * M_PI))).epsilon(1e-14));
    else if (r < 1.0)
      CHECK(w[i] ==
            doctest::Approx(std::log(1.0 / r) / std::sqrt(2.0 * M_PI * log_n)).epsilon(1e-12));
    else
      CHECK(w[i] == 0.0);
  }
}

TEST_CASE("moser gradient norm is 1 for n=10 and n=100") {
  const RadialGrid g = make_grid(4096, 1.0, GridScheme::Graded);
  for (const int n : {10, 100})
    CHECK(grad_norm_sq(g, moser_field(g, n)) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("moser mass obeys the 1/(4 log n) law at n=1000") {
  const RadialGrid g = make_grid(4096, 1.0, GridScheme::Graded);
  const Vector w = moser_field(g, 1000);
  const double mass_sq = std::pow(lp_norm(g, w, 2.0), 2);
  const double scaled = 4.0 * std::log(1000.0) * mass_sq;
  CHECK(scaled > 0.9);
  CHECK(scaled < 1.1);
}

TEST_CASE("resolution guard rejects unresolvable plateaus") {
  const RadialGrid coarse = make_grid(64, 1.0, GridScheme::UniformMidpoint);
  CHECK_THROWS_AS(moser_field(coarse, 1000), ResolutionError);
  const RadialGrid small_r = make_grid(64, 0.5, GridScheme::UniformMidpoint);
  CHECK_THROWS_AS(moser_field(small_r, 4), std::invalid_argument);
  CHECK_THROWS_AS(moser_field(coarse, 1), std::invalid_argument);
}

TEST_CASE("normalized moser: exact mass, plateau value and gradient laws") {
  const RadialGrid g = make_grid(4096, 1.0, GridScheme::Graded);
  const int n = 1000;
  const double a = 1.0;
  const Vector w = normalized_moser(g, n, a);
  CHECK(lp_norm(g, w, 2.0) == doctest::Approx(a).epsilon(1e-12));
  const double log_n = std::log(1000.0);
  const double plateau_ratio = w[0] / (a * std::sqrt(2.0 / M_PI) * log_n);
  CHECK(plateau_ratio > 0.9);
  CHECK(plateau_ratio < 1.1);
  const double grad_ratio = grad_norm_sq(g, w) / (4.0 * a * a * log_n);
  CHECK(grad_ratio > 0.9);
  CHECK(grad_ratio < 1.1);
}

TEST_CASE("moser norm corrections shrink as n grows") {
  const RadialGrid g = make_grid(8192, 1.0, GridScheme::Graded);
  double prev = std::numeric_limits<double>::infinity();
  for (const int n : {10, 100, 1000}) {
    const Vector w = moser_field(g, n);
    const double mass_sq = std::pow(lp_norm(g, w, 2.0), 2);
    const double correction = std::abs(4.0 * std::log(double(n)) * mass_sq - 1.0);
    CHECK(correction < prev);
    prev = correction;
  }
}

TEST_CASE("mp_upper_bound formula and scalings") {
  CHECK(mp_upper_bound(1.0, 1.0) == doctest::Approx(1.5 * M_PI).epsilon(1e-14));
  CHECK(mp_upper_bound(1.0, 1.0) == doctest::Approx(4.712389).epsilon(1e-6));
  CHECK(mp_upper_bound(1.0, 2.0) == doctest::Approx(0.5 * mp_upper_bound(1.0, 1.0)).epsilon(1e-14));
  // alpha -> 0 boundary sanity: value tends to pi/gamma0
  CHECK(mp_upper_bound(1e-12, 1.0) == doctest::Approx(M_PI).epsilon(1e-9));
  CHECK_THROWS_AS(mp_upper_bound(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(mp_upper_bound(2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(mp_upper_bound(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("g_scan geometry, overflow handling and fiber consistency") {
  const RadialGrid g = make_grid(512, 1.0, GridScheme::Graded);
  const RieszKernelMatrix K = assemble_kernel(g, 1.0);
  const NonlinearityModel m = make_exp_critical(4.0, 1.0, 1.0, 1.0);
  const int n = 16;
  const double a = 1.0;
  const Vector t_grid = log_spaced(0.01, 10.0, 81);
  const MoserScanResult scan = g_scan(g, K, m, n, a, t_grid);

  CHECK(scan.bound == doctest::Approx(1.5 * M_PI).epsilon(1e-14));
  CHECK(scan.g_max > 0.0);
  // vanishing limit at t -> 0+
  CHECK(std::abs(scan.g_values[0]) < 1e-3 * scan.g_max);
  // negative tail at large in-range t (possibly before the overflow cut)
  bool negative_tail = false;
  for (Eigen::Index k = 0; k < scan.g_values.size(); ++k)
    if (std::isfinite(scan.g_values[k]) && scan.g_values[k] < 0.0) negative_tail = true;
  CHECK(negative_tail);
  // argmax dominates every finite sample
  for (Eigen::Index k = 0; k < scan.g_values.size(); ++k)
    if (std::isfinite(scan.g_values[k])) CHECK(scan.g_values[k] <= scan.g_max + 1e-12);
  CHECK(scan.margin == scan.bound - scan.g_max);

  // g_n(e^s) = Jtilde(w_n, s): the two code paths agree
  const Vector w = normalized_moser(g, n, a);
  for (const double s : {-1.0, -0.2, 0.4}) {
    const double via_fiber = jtilde(g, K, m, w, s);
    const double t = std::exp(s);
    const detail::NonlocalEval ne = detail::nonlocal_eval(g, K, m, t * w);
    const double via_g = 0.5 * t * t * grad_norm_sq(g, w) -
                         0.5 * std::pow(t, -(2.0 + m.alpha)) * ne.quad;
    CHECK(via_g == doctest::Approx(via_fiber).epsilon(1e-8));
  }
}

TEST_CASE("g_scan input validation") {
  const RadialGrid g = make_grid(512, 1.0, GridScheme::Graded);
  const RieszKernelMatrix K = assemble_kernel(g, 1.0);
  const NonlinearityModel m = make_exp_critical(4.0, 1.0, 1.0, 1.0);
  Vector bad(3);
  bad << 1.0, 0.5, 2.0;
  CHECK_THROWS_AS(g_scan(g, K, m, 16, 1.0, bad), std::invalid_argument);
}

TEST_CASE("moser scan csv shape") {
  const RadialGrid g = make_grid(512, 1.0, GridScheme::Graded);
  const RieszKernelMatrix K = assemble_kernel(g, 1.0);
  const NonlinearityModel m = make_exp_critical(4.0, 1.0, 1.0, 1.0);
  const MoserScanResult scan = g_scan(g, K, m, 8, 1.0, log_spaced(0.05, 5.0, 21));
  std::ostringstream out;
  write_moser_csv(out, scan);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,g");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 21);
}
