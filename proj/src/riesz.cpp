#include "choq/riesz.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

namespace choq {

static void check_alpha(double alpha, const char* who) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument(std::string(who) + ": alpha must lie in (0,2)");
}

double riesz_constant(double alpha) {
  check_alpha(alpha, "riesz_constant");
  return std::tgamma(0.5 * (2.0 - alpha)) /
         (std::pow(2.0, alpha) * M_PI * std::tgamma(0.5 * alpha));
}

namespace {

struct GaussRule {
  std::vector<double> x, w;
};

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration, cached per order.
const GaussRule& gauss_rule(int n) {
  static std::mutex mu;
  static std::vector<GaussRule> cache(64);
  std::lock_guard<std::mutex> lock(mu);
  GaussRule& rule = cache.at(static_cast<size_t>(n));
  if (!rule.x.empty()) return rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.x[i] = -x;
    rule.x[n - 1 - i] = x;
    rule.w[i] = rule.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

double agm(double a, double b) {
  // quadratic convergence; the cap guards the 1-ulp oscillation plateau
  for (int it = 0; it < 60 && std::abs(a - b) > 4e-16 * a; ++it) {
    const double m = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = m;
  }
  return 0.5 * (a + b);
}

// 2F1(a,a;1;z), defining series; z bounded away from 1.
double hyp2f1_diag(double a, double z) {
  double sum = 1.0, term = 1.0;
  for (int m = 1; m < 500; ++m) {
    const double f = (a + m - 1.0) / m;
    term *= f * f * z;
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

// 2F1(a,a;c;w) series.
double hyp2f1_series(double a, double c, double w) {
  double sum = 1.0, term = 1.0;
  for (int m = 1; m < 500; ++m) {
    const double f = (a + m - 1.0);
    term *= f * f / ((c + m - 1.0) * m) * w;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// Angular reduction of the planar Riesz kernel.  For radii r, s the circle
// integral of |x-y|^(alpha-2) equals 2*pi*r_>^(alpha-2) 2F1(a,a;1;(r_</r_>)^2)
// with a = (2-alpha)/2.  Near the diagonal the Gauss connection formula
// splits off the (1-z)^(alpha-1) branch; alpha = 1 reduces to the complete
// elliptic integral K evaluated by the AGM.
struct AngularEvaluator {
  double alpha;
  bool elliptic;
  double a;
  double conn_p = 0.0;  // Gamma(alpha-1)/Gamma(alpha/2)^2
  double conn_q = 0.0;  // Gamma(1-alpha)/Gamma((2-alpha)/2)^2

  explicit AngularEvaluator(double alpha_)
      : alpha(alpha_), elliptic(std::abs(alpha_ - 1.0) < 1e-9), a(0.5 * (2.0 - alpha_)) {
    if (!elliptic) {
      conn_p = std::tgamma(alpha - 1.0) / std::pow(std::tgamma(0.5 * alpha), 2);
      conn_q = std::tgamma(1.0 - alpha) / std::pow(std::tgamma(a), 2);
    }
  }

  double operator()(double r, double s) const {
    const double hi = std::max(r, s), lo = std::min(r, s);
    const double q = lo / hi;
    if (elliptic) {
      const double w = std::max((1.0 - q) * (1.0 + q), 1e-300);
      return (4.0 / hi) * (M_PI / (2.0 * agm(1.0, std::sqrt(w))));
    }
    const double z = q * q;
    const double scale = 2.0 * M_PI * std::pow(hi, alpha - 2.0);
    if (z <= 0.6) return scale * hyp2f1_diag(a, z);
    const double w = (1.0 - q) * (1.0 + q);
    return scale * (conn_p * hyp2f1_series(a, 2.0 - alpha, w) +
                    conn_q * std::pow(w, alpha - 1.0) * hyp2f1_series(0.5 * alpha, alpha, w));
  }
};

// Gauss-Legendre of A(r,.)*s over [lo,hi].
double gl_segment(const AngularEvaluator& A, double r, double lo, double hi, int order) {
  const GaussRule& rule = gauss_rule(order);
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  double acc = 0.0;
  for (size_t q = 0; q < rule.x.size(); ++q) {
    const double s = mid + half * rule.x[q];
    acc += rule.w[q] * A(r, s) * s;
  }
  return acc * half;
}

// [lo,hi] with panels shrinking geometrically toward the steep end
// (toward_lo selects which); no singularity inside the interval.
double graded_segment(const AngularEvaluator& A, double r, double lo, double hi, bool toward_lo,
                      int levels, int order) {
  const double len = hi - lo;
  double acc = 0.0;
  for (int k = 0; k < levels; ++k) {
    const double outer = len * std::ldexp(1.0, -k);
    const double inner = (k + 1 == levels) ? 0.0 : len * std::ldexp(1.0, -(k + 1));
    if (toward_lo)
      acc += gl_segment(A, r, lo + inner, lo + outer, order);
    else
      acc += gl_segment(A, r, hi - outer, hi - inner, order);
  }
  return acc;
}

// Diagonal cell [lo,hi] containing the node r.  Panels grade toward the
// singular point from both sides; the innermost slivers are integrated in
// closed form through the leading |r-s|^(alpha-1) branch (the alpha >= 1
// branches contribute below double precision there).
double diagonal_cell(const AngularEvaluator& A, double r, double lo, double hi) {
  constexpr int kLevels = 42;
  constexpr int kOrder = 8;
  const double left = r - lo, right = hi - r;
  double acc = 0.0;
  for (int k = 0; k < kLevels; ++k) {
    const double outer = std::ldexp(1.0, -k);
    const double inner = std::ldexp(1.0, -(k + 1));
    acc += gl_segment(A, r, r - left * outer, r - left * inner, kOrder);
    acc += gl_segment(A, r, r + right * inner, r + right * outer, kOrder);
  }
  if (A.alpha < 1.0 && !A.elliptic) {
    const double sliver = std::ldexp(1.0, -kLevels);
    const double coef = 2.0 * M_PI * std::pow(r, A.alpha - 1.0) * A.conn_q *
                        std::pow(2.0 / r, A.alpha - 1.0) / A.alpha;
    acc += coef * (std::pow(left * sliver, A.alpha) + std::pow(right * sliver, A.alpha));
  }
  return acc;
}

}  // namespace

namespace detail {
double angular_kernel_factor(double alpha, double r, double s) {
  check_alpha(alpha, "angular_kernel_factor");
  return AngularEvaluator(alpha)(r, s);
}
}  // namespace detail

RieszKernelMatrix assemble_kernel(const RadialGrid& grid, double alpha) {
  check_alpha(alpha, "assemble_kernel");
  const Eigen::Index n = grid.size();
  RieszKernelMatrix kernel;
  kernel.alpha = alpha;
  kernel.r_max = grid.r_max;
  kernel.scheme = grid.scheme;
  kernel.k.resize(n, n);

  const double c = riesz_constant(alpha);
  const AngularEvaluator A(alpha);

  auto row_worker = [&](Eigen::Index i) {
    const double r = grid.nodes[i];
    for (Eigen::Index j = i; j < n; ++j) {
      const double lo = grid.edges[j], hi = grid.edges[j + 1];
      double val;
      if (j == i)
        val = diagonal_cell(A, r, lo, hi);
      else if (j - i <= 2)
        val = graded_segment(A, r, lo, hi, /*toward_lo=*/true, 12, 6);
      else if (j - i <= 32)
        val = gl_segment(A, r, lo, hi, 6);
      else if (j - i <= 512)
        val = gl_segment(A, r, lo, hi, 3);
      else
        val = gl_segment(A, r, lo, hi, 2);
      kernel.k(i, j) = c * val;
    }
  };

  const unsigned n_threads = std::max(1u, std::min(std::thread::hardware_concurrency(), 16u));
  if (n_threads <= 1 || n < 64) {
    for (Eigen::Index i = 0; i < n; ++i) row_worker(i);
  } else {
    std::atomic<Eigen::Index> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t)
      pool.emplace_back([&] {
        for (Eigen::Index i = next.fetch_add(1); i < n; i = next.fetch_add(1)) row_worker(i);
      });
    for (auto& th : pool) th.join();
  }

  // weighted mirror: exact self-adjointness of the discrete convolution
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      kernel.k(j, i) = kernel.k(i, j) * grid.weights[i] / grid.weights[j];
  return kernel;
}

Vector convolve(const RieszKernelMatrix& kernel, const Eigen::Ref<const Vector>& g) {
  if (g.size() != kernel.size())
    throw std::invalid_argument("convolve: field size does not match kernel grid");
  return kernel.k * g;
}

std::vector<double> brute_force_oracle(const RadialGrid& grid, const Eigen::Ref<const Vector>& g,
                                       double alpha, const std::vector<double>& eval_radii,
                                       const OracleConfig& cfg) {
  check_alpha(alpha, "brute_force_oracle");
  if (g.size() != grid.size())
    throw std::invalid_argument("brute_force_oracle: field size does not match grid");
  const double c = riesz_constant(alpha);
  const GaussRule& rule = gauss_rule(cfg.gl_order);

  std::vector<double> out;
  out.reserve(eval_radii.size());
  for (const double r : eval_radii) {
    const double t_max = r + grid.r_max;
    auto ring_sum = [&](double t) {
      double s = 0.0;
      for (int k = 0; k < cfg.n_theta; ++k) {
        const double th = (k + 0.5) * (2.0 * M_PI / cfg.n_theta);
        const double rho = std::sqrt(std::max(r * r + t * t + 2.0 * r * t * std::cos(th), 0.0));
        s += interp_radial(grid, g, rho);
      }
      return s * (2.0 * M_PI / cfg.n_theta);
    };
    // geometric panels absorb the t^(alpha-1) endpoint, then uniform panels
    // resolve compactly supported sources far from the evaluation point
    const double panel_cap = grid.r_max / 64.0;
    double acc = 0.0;
    double lo = cfg.eps;
    while (lo < t_max) {
      const double hi = std::min(std::min(2.0 * lo, lo + panel_cap), t_max);
      const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      for (size_t q = 0; q < rule.x.size(); ++q) {
        const double t = mid + half * rule.x[q];
        acc += rule.w[q] * half * std::pow(t, alpha - 1.0) * ring_sum(t);
      }
      lo = hi;
    }
    acc += interp_radial(grid, g, r) * 2.0 * M_PI * std::pow(cfg.eps, alpha) / alpha;
    out.push_back(c * acc);
  }
  return out;
}

namespace {
constexpr char kMagic[8] = {'R', 'I', 'E', 'S', 'Z', 'K', '1', '\0'};
}

void save_kernel(const std::string& path, const RieszKernelMatrix& kernel) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_kernel: cannot open " + path);
  const std::uint64_t n = static_cast<std::uint64_t>(kernel.size());
  out.write(kMagic, 8);
  out.write(reinterpret_cast<const char*>(&n), 8);
  const double meta[3] = {kernel.alpha, kernel.r_max,
                          kernel.scheme == GridScheme::UniformMidpoint ? 0.0 : 1.0};
  out.write(reinterpret_cast<const char*>(meta), sizeof(meta));
  out.write(reinterpret_cast<const char*>(kernel.k.data()),
            static_cast<std::streamsize>(sizeof(double) * n * n));
  if (!out) throw std::runtime_error("save_kernel: write failed for " + path);
}

std::optional<RieszKernelMatrix> load_kernel(const std::string& path, const RadialGrid& grid,
                                             double alpha) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[8];
  std::uint64_t n = 0;
  double meta[3];
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(&n), 8);
  in.read(reinterpret_cast<char*>(meta), sizeof(meta));
  if (!in || std::memcmp(magic, kMagic, 8) != 0) return std::nullopt;
  if (n != static_cast<std::uint64_t>(grid.size()) || meta[0] != alpha || meta[1] != grid.r_max)
    return std::nullopt;
  const GridScheme scheme = meta[2] == 0.0 ? GridScheme::UniformMidpoint : GridScheme::Graded;
  if (scheme != grid.scheme) return std::nullopt;
  RieszKernelMatrix kernel;
  kernel.alpha = alpha;
  kernel.r_max = grid.r_max;
  kernel.scheme = scheme;
  kernel.k.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  in.read(reinterpret_cast<char*>(kernel.k.data()),
          static_cast<std::streamsize>(sizeof(double) * n * n));
  if (!in) return std::nullopt;
  return kernel;
}

RieszKernelMatrix assemble_kernel_cached(const RadialGrid& grid, double alpha,
                                         const std::string& cache_dir) {
  std::ostringstream name;
  name.precision(12);
  name << cache_dir << "/riesz_N" << grid.size() << "_R" << grid.r_max << "_"
       << scheme_name(grid.scheme) << "_a" << alpha << ".bin";
  if (auto cached = load_kernel(name.str(), grid, alpha)) return std::move(*cached);
  RieszKernelMatrix kernel = assemble_kernel(grid, alpha);
  save_kernel(name.str(), kernel);
  return kernel;
}

}  // namespace choq
