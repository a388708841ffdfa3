#include "choq/cli.hpp"

#include "choq/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace choq {

namespace {

nlohmann::json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("config file not readable: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("malformed config file " + path + ": " + e.what());
  }
  if (!j.is_object()) throw UsageError("config file must hold a flat JSON object: " + path);
  return j;
}

template <typename T>
T expect(const nlohmann::json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw UsageError("config key has the wrong type: " + key);
  }
}

void apply_config_file(RunConfig& cfg, const nlohmann::json& file) {
  for (const auto& [key, value] : file.items()) {
    if (key == "model") cfg.model = expect<std::string>(value, key);
    else if (key == "alpha") cfg.alpha = expect<double>(value, key);
    else if (key == "gamma0") cfg.gamma0 = expect<double>(value, key);
    else if (key == "beta0") cfg.beta0 = expect<double>(value, key);
    else if (key == "sigma") cfg.sigma = expect<double>(value, key);
    else if (key == "p") cfg.p = expect<double>(value, key);
    else if (key == "q") cfg.q = expect<double>(value, key);
    else if (key == "s0") cfg.s0 = expect<double>(value, key);
    else if (key == "mass") cfg.mass = expect<double>(value, key);
    else if (key == "grid-n") { cfg.grid_n = expect<int>(value, key); cfg.grid_explicit = true; }
    else if (key == "grid-r") { cfg.grid_r = expect<double>(value, key); cfg.grid_explicit = true; }
    else if (key == "grid-scheme") { cfg.grid_scheme = expect<std::string>(value, key); cfg.grid_explicit = true; }
    else if (key == "tol-grad") cfg.tol_grad = expect<double>(value, key);
    else if (key == "tol-pohozaev") cfg.tol_pohozaev = expect<double>(value, key);
    else if (key == "max-iter") cfg.max_iter = expect<int>(value, key);
    else if (key == "step") cfg.step = expect<double>(value, key);
    else if (key == "profile") cfg.profile = expect<std::string>(value, key);
    else if (key == "moser-n") cfg.moser_n = expect<std::vector<int>>(value, key);
    else if (key == "out") cfg.out_dir = expect<std::string>(value, key);
    else throw UsageError("unknown config key: " + key);
  }
}

void validate_domains(const RunConfig& cfg) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 2.0)) throw UsageError("alpha must lie in (0,2)");
  if (!(cfg.gamma0 > 0.0)) throw UsageError("gamma0 must be positive");
  if (!(cfg.beta0 > 0.0)) throw UsageError("beta0 must be positive");
  if (!(cfg.sigma > 1.0)) throw UsageError("sigma must exceed 1");
  if (!(cfg.mass > 0.0)) throw UsageError("mass must be positive");
  if (cfg.grid_n < 8) throw UsageError("grid-n must be at least 8");
  if (!(cfg.grid_r > 0.0)) throw UsageError("grid-r must be positive");
  if (!(cfg.tol_grad > 0.0)) throw UsageError("tol-grad must be positive");
  if (!(cfg.tol_pohozaev > 0.0)) throw UsageError("tol-pohozaev must be positive");
  if (cfg.max_iter < 1) throw UsageError("max-iter must be at least 1");
  if (!(cfg.step > 0.0)) throw UsageError("step must be positive");
  if (cfg.model != "exp-critical" && cfg.model != "power" && cfg.model != "exp-power")
    throw UsageError("model must be one of exp-critical, power, exp-power");
  if (cfg.grid_scheme != "uniform-midpoint" && cfg.grid_scheme != "uniform" &&
      cfg.grid_scheme != "graded")
    throw UsageError("grid-scheme must be uniform-midpoint or graded");
  if (cfg.profile != "gaussian" && cfg.profile != "tent")
    throw UsageError("profile must be gaussian or tent");
  for (int n : cfg.moser_n)
    if (n < 2) throw UsageError("moser-n entries must be at least 2");
}

nlohmann::json config_json(const RunConfig& cfg) {
  return {{"command", cfg.command},
          {"model", cfg.model},
          {"alpha", cfg.alpha},
          {"gamma0", cfg.gamma0},
          {"beta0", cfg.beta0},
          {"sigma", cfg.sigma},
          {"p", cfg.p},
          {"q", cfg.q},
          {"s0", cfg.s0},
          {"mass", cfg.mass},
          {"grid-n", cfg.grid_n},
          {"grid-r", cfg.grid_r},
          {"grid-scheme", cfg.grid_scheme},
          {"tol-grad", cfg.tol_grad},
          {"tol-pohozaev", cfg.tol_pohozaev},
          {"max-iter", cfg.max_iter},
          {"step", cfg.step},
          {"profile", cfg.profile},
          {"moser-n", cfg.moser_n},
          {"out", cfg.out_dir},
          {"version", code_version()}};
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

NonlinearityModel build_model(const RunConfig& cfg) {
  if (cfg.model == "power") return make_power(cfg.p, cfg.alpha);
  if (cfg.model == "exp-power")
    return make_exp_power(cfg.p, cfg.q, cfg.gamma0, cfg.s0, cfg.alpha);
  return make_exp_critical(cfg.sigma, cfg.gamma0, cfg.beta0, cfg.alpha);
}

SolverConfig build_solver_config(const RunConfig& cfg) {
  SolverConfig sc;
  sc.mass = cfg.mass;
  sc.step = cfg.step;
  sc.tol_grad = cfg.tol_grad;
  sc.tol_pohozaev = cfg.tol_pohozaev;
  sc.max_iter = cfg.max_iter;
  sc.profile = parse_profile(cfg.profile);
  return sc;
}

RieszKernelMatrix build_kernel(const RunConfig& cfg, const RadialGrid& grid) {
  if (!cfg.kernel_cache.empty()) {
    std::filesystem::create_directories(cfg.kernel_cache);
    return assemble_kernel_cached(grid, cfg.alpha, cfg.kernel_cache);
  }
  return assemble_kernel(grid, cfg.alpha);
}

// audit sample grids: dense below the matching point, then up to the
// overflow threshold
std::pair<std::vector<double>, std::vector<double>> audit_grids(const NonlinearityModel& model) {
  const double split = model.variant == NonlinVariant::Power ? 1.0 : model.s0;
  const double t_cap = model.exponential_growth()
                           ? 0.999 * std::sqrt(kOverflowExponent / model.gamma0)
                           : 1e6;
  const Vector small = log_spaced(1e-6, split * 0.999, 200);
  const Vector large = log_spaced(split * 1.001, t_cap, 200);
  return {{small.begin(), small.end()}, {large.begin(), large.end()}};
}

int run_solve(const RunConfig& cfg, bool also_verify) {
  const NonlinearityModel model = build_model(cfg);
  const RadialGrid grid = make_grid(cfg.grid_n, cfg.grid_r, parse_scheme(cfg.grid_scheme));
  const RieszKernelMatrix kernel = build_kernel(cfg, grid);
  const SolverConfig sc = build_solver_config(cfg);
  const SolveResult result = minimize_reduced(sc, grid, kernel, model);

  nlohmann::json summary = solve_summary(result);
  summary["config"] = config_json(cfg);
  write_json(cfg.out_dir + "/result.json", summary);
  {
    std::ofstream out(cfg.out_dir + "/field.csv");
    write_field_csv(out, grid, result.field);
  }
  {
    std::ofstream out(cfg.out_dir + "/history.csv");
    write_history_csv(out, result.history);
  }
  std::cout << "solve: converged=" << (result.converged ? 1 : 0) << " J=" << result.energy.J
            << " lambda=" << result.lambda << " iterations=" << result.iterations << " ("
            << result.diagnostic << ")\n";
  if (!result.converged) return 2;
  if (!also_verify) return 0;

  const VerificationReport report = verify_solution(result, grid, kernel, model, sc);
  nlohmann::json vj = to_json(report);
  vj["config"] = config_json(cfg);
  write_json(cfg.out_dir + "/verification.json", vj);
  std::cout << "verify: " << (report.all_passed() ? "all checks passed" : "checks FAILED")
            << '\n';
  return report.all_passed() ? 0 : 1;
}

int run_moser_scan(RunConfig cfg) {
  if (!cfg.grid_explicit) {
    // plateau resolution wants nodes clustered at the origin on [0,1]
    cfg.grid_n = 4096;
    cfg.grid_r = 1.0;
    cfg.grid_scheme = "graded";
  }
  const NonlinearityModel model = build_model(cfg);
  const RadialGrid grid = make_grid(cfg.grid_n, cfg.grid_r, parse_scheme(cfg.grid_scheme));
  const RieszKernelMatrix kernel = build_kernel(cfg, grid);
  const Vector t_grid = log_spaced(0.01, 10.0, 81);

  nlohmann::json scans = nlohmann::json::array();
  double best_margin = -std::numeric_limits<double>::infinity();
  int best_n = 0;
  for (int n : cfg.moser_n) {
    const MoserScanResult scan = g_scan(grid, kernel, model, n, cfg.mass, t_grid);
    std::ofstream out(cfg.out_dir + "/moser_n" + std::to_string(n) + ".csv");
    write_moser_csv(out, scan);
    scans.push_back(to_json(scan));
    if (scan.margin > best_margin) {
      best_margin = scan.margin;
      best_n = scan.n;
    }
  }
  nlohmann::json summary = {{"scans", scans},
                            {"best_n", best_n},
                            {"best_margin", best_margin},
                            {"witness_found", best_margin > 0.0},
                            {"config", config_json(cfg)}};
  write_json(cfg.out_dir + "/moser_scan.json", summary);
  std::cout << "moser-scan: best margin " << best_margin << " at n=" << best_n
            << (best_margin > 0.0 ? " (level bound witnessed)" : " (no witness)") << '\n';
  return 0;
}

int run_check_assumptions(const RunConfig& cfg) {
  const NonlinearityModel model = build_model(cfg);
  const auto [t_small, t_large] = audit_grids(model);
  const AssumptionReport report = check_assumptions(model, t_small, t_large);
  nlohmann::json j = to_json(report);
  j["config"] = config_json(cfg);
  j["model"] = model.name();
  write_json(cfg.out_dir + "/assumptions.json", j);
  std::cout << "check-assumptions: " << model.name() << " -> "
            << (report.all_passed() ? "all pass" : "FAIL") << '\n';
  return report.all_passed() ? 0 : 1;
}

int run_convolve_test(const RunConfig& cfg) {
  const RadialGrid grid = make_grid(cfg.grid_n, cfg.grid_r, parse_scheme(cfg.grid_scheme));
  const RieszKernelMatrix kernel = build_kernel(cfg, grid);
  Vector g(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    g[i] = std::exp(-grid.nodes[i] * grid.nodes[i]);
  const Vector conv = convolve(kernel, g);

  std::vector<double> radii;
  std::vector<Eigen::Index> idx;
  for (int k = 0; k < 9; ++k) {
    const Eigen::Index i = grid.size() * (2 * k + 1) / 18;
    idx.push_back(i);
    radii.push_back(grid.nodes[i]);
  }
  const std::vector<double> oracle = brute_force_oracle(grid, g, cfg.alpha, radii);
  double max_rel = 0.0;
  for (size_t k = 0; k < radii.size(); ++k)
    max_rel = std::max(max_rel, std::abs(conv[idx[k]] - oracle[k]) / std::abs(oracle[k]));

  nlohmann::json j = {{"max_rel_error", max_rel},
                      {"tolerance", 1e-3},
                      {"radii", radii},
                      {"config", config_json(cfg)}};
  write_json(cfg.out_dir + "/convolve_test.json", j);
  std::cout << "convolve-test: max relative error " << max_rel << " (tolerance 1e-3)\n";
  return max_rel < 1e-3 ? 0 : 1;
}

}  // namespace

RunConfig parse_config(const std::vector<std::string>& args) {
  RunConfig cfg;
  if (const char* cache = std::getenv("CHOQUARD_KERNEL_CACHE")) cfg.kernel_cache = cache;

  // config file first, flags override
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config requires a path");
      apply_config_file(cfg, load_config_file(args[i + 1]));
    }
  }

  CLI::App app{"normalized ground states of the planar Choquard equation", "choquard"};
  std::string config_path;
  app.add_option("--config", config_path, "flat JSON config file; flags override its values");
  app.add_option("--model", cfg.model, "nonlinearity: exp-critical | power | exp-power");
  app.add_option("--alpha", cfg.alpha, "Riesz kernel order in (0,2)");
  app.add_option("--gamma0", cfg.gamma0, "critical exponential rate");
  app.add_option("--beta0", cfg.beta0, "Ruf asymptote constant");
  app.add_option("--sigma", cfg.sigma, "power of the sub-matching branch");
  app.add_option("--p", cfg.p, "power-model exponent (also exp-power)");
  app.add_option("--q", cfg.q, "exp-power denominator exponent (q <= 2)");
  app.add_option("--s0", cfg.s0, "exp-power matching point");
  app.add_option("--mass", cfg.mass, "prescribed L2 mass a");
  auto* opt_n = app.add_option("--grid-n", cfg.grid_n, "number of radial cells");
  auto* opt_r = app.add_option("--grid-r", cfg.grid_r, "truncation radius R");
  auto* opt_s = app.add_option("--grid-scheme", cfg.grid_scheme, "uniform-midpoint | graded");
  app.add_option("--tol-grad", cfg.tol_grad, "relative tangential-gradient tolerance");
  app.add_option("--tol-pohozaev", cfg.tol_pohozaev, "relative Pohozaev tolerance");
  app.add_option("--max-iter", cfg.max_iter, "iteration cap");
  app.add_option("--step", cfg.step, "initial descent step");
  app.add_option("--profile", cfg.profile, "initial guess: gaussian | tent");
  app.add_option("--moser-n", cfg.moser_n, "moser-scan sequence indices")->delimiter(',');
  app.add_option("--out", cfg.out_dir, "output directory");

  const char* commands[] = {"solve", "moser-scan", "check-assumptions", "convolve-test", "verify"};
  for (const char* name : commands) app.add_subcommand(name)->fallthrough();
  app.require_subcommand(0, 1);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  const auto chosen = app.get_subcommands();
  if (!chosen.empty()) cfg.command = chosen.front()->get_name();
  if (opt_n->count() || opt_r->count() || opt_s->count()) cfg.grid_explicit = true;

  validate_domains(cfg);
  return cfg;
}

int run(const RunConfig& cfg) {
  try {
    std::filesystem::create_directories(cfg.out_dir);
    if (cfg.command == "solve") return run_solve(cfg, false);
    if (cfg.command == "verify") return run_solve(cfg, true);
    if (cfg.command == "moser-scan") return run_moser_scan(cfg);
    if (cfg.command == "check-assumptions") return run_check_assumptions(cfg);
    if (cfg.command == "convolve-test") return run_convolve_test(cfg);
    std::cerr << "no command given; expected one of solve, moser-scan, check-assumptions, "
                 "convolve-test, verify\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace choq
