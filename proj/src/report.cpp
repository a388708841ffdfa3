#include "choq/report.hpp"

#include <ostream>

namespace choq {

const char* code_version() { return "choquard 1.0.0"; }

namespace {
const char* status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::NotApplicable: return "not-applicable";
  }
  return "unknown";
}
}  // namespace

nlohmann::json to_json(const EnergyBreakdown& e) {
  return {{"kinetic", e.kinetic},   {"nonlocal", e.nonlocal},
          {"J", e.J},               {"pohozaev", e.pohozaev},
          {"coupling", e.coupling}, {"lambda_est", e.lambda_est},
          {"mass", e.mass}};
}

nlohmann::json to_json(const AssumptionReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"name", c.name},
                      {"status", status_name(c.status)},
                      {"witness", c.witness},
                      {"detail", c.detail}});
  return {{"all_passed", report.all_passed()}, {"checks", checks}};
}

nlohmann::json to_json(const VerificationReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"name", c.name},
                      {"status", status_name(c.status)},
                      {"observed", c.observed},
                      {"bound", c.bound},
                      {"detail", c.detail}});
  return {{"all_passed", report.all_passed()}, {"checks", checks}};
}

nlohmann::json to_json(const MoserScanResult& scan) {
  return {{"n", scan.n},         {"t_n", scan.t_n},       {"g_max", scan.g_max},
          {"bound", scan.bound}, {"margin", scan.margin}, {"samples", scan.t_values.size()}};
}

nlohmann::json solve_summary(const SolveResult& result) {
  return {{"converged", result.converged},
          {"diagnostic", result.diagnostic},
          {"iterations", result.iterations},
          {"lambda", result.lambda},
          {"energy", to_json(result.energy)}};
}

void write_history_csv(std::ostream& out, const std::vector<IterationRecord>& history) {
  out << "iter,energy,pohozaev_rel,grad_rel,step\n";
  out.precision(17);
  for (const auto& rec : history)
    out << rec.iter << ',' << rec.energy << ',' << rec.pohozaev_rel << ',' << rec.grad_rel << ','
        << rec.step << '\n';
}

}  // namespace choq
