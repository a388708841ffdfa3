#pragma once

#include "choq/moser.hpp"
#include "choq/solver.hpp"

#include <json.hpp>

#include <iosfwd>

namespace choq {

const char* code_version();

nlohmann::json to_json(const EnergyBreakdown& e);
nlohmann::json to_json(const AssumptionReport& report);
nlohmann::json to_json(const VerificationReport& report);
nlohmann::json to_json(const MoserScanResult& scan);

/// Scalar summary of a solve; the field and history go to CSV.
nlohmann::json solve_summary(const SolveResult& result);

void write_history_csv(std::ostream& out, const std::vector<IterationRecord>& history);

}  // namespace choq
