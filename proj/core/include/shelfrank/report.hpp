#pragma once

#include <nlohmann/json.hpp>

#include "shelfrank/assortment.hpp"
#include "shelfrank/collusion.hpp"
#include "shelfrank/revenue.hpp"
#include "shelfrank/simulator.hpp"

// Structured report documents. They use the same JSON conventions as the
// catalog schema; undefined thresholds serialize as null.

namespace shelfrank {

nlohmann::json to_json(const Ranking& ranking);
nlohmann::json to_json(const TwoStageTrace& trace);
nlohmann::json to_json(const SlateEvaluation& eval);
nlohmann::json to_json(const OptimizationResult& result);
nlohmann::json to_json(const SwapAnalysis& analysis);
nlohmann::json to_json(const AuditFinding& finding);
nlohmann::json to_json(const std::vector<AuditFinding>& findings);
nlohmann::json to_json(const SimSummary& summary);
nlohmann::json to_json(const AttentionSpanDist& dist);

}  // namespace shelfrank
