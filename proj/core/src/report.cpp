#include "shelfrank/report.hpp"

#include <cmath>

namespace shelfrank {

using nlohmann::json;

namespace {

json number_or_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

}  // namespace

json to_json(const Ranking& ranking) {
  return {{"slots", ranking.slots}, {"slot_count", ranking.slot_count}};
}

json to_json(const TwoStageTrace& trace) {
  json iterations = json::array();
  for (const auto& it : trace.iterations) {
    iterations.push_back({{"stage1_threshold", number_or_null(it.stage1_threshold)},
                          {"stage1_order", it.stage1_order},
                          {"stage2_threshold", number_or_null(it.stage2_threshold)},
                          {"stage2_passers", it.stage2_passers},
                          {"selected", it.selected},
                          {"fallback_used", it.fallback_used}});
  }
  return {{"iterations", std::move(iterations)}};
}

json to_json(const SlateEvaluation& eval) {
  return {{"per_slot_purchase_prob", eval.per_slot_purchase_prob},
          {"no_purchase_prob", eval.no_purchase_prob},
          {"expected_revenue", eval.expected_revenue}};
}

json to_json(const OptimizationResult& result) {
  json out = {{"best", to_json(result.best)},
              {"value", result.value},
              {"slates_evaluated", result.slates_evaluated}};
  out["gap"] = result.gap ? json(*result.gap) : json(nullptr);
  return out;
}

json to_json(const SwapAnalysis& a) {
  return {{"replaced_slot", a.replaced_slot},
          {"target_slot", a.target_slot},
          {"replaced_id", a.replaced_id},
          {"replacement_id", a.replacement_id},
          {"prob_before", a.prob_before},
          {"prob_after", a.prob_after},
          {"slot_probs_before", a.slot_probs_before},
          {"slot_probs_after", a.slot_probs_after},
          {"revenue_before", a.revenue_before},
          {"revenue_after", a.revenue_after},
          {"middle_term_before", a.middle_term_before},
          {"middle_term_after", a.middle_term_after},
          {"exact_delta", a.exact_delta}};
}

json to_json(const AuditFinding& f) {
  return {{"slot", f.slot},
          {"product", f.product_id},
          {"kind", std::string(to_string(f.kind))},
          {"value", f.value},
          {"detail", f.detail}};
}

json to_json(const std::vector<AuditFinding>& findings) {
  json out = json::array();
  for (const auto& f : findings) out.push_back(to_json(f));
  return out;
}

json to_json(const SimSummary& s) {
  json products = json::array();
  for (const auto& p : s.products) {
    products.push_back({{"id", p.id},
                        {"purchases", p.purchases},
                        {"reviews", p.final_state.count},
                        {"avg_rating", p.final_state.mean},
                        {"posterior_mean", p.posterior_mean}});
  }
  return {{"customers", s.customers},
          {"purchases", s.purchases},
          {"gross_revenue", s.gross_revenue},
          {"platform_revenue", s.platform_revenue},
          {"purchase_rate", s.purchase_rate},
          {"slot_purchases", s.slot_purchases},
          {"products", std::move(products)}};
}

json to_json(const AttentionSpanDist& dist) {
  json pmf = json::array();
  for (const auto& m : dist.support()) pmf.push_back({m.span, m.probability});
  return {{"pmf", std::move(pmf)}};
}

}  // namespace shelfrank
