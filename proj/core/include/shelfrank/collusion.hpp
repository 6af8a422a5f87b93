#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shelfrank/assortment.hpp"
#include "shelfrank/revenue.hpp"

namespace shelfrank {

/// Effect of putting `replacement_id` into `replaced_slot` of a slate.
///
/// `target_slot` is the slot right after the replaced one (the replaced
/// slot itself when it is last). Slots are 1-based. The middle terms are
/// lambda * price * share of the outgoing and incoming product at the
/// replaced slot; `exact_delta` is the full revenue change, which also
/// carries the downstream effect the middle terms leave out.
struct SwapAnalysis {
  int replaced_slot = 0;
  int target_slot = 0;
  std::string replaced_id;
  std::string replacement_id;
  double prob_before = 0.0;
  double prob_after = 0.0;
  std::vector<double> slot_probs_before;
  std::vector<double> slot_probs_after;
  double revenue_before = 0.0;
  double revenue_after = 0.0;
  double middle_term_before = 0.0;
  double middle_term_after = 0.0;
  double exact_delta = 0.0;
};

/// Throws std::invalid_argument on an out-of-range slot or a replacement
/// already on the slate, CatalogError on unknown ids.
SwapAnalysis substitution_effect(const Ranking& slate, int slot,
                                 std::string_view replacement,
                                 const AttentionSpanDist& dist,
                                 const DemandInputs& inputs);
SwapAnalysis substitution_effect(const Ranking& slate, int slot,
                                 std::string_view replacement, int span,
                                 const DemandInputs& inputs);

/// True iff lowering the middle product's purchase probability from
/// `lambda_replaced` to `lambda_replacement` raises every later slot's
/// purchase probability.
bool raises_downstream_purchase(double lambda_replaced,
                                double lambda_replacement);

/// Revenue change from swapping slots `slot` and `slot + 1` (1-based) for a
/// customer who sees the whole slate, with slot-independent demand:
/// survival * l_a * l_b * (payoff_b - payoff_a).
double adjacent_swap_delta(std::span<const SlotTerms> slots, int slot);

/// Closed form of the revenue change when the middle product of a
/// three-slot slate is replaced, for a customer who sees all three:
/// (1 - l1) * [(l4 r4 - l2 r2) + (l2 - l4) * l3 r3], with r = price * share.
double middle_substitution_delta(const SlotTerms& first,
                                 const SlotTerms& replaced,
                                 const SlotTerms& replacement,
                                 const SlotTerms& last);

enum class FindingKind {
  kBelowStage1Threshold,
  kBelowStage2Threshold,
  kOrderViolation,
  kRevenueDominatedSwap,
};

std::string_view to_string(FindingKind kind);

struct AuditFinding {
  int slot = 0;
  std::string product_id;
  FindingKind kind = FindingKind::kOrderViolation;
  /// The recomputed quantity the finding rests on: the violated threshold,
  /// or the revenue delta of the swap or substitution.
  double value = 0.0;
  std::string detail;
};

/// Checks a displayed slate against the two-stage procedure.
///
/// Thresholds are recomputed by replaying the procedure slot by slot on the
/// products not yet displayed. Order violations name a product shown ahead
/// of one the procedure would have placed there, with the revenue change of
/// swapping them. Substitutions against the procedure's own slate are
/// flagged when they lift the next slot's purchase probability yet lose
/// expected revenue.
std::vector<AuditFinding> audit_ranking(const DemandInputs& inputs,
                                        const Ranking& displayed, int slots,
                                        const AttentionSpanDist& dist,
                                        OrderingPolicy policy =
                                            OrderingPolicy::kQualityOrder);

}  // namespace shelfrank
