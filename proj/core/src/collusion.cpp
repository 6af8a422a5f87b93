#include "shelfrank/collusion.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "shelfrank/format.hpp"

namespace shelfrank {

namespace {

std::vector<double> lambdas_of(std::span<const SlotTerms> terms) {
  std::vector<double> out;
  out.reserve(terms.size());
  for (const auto& t : terms) out.push_back(t.lambda);
  return out;
}

void check_distinct_known(const Ranking& slate, const Catalog& catalog) {
  std::set<std::string_view> seen;
  for (const auto& id : slate.slots) {
    catalog.at(id);
    if (!seen.insert(id).second) {
      throw std::invalid_argument("product '" + id + "' appears twice on the slate");
    }
  }
}

}  // namespace

SwapAnalysis substitution_effect(const Ranking& slate, int slot,
                                 std::string_view replacement,
                                 const AttentionSpanDist& dist,
                                 const DemandInputs& inputs) {
  const int length = static_cast<int>(slate.slots.size());
  if (slot < 1 || slot > length) {
    throw std::invalid_argument("slot " + std::to_string(slot) +
                                " is outside the slate of length " +
                                std::to_string(length));
  }
  inputs.catalog().at(replacement);
  if (std::find(slate.slots.begin(), slate.slots.end(), replacement) !=
      slate.slots.end()) {
    throw std::invalid_argument("replacement '" + std::string(replacement) +
                                "' is already on the slate");
  }

  Ranking after = slate;
  after.slots[slot - 1] = std::string(replacement);
  const auto terms_before = inputs.slate_terms(slate.slots);
  const auto terms_after = inputs.slate_terms(after.slots);

  SwapAnalysis a;
  a.replaced_slot = slot;
  a.target_slot = slot < length ? slot + 1 : slot;
  a.replaced_id = slate.slots[slot - 1];
  a.replacement_id = std::string(replacement);
  a.slot_probs_before = cascade_probs(lambdas_of(terms_before)).per_slot_purchase_prob;
  a.slot_probs_after = cascade_probs(lambdas_of(terms_after)).per_slot_purchase_prob;
  a.prob_before = a.slot_probs_before[a.target_slot - 1];
  a.prob_after = a.slot_probs_after[a.target_slot - 1];
  a.revenue_before = expected_revenue(terms_before, dist);
  a.revenue_after = expected_revenue(terms_after, dist);
  const auto& out = terms_before[slot - 1];
  const auto& in = terms_after[slot - 1];
  a.middle_term_before = out.lambda * out.payoff();
  a.middle_term_after = in.lambda * in.payoff();
  a.exact_delta = a.revenue_after - a.revenue_before;
  return a;
}

SwapAnalysis substitution_effect(const Ranking& slate, int slot,
                                 std::string_view replacement, int span,
                                 const DemandInputs& inputs) {
  return substitution_effect(slate, slot, replacement,
                             AttentionSpanDist::deterministic(span), inputs);
}

bool raises_downstream_purchase(double lambda_replaced,
                                double lambda_replacement) {
  return lambda_replacement < lambda_replaced;
}

double adjacent_swap_delta(std::span<const SlotTerms> slots, int slot) {
  if (slot < 1 || slot >= static_cast<int>(slots.size())) {
    throw std::invalid_argument("no adjacent pair starts at slot " +
                                std::to_string(slot));
  }
  double survival = 1.0;
  for (int s = 0; s < slot - 1; ++s) survival *= 1.0 - slots[s].lambda;
  const auto& a = slots[slot - 1];
  const auto& b = slots[slot];
  return survival * a.lambda * b.lambda * (b.payoff() - a.payoff());
}

double middle_substitution_delta(const SlotTerms& first,
                                 const SlotTerms& replaced,
                                 const SlotTerms& replacement,
                                 const SlotTerms& last) {
  return (1.0 - first.lambda) *
         ((replacement.lambda * replacement.payoff() -
           replaced.lambda * replaced.payoff()) +
          (replaced.lambda - replacement.lambda) * last.lambda * last.payoff());
}

std::string_view to_string(FindingKind kind) {
  switch (kind) {
    case FindingKind::kBelowStage1Threshold:
      return "below-stage1-threshold";
    case FindingKind::kBelowStage2Threshold:
      return "below-stage2-threshold";
    case FindingKind::kOrderViolation:
      return "order-violation";
    case FindingKind::kRevenueDominatedSwap:
      return "revenue-dominated-swap";
  }
  return "unknown";
}

std::vector<AuditFinding> audit_ranking(const DemandInputs& inputs,
                                        const Ranking& displayed, int slots,
                                        const AttentionSpanDist& dist,
                                        OrderingPolicy policy) {
  const Catalog& catalog = inputs.catalog();
  check_distinct_known(displayed, catalog);
  std::vector<AuditFinding> findings;
  if (displayed.slots.empty()) return findings;

  const auto displayed_terms = inputs.slate_terms(displayed.slots);
  const double displayed_revenue = expected_revenue(displayed_terms, dist);
  const bool closed_form = inputs.position_independent() &&
                           dist.is_deterministic() &&
                           dist.max_span() >= static_cast<int>(displayed.slots.size());

  // Replay the procedure on whatever the displayed slate leaves behind.
  std::vector<Product> pool(catalog.products().begin(), catalog.products().end());
  for (std::size_t i = 0; i < displayed.slots.size(); ++i) {
    const auto& shown = catalog.at(displayed.slots[i]);
    const int slot = static_cast<int>(i) + 1;
    const auto step = two_stage_step(pool, policy);
    const auto reviews = static_cast<double>(shown.review_count);

    if (!step.fallback_used) {
      if (reviews < step.stage1_threshold) {
        std::ostringstream d;
        d << shown.review_count << " reviews below the stage-1 threshold "
          << format_number(step.stage1_threshold) << " of iteration " << slot;
        findings.push_back({slot, shown.id, FindingKind::kBelowStage1Threshold,
                            step.stage1_threshold, d.str()});
      } else if (reviews < step.stage2_threshold) {
        std::ostringstream d;
        d << shown.review_count << " reviews below the stage-2 threshold "
          << format_number(step.stage2_threshold) << " of iteration " << slot;
        findings.push_back({slot, shown.id, FindingKind::kBelowStage2Threshold,
                            step.stage2_threshold, d.str()});
      }
    }

    if (shown.id != step.selected) {
      const auto later = std::find(displayed.slots.begin() + i + 1,
                                   displayed.slots.end(), step.selected);
      if (later != displayed.slots.end()) {
        const auto j = static_cast<std::size_t>(later - displayed.slots.begin());
        double delta;
        if (j == i + 1 && closed_form) {
          delta = adjacent_swap_delta(displayed_terms, slot);
        } else {
          Ranking swapped = displayed;
          std::swap(swapped.slots[i], swapped.slots[j]);
          delta = expected_revenue(swapped, dist, inputs) - displayed_revenue;
        }
        std::ostringstream d;
        d << "shown ahead of " << step.selected << " (slot " << j + 1
          << "), which the two-stage order places here; swapping them changes "
             "expected revenue by "
          << format_number(delta);
        findings.push_back(
            {slot, shown.id, FindingKind::kOrderViolation, delta, d.str()});
      }
    }

    std::erase_if(pool, [&](const Product& p) { return p.id == shown.id; });
  }

  const auto reference = two_stage_select(catalog, slots, policy).ranking;
  const auto shared = std::min(displayed.slots.size(), reference.slots.size());
  for (std::size_t i = 0; i + 1 < reference.slots.size() && i < shared; ++i) {
    const auto& shown = displayed.slots[i];
    if (shown == reference.slots[i] ||
        std::find(reference.slots.begin(), reference.slots.end(), shown) !=
            reference.slots.end()) {
      continue;
    }
    const int slot = static_cast<int>(i) + 1;
    const auto effect = substitution_effect(reference, slot, shown, dist, inputs);
    if (effect.exact_delta < 0.0 && effect.prob_after > effect.prob_before) {
      std::ostringstream d;
      d << "replacing " << effect.replaced_id << " with " << shown
        << " lifts the slot-" << effect.target_slot << " purchase probability "
        << format_number(effect.prob_before) << " -> "
        << format_number(effect.prob_after) << " but changes expected revenue by "
        << format_number(effect.exact_delta) << " (middle terms "
        << format_number(effect.middle_term_before) << " vs "
        << format_number(effect.middle_term_after) << ")";
      findings.push_back({slot, shown, FindingKind::kRevenueDominatedSwap,
                          effect.exact_delta, d.str()});
    }
  }

  std::stable_sort(findings.begin(), findings.end(),
                   [](const AuditFinding& a, const AuditFinding& b) {
                     return a.slot < b.slot;
                   });
  return findings;
}

}  // namespace shelfrank
