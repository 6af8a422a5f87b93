#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shelfrank/catalog.hpp"

namespace shelfrank {

/// Ordered product ids shown in slots 1..slots.size().
struct Ranking {
  std::vector<std::string> slots;
  int slot_count = 0;

  bool operator==(const Ranking&) const = default;
};

/// How stage-2 passers are ordered before the first one is selected.
enum class OrderingPolicy {
  kQualityOrder,     // keep the stage-1 order (rating, then review count)
  kPriceDescending,  // price descending, purchase probability descending
};

std::string_view to_string(OrderingPolicy policy);
/// Accepts "quality" and "price-desc".
std::optional<OrderingPolicy> parse_ordering_policy(std::string_view name);

/// Audit record of one select-and-eliminate round. Thresholds are NaN when
/// their weights sum to zero.
struct TwoStageIteration {
  double stage1_threshold = 0.0;
  std::vector<std::string> stage1_order;
  double stage2_threshold = 0.0;
  std::vector<std::string> stage2_passers;
  std::string selected;
  bool fallback_used = false;

  bool operator==(const TwoStageIteration&) const = default;
};

struct TwoStageTrace {
  std::vector<TwoStageIteration> iterations;

  bool operator==(const TwoStageTrace&) const = default;
};

struct TwoStageResult {
  Ranking ranking;
  TwoStageTrace trace;
};

/// Rating-weighted mean review count. Throws std::domain_error when all
/// ratings are zero.
double stage1_threshold(std::span<const Product> products);

/// Price-weighted mean review count. Throws std::domain_error when all
/// prices are zero.
double stage2_threshold(std::span<const Product> products);

/// Products with at least `threshold` reviews, best rated first. Ties go to
/// the larger review count, then the smaller id.
std::vector<std::string> stage1_rank(std::span<const Product> products,
                                     double threshold);

/// Members of `shortlist` with at least `threshold` reviews. The quality
/// policy keeps shortlist order; the price policy re-sorts by price
/// descending, then demand override descending, then id.
std::vector<std::string> stage2_filter(std::span<const std::string> shortlist,
                                       double threshold,
                                       std::span<const Product> products,
                                       OrderingPolicy policy =
                                           OrderingPolicy::kQualityOrder);

/// One round of the two-stage procedure over `pool` (nonempty).
TwoStageIteration two_stage_step(std::span<const Product> pool,
                                 OrderingPolicy policy);

/// Fills up to `slots` positions by repeatedly running two_stage_step and
/// removing the selected product. Throws std::invalid_argument if slots < 1.
TwoStageResult two_stage_select(const Catalog& catalog, int slots,
                                OrderingPolicy policy =
                                    OrderingPolicy::kQualityOrder);

}  // namespace shelfrank
