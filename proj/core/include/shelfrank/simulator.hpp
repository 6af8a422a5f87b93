#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "shelfrank/assortment.hpp"
#include "shelfrank/catalog.hpp"
#include "shelfrank/demand.hpp"
#include "shelfrank/revenue.hpp"

namespace shelfrank {

/// Recompute the slate with two_stage_select before customers
/// 1, every + 1, 2 * every + 1, ... using the review state at that time.
struct RerankPolicy {
  int every = 1;
  int slots = 1;
  OrderingPolicy ordering = OrderingPolicy::kQualityOrder;
};

using SlatePolicy = std::variant<Ranking, RerankPolicy>;

struct RatingClamp {
  double low = 1.0;
  double high = 5.0;
};

struct SimConfig {
  std::int64_t horizon = 1;
  std::uint64_t seed = 0;
  SlatePolicy slate = Ranking{};
  AttentionSpanDist span = AttentionSpanDist::deterministic(1);
  BeliefPrior prior{0.0, 1.0, 1.0};
  CostModel cost{};
  bool freeze_beliefs = false;
  std::optional<RatingClamp> clamp_ratings;
};

/// One customer. `slot` and `product` are set iff a purchase happened;
/// `post_state` is the purchased product's review state afterwards.
struct CustomerRecord {
  std::int64_t t = 0;
  int span = 0;
  int viewed = 0;
  std::optional<int> slot;
  std::optional<std::string> product;
  std::optional<double> rating;
  std::optional<ReviewState> post_state;

  bool operator==(const CustomerRecord&) const = default;
};

struct ProductOutcome {
  std::string id;
  std::int64_t purchases = 0;
  ReviewState final_state;
  double posterior_mean = 0.0;

  bool operator==(const ProductOutcome&) const = default;
};

struct SimSummary {
  std::int64_t customers = 0;
  std::int64_t purchases = 0;
  double gross_revenue = 0.0;
  double platform_revenue = 0.0;
  double purchase_rate = 0.0;
  /// slot_purchases[k] counts purchases made in slot k + 1.
  std::vector<std::int64_t> slot_purchases;
  std::vector<ProductOutcome> products;

  bool operator==(const SimSummary&) const = default;
};

struct SimTrace {
  std::vector<CustomerRecord> records;
  SimSummary summary;

  bool operator==(const SimTrace&) const = default;
};

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs `cfg.horizon` customers through the cascade. Customer t draws from
/// its own random stream: span first, then one uniform per inspected slot,
/// then the rating on purchase. Throws SimulationError on invalid
/// configurations or products lacking a rating distribution.
SimTrace simulate(const Catalog& catalog, const SimConfig& cfg);

/// Totals, per-slot and per-product counts, and final beliefs. Final states
/// are the last recorded post-purchase state, or the catalog state for
/// products never bought.
SimSummary summarize(const Catalog& catalog,
                     std::span<const CustomerRecord> records,
                     const BeliefPrior& prior);

/// Tab-separated table, one customer per line, "-" for absent values.
void write_trace_table(std::ostream& out, std::span<const CustomerRecord> records);

}  // namespace shelfrank
