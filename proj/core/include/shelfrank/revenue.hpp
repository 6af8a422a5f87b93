#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "shelfrank/assortment.hpp"
#include "shelfrank/catalog.hpp"
#include "shelfrank/demand.hpp"

namespace shelfrank {

struct SpanMass {
  int span = 1;
  double probability = 0.0;

  bool operator==(const SpanMass&) const = default;
};

/// Distribution of how many slots a customer inspects. Support is kept
/// sorted by span.
class AttentionSpanDist {
 public:
  /// Throws std::invalid_argument if span < 1.
  static AttentionSpanDist deterministic(int span);
  /// Throws std::invalid_argument unless spans are distinct and >= 1,
  /// masses are nonnegative, and they sum to 1 within 1e-12.
  static AttentionSpanDist from_pmf(std::vector<SpanMass> pmf);

  std::span<const SpanMass> support() const { return pmf_; }
  /// h_y = Pr(Y = y).
  double mass(int span) const;
  /// H_y = Pr(Y >= y).
  double tail(int span) const;
  int max_span() const { return pmf_.back().span; }
  bool is_deterministic() const { return pmf_.size() == 1; }

  bool operator==(const AttentionSpanDist&) const = default;

 private:
  explicit AttentionSpanDist(std::vector<SpanMass> pmf) : pmf_(std::move(pmf)) {}
  std::vector<SpanMass> pmf_;
};

/// Purchase probability and per-sale platform payoff of the product placed
/// in one slot.
struct SlotTerms {
  double lambda = 0.0;
  double price = 0.0;
  double share = 1.0;

  double payoff() const { return price * share; }
};

struct SlateEvaluation {
  std::vector<double> per_slot_purchase_prob;
  double no_purchase_prob = 1.0;
  double expected_revenue = 0.0;
};

/// Cascade probabilities: slot k sells with prod_{i<k}(1 - l_i) * l_k.
/// Throws std::invalid_argument for any lambda outside (0, 1).
SlateEvaluation cascade_probs(std::span<const double> lambdas);

/// Revenue collected by slot k from a customer who reaches it.
inline double slot_revenue(double survival, const SlotTerms& t) {
  return survival * t.lambda * t.price * t.share;
}

/// cumulative[k] = revenue from a customer who inspects the first k slots;
/// cumulative[0] = 0.
std::vector<double> cumulative_revenue(std::span<const SlotTerms> slots);

/// Revenue from a customer with a fixed span: the first min(y, length)
/// slots contribute.
double expected_revenue_fixed(std::span<const SlotTerms> slots, int span);

/// sum_y h_y R(slate, y).
double expected_revenue_by_span(std::span<const SlotTerms> slots,
                                const AttentionSpanDist& dist);

/// sum_k prod_{i<k}(1 - l_i) l_k p_k w_k H_k.
double expected_revenue_by_tail(std::span<const SlotTerms> slots,
                                const AttentionSpanDist& dist);

/// Span-weighted revenue; cross-checked against the tail form and throws
/// std::logic_error if they disagree by more than 1e-10.
double expected_revenue(std::span<const SlotTerms> slots,
                        const AttentionSpanDist& dist);

/// Resolves per-slot demand and payoff for products of a catalog.
///
/// Demand comes from the product's override when present, otherwise from
/// the logit of the belief-based utility at that slot. A uniform revenue
/// share, when set, replaces every product's own share.
class DemandInputs {
 public:
  explicit DemandInputs(Catalog catalog,
                        std::optional<BeliefPrior> prior = std::nullopt,
                        CostModel cost = {},
                        std::optional<double> uniform_share = std::nullopt);

  const Catalog& catalog() const { return catalog_; }
  const std::optional<BeliefPrior>& prior() const { return prior_; }
  const CostModel& cost() const { return cost_; }

  /// True when every product's demand can be resolved.
  bool resolvable() const;
  /// True when demand does not change with slot position.
  bool position_independent() const;

  /// Throws std::invalid_argument when the product has no override and no
  /// prior was given.
  double lambda(const Product& product, int position) const;
  double share(const Product& product) const;
  SlotTerms terms(const Product& product, int position) const;
  /// Throws CatalogError on unknown ids.
  std::vector<SlotTerms> slate_terms(std::span<const std::string> ids) const;

 private:
  Catalog catalog_;
  std::optional<BeliefPrior> prior_;
  CostModel cost_;
  std::optional<double> uniform_share_;
};

SlateEvaluation evaluate_slate(const Ranking& slate,
                               const AttentionSpanDist& dist,
                               const DemandInputs& inputs);

double expected_revenue_fixed(const Ranking& slate, int span,
                              const DemandInputs& inputs);
double expected_revenue(const Ranking& slate, const AttentionSpanDist& dist,
                        const DemandInputs& inputs);

/// Enumeration refused because the search space is too large.
class GuardError : public std::runtime_error {
 public:
  GuardError(const std::string& what, std::uint64_t slates)
      : std::runtime_error(what), slates_(slates) {}
  std::uint64_t slates() const { return slates_; }

 private:
  std::uint64_t slates_;
};

inline constexpr std::size_t kMaxEnumerationProducts = 12;
inline constexpr int kMaxEnumerationSlots = 8;
inline constexpr std::uint64_t kMaxEnumeratedSlates = 50'000'000;

/// Number of nonempty ordered slates of length <= slots drawn from
/// `products` items. Saturates at UINT64_MAX.
std::uint64_t enumeration_count(std::size_t products, int slots);

struct OptimizationResult {
  Ranking best;
  double value = 0.0;
  /// value minus the comparison slate's expected revenue.
  std::optional<double> gap;
  std::uint64_t slates_evaluated = 0;
};

/// Exact maximizer of expected revenue over every nonempty ordered slate
/// of at most `slots` products. Ties go to the lexicographically smallest
/// id sequence. Throws GuardError past the enumeration limits and
/// std::invalid_argument when demand cannot be resolved.
OptimizationResult brute_force_optimize(
    const DemandInputs& inputs, int slots, const AttentionSpanDist& dist,
    const std::optional<Ranking>& compare = std::nullopt);

}  // namespace shelfrank
