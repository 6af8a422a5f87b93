#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shelfrank/catalog.hpp"

namespace shelfrank {

/// Linear search cost c * (position - 1); zero at the top slot.
struct CostModel {
  double slope = 0.1;
};

/// Sufficient statistic of a product's review history.
struct ReviewState {
  std::int64_t count = 0;
  double mean = 0.0;

  bool operator==(const ReviewState&) const = default;
};

inline ReviewState review_state_of(const Product& p) {
  return {p.review_count, p.avg_rating};
}

/// Throws std::invalid_argument for position < 1.
double search_cost(int position, const CostModel& cost);

/// Posterior mean of quality after observing `state`:
/// mu0 / (rho n + 1) + rho n qbar / (rho n + 1).
double posterior_mean(const BeliefPrior& prior, const ReviewState& state);

/// Running-mean update after a purchase with `rating`; identity when no
/// purchase happened.
ReviewState update_review_state(const ReviewState& state,
                                std::optional<double> rating);

/// Posterior mean minus price minus search cost at `position`.
double expected_utility(const BeliefPrior& prior, const ReviewState& state,
                        double price, int position, const CostModel& cost);

/// exp(x) / (1 + exp(x)) without overflow for large |x|.
double logistic(double x);

/// Demand override when present, otherwise the logit of expected_utility.
double purchase_prob(const Product& product, const BeliefPrior& prior,
                     int position, const CostModel& cost);

/// Same as purchase_prob but with the review state supplied separately, so
/// callers can evaluate evolving beliefs without copying products.
double purchase_prob(const Product& product, const ReviewState& state,
                     const BeliefPrior& prior, int position,
                     const CostModel& cost);

/// |utility| above which the logit saturates; prices and ratings are likely
/// on incommensurate scales.
inline constexpr double kUtilityScaleWarning = 50.0;

/// One message per (product, position) whose computed utility exceeds
/// kUtilityScaleWarning in magnitude. Products with a demand override are
/// skipped.
std::vector<std::string> utility_scale_warnings(const Catalog& catalog,
                                                const BeliefPrior& prior,
                                                const CostModel& cost,
                                                int max_position);

}  // namespace shelfrank
