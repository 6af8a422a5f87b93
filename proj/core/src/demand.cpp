#include "shelfrank/demand.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace shelfrank {

double search_cost(int position, const CostModel& cost) {
  if (position < 1) {
    throw std::invalid_argument("slot position must be at least 1, got " +
                                std::to_string(position));
  }
  return cost.slope * static_cast<double>(position - 1);
}

double posterior_mean(const BeliefPrior& prior, const ReviewState& state) {
  const double weighted = prior.precision_ratio() *
                          static_cast<double>(state.count);
  const double denom = weighted + 1.0;
  return prior.prior_mean() / denom + weighted * state.mean / denom;
}

ReviewState update_review_state(const ReviewState& state,
                                std::optional<double> rating) {
  if (!rating) return state;
  const auto n = static_cast<double>(state.count);
  return {state.count + 1, (n * state.mean + *rating) / (n + 1.0)};
}

double expected_utility(const BeliefPrior& prior, const ReviewState& state,
                        double price, int position, const CostModel& cost) {
  return posterior_mean(prior, state) - price - search_cost(position, cost);
}

double logistic(double x) {
  // Results are kept strictly inside (0, 1); past |x| ~ 37 the exact value
  // rounds to 1 in double precision, so the largest double below 1 stands in.
  constexpr double kBelowOne = 1.0 - std::numeric_limits<double>::epsilon() / 2;
  constexpr double kAboveZero = std::numeric_limits<double>::denorm_min();
  double value;
  if (x >= 0.0) {
    value = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    value = e / (1.0 + e);
  }
  return std::clamp(value, kAboveZero, kBelowOne);
}

double purchase_prob(const Product& product, const ReviewState& state,
                     const BeliefPrior& prior, int position,
                     const CostModel& cost) {
  const double g = search_cost(position, cost);
  if (product.demand_override) return *product.demand_override;
  return logistic(posterior_mean(prior, state) - product.price - g);
}

double purchase_prob(const Product& product, const BeliefPrior& prior,
                     int position, const CostModel& cost) {
  return purchase_prob(product, review_state_of(product), prior, position,
                       cost);
}

std::vector<std::string> utility_scale_warnings(const Catalog& catalog,
                                                const BeliefPrior& prior,
                                                const CostModel& cost,
                                                int max_position) {
  std::vector<std::string> out;
  for (const auto& p : catalog.products()) {
    if (p.demand_override) continue;
    for (int j = 1; j <= max_position; ++j) {
      const double chi =
          expected_utility(prior, review_state_of(p), p.price, j, cost);
      if (std::abs(chi) > kUtilityScaleWarning) {
        std::ostringstream msg;
        msg << "product '" << p.id << "' at slot " << j << ": utility "
            << chi << " saturates the logit; check price and rating units";
        out.push_back(msg.str());
      }
    }
  }
  return out;
}

}  // namespace shelfrank
