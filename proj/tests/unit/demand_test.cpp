#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "shelfrank/demand.hpp"

namespace shelfrank {
namespace {

TEST(SearchCost, TopSlotIsFree) {
  EXPECT_EQ(search_cost(1, {0.3}), 0.0);
  EXPECT_DOUBLE_EQ(search_cost(4, {0.3}), 0.9);
  EXPECT_EQ(search_cost(7, {0.0}), 0.0);
  EXPECT_THROW(search_cost(0, {0.3}), std::invalid_argument);
  EXPECT_THROW(search_cost(-2, {0.3}), std::invalid_argument);
}

TEST(SearchCost, StrictlyIncreasingWithPositiveSlope) {
  for (int j = 1; j < 50; ++j) {
    EXPECT_LT(search_cost(j, {0.05}), search_cost(j + 1, {0.05}));
  }
}

TEST(PosteriorMean, NoReviewsReturnsPrior) {
  for (double var : {0.1, 1.0, 7.0}) {
    EXPECT_EQ(posterior_mean(BeliefPrior(2.0, var, 1.0), {0, 0.0}), 2.0);
  }
}

TEST(PosteriorMean, HandEvaluations) {
  // 0/2 + 1*4/2
  EXPECT_DOUBLE_EQ(posterior_mean(BeliefPrior(0.0, 1.0, 1.0), {1, 4.0}), 2.0);
  // rho = 0.5, n = 4: 3/3 + 2*5/3
  EXPECT_NEAR(posterior_mean(BeliefPrior(3.0, 0.5, 1.0), {4, 5.0}), 13.0 / 3.0, 1e-12);
}

TEST(ReviewState, Updates) {
  EXPECT_EQ(update_review_state({0, 0.0}, 4.0), (ReviewState{1, 4.0}));
  const auto s = update_review_state({2, 3.0}, 5.0);
  EXPECT_EQ(s.count, 3);
  EXPECT_NEAR(s.mean, 11.0 / 3.0, 1e-12);
  EXPECT_EQ(update_review_state({7, 4.2}, std::nullopt), (ReviewState{7, 4.2}));
}

TEST(ExpectedUtility, Examples) {
  const BeliefPrior prior(0.0, 1.0, 1.0);
  const ReviewState state{1, 4.0};  // posterior mean 2.0
  EXPECT_EQ(expected_utility(BeliefPrior(2.0, 1.0, 1.0), {0, 0.0}, 2.0, 1, {0.1}), 0.0);
  EXPECT_DOUBLE_EQ(expected_utility(prior, state, 1.5, 1, {0.0}), 0.5);
  EXPECT_DOUBLE_EQ(expected_utility(prior, state, 1.5, 3, {0.25}), 0.0);
  EXPECT_THROW(expected_utility(prior, state, 1.5, 0, {0.25}), std::invalid_argument);
}

TEST(Logistic, Values) {
  EXPECT_EQ(logistic(0.0), 0.5);
  // 1 / (1 + e^2), evaluated independently
  EXPECT_NEAR(logistic(-2.0), 0.11920292202211755, 1e-15);
  EXPECT_NEAR(logistic(2.0), 1.0 - 0.11920292202211755, 1e-15);
}

TEST(Logistic, StaysInsideOpenUnitInterval) {
  for (double x = -700.0; x <= 700.0; x += 0.5) {
    const double v = logistic(x);
    ASSERT_TRUE(std::isfinite(v)) << x;
    ASSERT_GT(v, 0.0) << x;
    ASSERT_LT(v, 1.0) << x;
  }
}

TEST(PurchaseProb, OverrideWins) {
  Product a{.id = "A", .price = 629, .review_count = 61806, .avg_rating = 4.0,
            .demand_override = 0.95};
  EXPECT_EQ(purchase_prob(a, BeliefPrior(0.0, 1.0, 1.0), 1, {0.1}), 0.95);
  EXPECT_EQ(purchase_prob(a, BeliefPrior(0.0, 1.0, 1.0), 9, {0.1}), 0.95);
  EXPECT_THROW(purchase_prob(a, BeliefPrior(0.0, 1.0, 1.0), 0, {0.1}), std::invalid_argument);
}

TEST(PurchaseProb, ComputedPath) {
  Product p{.id = "X", .price = 1.5, .review_count = 1, .avg_rating = 4.0};
  // utility 0.5 at the top slot with c = 0
  EXPECT_NEAR(purchase_prob(p, BeliefPrior(0.0, 1.0, 1.0), 1, {0.0}),
              1.0 / (1.0 + std::exp(-0.5)), 1e-15);
}

TEST(UtilityWarnings, FireOnlyForLargeUtilities) {
  Product cheap{.id = "cheap", .price = 1.0, .review_count = 5, .avg_rating = 4.0};
  Product pricey{.id = "pricey", .price = 629.0, .review_count = 5, .avg_rating = 4.0};
  Product fixed{.id = "fixed", .price = 629.0, .review_count = 5, .avg_rating = 4.0,
                .demand_override = 0.5};
  const auto w = utility_scale_warnings(Catalog({cheap, pricey, fixed}),
                                        BeliefPrior(0.0, 1.0, 1.0), {0.1}, 2);
  ASSERT_EQ(w.size(), 2u);
  EXPECT_NE(w[0].find("pricey"), std::string::npos);
}

// Property: the posterior mean is a convex combination of prior mean and
// average rating, and converges monotonically toward the rating.
TEST(DemandProperty, PosteriorIsConvexAndMonotone) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> value(-5.0, 5.0);
  std::uniform_real_distribution<double> var(0.05, 4.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const BeliefPrior prior(value(rng), var(rng), var(rng));
    const double qbar = value(rng);
    double previous_gap = std::abs(prior.prior_mean() - qbar);
    for (std::int64_t n = 0; n <= 64; n = n == 0 ? 1 : n * 2) {
      const double mu = posterior_mean(prior, {n, qbar});
      const double w = 1.0 / (prior.precision_ratio() * static_cast<double>(n) + 1.0);
      ASSERT_NEAR(mu, w * prior.prior_mean() + (1.0 - w) * qbar, 1e-12);
      ASSERT_GE(mu, std::min(prior.prior_mean(), qbar) - 1e-12);
      ASSERT_LE(mu, std::max(prior.prior_mean(), qbar) + 1e-12);
      const double gap = std::abs(mu - qbar);
      ASSERT_LE(gap, previous_gap + 1e-12);
      previous_gap = gap;
    }
  }
}

TEST(DemandProperty, PurchaseProbMonotone) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  const BeliefPrior prior(1.0, 1.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    Product p{.id = "X", .price = u(rng), .review_count = 10, .avg_rating = u(rng)};
    const CostModel cost{0.05 + u(rng) / 10};
    const double base = purchase_prob(p, prior, 2, cost);
    Product dearer = p;
    dearer.price += 0.1;
    Product better = p;
    better.avg_rating += 0.1;
    ASSERT_LT(purchase_prob(dearer, prior, 2, cost), base);
    ASSERT_LT(purchase_prob(p, prior, 3, cost), base);
    ASSERT_GT(purchase_prob(better, prior, 2, cost), base);
  }
}

// Property: after ratings r1..rm from the empty state, the mean is their
// arithmetic mean.
TEST(DemandProperty, RunningMeanIdentity) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> rating(3.5, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    ReviewState s;
    double sum = 0.0;
    const int m = 1 + trial;
    for (int i = 0; i < m; ++i) {
      const double r = rating(rng);
      sum += r;
      s = update_review_state(s, r);
    }
    ASSERT_EQ(s.count, m);
    ASSERT_NEAR(s.mean, sum / m, 1e-12);
  }
}

}  // namespace
}  // namespace shelfrank
