#include "shelfrank/assortment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace shelfrank {

namespace {

constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

const Product& lookup(std::span<const Product> products, std::string_view id) {
  for (const auto& p : products) {
    if (p.id == id) return p;
  }
  throw std::invalid_argument("shortlist id '" + std::string(id) +
                              "' is not among the products");
}

// Stage-1 order: rating desc, review count desc, id asc.
bool quality_before(const Product& a, const Product& b) {
  if (a.avg_rating != b.avg_rating) return a.avg_rating > b.avg_rating;
  if (a.review_count != b.review_count) return a.review_count > b.review_count;
  return a.id < b.id;
}

bool price_before(const Product& a, const Product& b) {
  if (a.price != b.price) return a.price > b.price;
  const double la = a.demand_override.value_or(0.0);
  const double lb = b.demand_override.value_or(0.0);
  if (la != lb) return la > lb;
  return a.id < b.id;
}

double weighted_review_count(std::span<const Product> products, bool by_rating) {
  double mass = 0.0;
  double weight = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  bool signed_weights = false;
  for (const auto& p : products) {
    const double w = by_rating ? p.avg_rating : p.price;
    const auto n = static_cast<double>(p.review_count);
    mass += w * n;
    weight += w;
    signed_weights = signed_weights || w < 0.0;
    if (w > 0.0) {
      lo = std::min(lo, n);
      hi = std::max(hi, n);
    }
  }
  if (weight == 0.0) {
    throw std::domain_error(by_rating
                                ? "stage-1 threshold undefined: ratings sum to zero"
                                : "stage-2 threshold undefined: prices sum to zero");
  }
  // With nonnegative weights the mean cannot leave the range of its terms;
  // clamping undoes rounding that would otherwise push a lone product past
  // its own review count.
  const double mean = mass / weight;
  return signed_weights ? mean : std::clamp(mean, lo, hi);
}

bool weights_vanish(std::span<const Product> products, bool by_rating) {
  double weight = 0.0;
  for (const auto& p : products) weight += by_rating ? p.avg_rating : p.price;
  return weight == 0.0;
}

}  // namespace

std::string_view to_string(OrderingPolicy policy) {
  switch (policy) {
    case OrderingPolicy::kQualityOrder:
      return "quality";
    case OrderingPolicy::kPriceDescending:
      return "price-desc";
  }
  return "unknown";
}

std::optional<OrderingPolicy> parse_ordering_policy(std::string_view name) {
  if (name == "quality") return OrderingPolicy::kQualityOrder;
  if (name == "price-desc") return OrderingPolicy::kPriceDescending;
  return std::nullopt;
}

double stage1_threshold(std::span<const Product> products) {
  return weighted_review_count(products, /*by_rating=*/true);
}

double stage2_threshold(std::span<const Product> products) {
  return weighted_review_count(products, /*by_rating=*/false);
}

std::vector<std::string> stage1_rank(std::span<const Product> products,
                                     double threshold) {
  std::vector<const Product*> passing;
  for (const auto& p : products) {
    if (static_cast<double>(p.review_count) >= threshold) passing.push_back(&p);
  }
  std::sort(passing.begin(), passing.end(),
            [](const Product* a, const Product* b) { return quality_before(*a, *b); });
  std::vector<std::string> ids;
  ids.reserve(passing.size());
  for (const auto* p : passing) ids.push_back(p->id);
  return ids;
}

std::vector<std::string> stage2_filter(std::span<const std::string> shortlist,
                                       double threshold,
                                       std::span<const Product> products,
                                       OrderingPolicy policy) {
  std::vector<const Product*> passing;
  for (const auto& id : shortlist) {
    const auto& p = lookup(products, id);
    if (static_cast<double>(p.review_count) >= threshold) passing.push_back(&p);
  }
  if (policy == OrderingPolicy::kPriceDescending) {
    std::sort(passing.begin(), passing.end(),
              [](const Product* a, const Product* b) { return price_before(*a, *b); });
  }
  std::vector<std::string> ids;
  ids.reserve(passing.size());
  for (const auto* p : passing) ids.push_back(p->id);
  return ids;
}

TwoStageIteration two_stage_step(std::span<const Product> pool,
                                 OrderingPolicy policy) {
  if (pool.empty()) throw std::invalid_argument("two-stage step on an empty pool");
  TwoStageIteration it;
  it.stage1_threshold = kUndefined;
  it.stage2_threshold = kUndefined;

  if (!weights_vanish(pool, /*by_rating=*/true)) {
    it.stage1_threshold = stage1_threshold(pool);
    it.stage1_order = stage1_rank(pool, it.stage1_threshold);
  }
  if (it.stage1_order.empty()) {
    // Nobody clears the review bar: take the most reviewed product.
    const auto best = std::min_element(
        pool.begin(), pool.end(), [](const Product& a, const Product& b) {
          return std::forward_as_tuple(b.review_count, b.avg_rating, a.id) <
                 std::forward_as_tuple(a.review_count, a.avg_rating, b.id);
        });
    it.selected = best->id;
    it.fallback_used = true;
    return it;
  }

  std::vector<Product> shortlist;
  shortlist.reserve(it.stage1_order.size());
  for (const auto& id : it.stage1_order) shortlist.push_back(lookup(pool, id));
  if (!weights_vanish(shortlist, /*by_rating=*/false)) {
    it.stage2_threshold = stage2_threshold(shortlist);
    it.stage2_passers =
        stage2_filter(it.stage1_order, it.stage2_threshold, pool, policy);
  }
  if (it.stage2_passers.empty()) {
    it.selected = it.stage1_order.front();
    it.fallback_used = true;
  } else {
    it.selected = it.stage2_passers.front();
  }
  return it;
}

TwoStageResult two_stage_select(const Catalog& catalog, int slots,
                                OrderingPolicy policy) {
  if (slots < 1) {
    throw std::invalid_argument("slot count must be at least 1, got " +
                                std::to_string(slots));
  }
  TwoStageResult result;
  result.ranking.slot_count = slots;
  std::vector<Product> pool(catalog.products().begin(), catalog.products().end());
  while (static_cast<int>(result.ranking.slots.size()) < slots && !pool.empty()) {
    auto it = two_stage_step(pool, policy);
    std::erase_if(pool, [&](const Product& p) { return p.id == it.selected; });
    result.ranking.slots.push_back(it.selected);
    result.trace.iterations.push_back(std::move(it));
  }
  return result;
}

}  // namespace shelfrank
