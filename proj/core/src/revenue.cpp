#include "shelfrank/revenue.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace shelfrank {

namespace {

constexpr double kPmfTolerance = 1e-12;
constexpr double kDualFormTolerance = 1e-10;

void check_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    std::ostringstream msg;
    msg << "purchase probability " << lambda << " outside (0, 1)";
    throw std::invalid_argument(msg.str());
  }
}

void check_slots(std::span<const SlotTerms> slots) {
  for (const auto& t : slots) check_lambda(t.lambda);
}

}  // namespace

// AttentionSpanDist

AttentionSpanDist AttentionSpanDist::deterministic(int span) {
  if (span < 1) {
    throw std::invalid_argument("attention span must be at least 1, got " +
                                std::to_string(span));
  }
  return AttentionSpanDist({{span, 1.0}});
}

AttentionSpanDist AttentionSpanDist::from_pmf(std::vector<SpanMass> pmf) {
  if (pmf.empty()) throw std::invalid_argument("attention span pmf is empty");
  std::sort(pmf.begin(), pmf.end(),
            [](const SpanMass& a, const SpanMass& b) { return a.span < b.span; });
  double total = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    if (pmf[i].span < 1) {
      throw std::invalid_argument("attention spans must be at least 1");
    }
    if (i > 0 && pmf[i].span == pmf[i - 1].span) {
      throw std::invalid_argument("attention span " +
                                  std::to_string(pmf[i].span) +
                                  " listed twice");
    }
    if (!(pmf[i].probability >= 0.0) || !std::isfinite(pmf[i].probability)) {
      throw std::invalid_argument("attention span probabilities must be nonnegative");
    }
    total += pmf[i].probability;
  }
  if (std::abs(total - 1.0) > kPmfTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "attention span probabilities sum to " << total << ", not 1";
    throw std::invalid_argument(msg.str());
  }
  return AttentionSpanDist(std::move(pmf));
}

double AttentionSpanDist::mass(int span) const {
  for (const auto& m : pmf_) {
    if (m.span == span) return m.probability;
  }
  return 0.0;
}

double AttentionSpanDist::tail(int span) const {
  double total = 0.0;
  for (auto it = pmf_.rbegin(); it != pmf_.rend() && it->span >= span; ++it) {
    total += it->probability;
  }
  return total;
}

// Slate arithmetic

SlateEvaluation cascade_probs(std::span<const double> lambdas) {
  SlateEvaluation eval;
  eval.per_slot_purchase_prob.reserve(lambdas.size());
  double survival = 1.0;
  for (double lambda : lambdas) {
    check_lambda(lambda);
    eval.per_slot_purchase_prob.push_back(survival * lambda);
    survival *= 1.0 - lambda;
  }
  eval.no_purchase_prob = survival;
  return eval;
}

std::vector<double> cumulative_revenue(std::span<const SlotTerms> slots) {
  check_slots(slots);
  std::vector<double> cumulative(slots.size() + 1, 0.0);
  double survival = 1.0;
  for (std::size_t k = 0; k < slots.size(); ++k) {
    cumulative[k + 1] = cumulative[k] + slot_revenue(survival, slots[k]);
    survival *= 1.0 - slots[k].lambda;
  }
  return cumulative;
}

double expected_revenue_fixed(std::span<const SlotTerms> slots, int span) {
  if (span < 1) {
    throw std::invalid_argument("attention span must be at least 1, got " +
                                std::to_string(span));
  }
  const auto cumulative = cumulative_revenue(slots);
  return cumulative[std::min<std::size_t>(span, slots.size())];
}

double expected_revenue_by_span(std::span<const SlotTerms> slots,
                                const AttentionSpanDist& dist) {
  const auto cumulative = cumulative_revenue(slots);
  double total = 0.0;
  for (const auto& m : dist.support()) {
    total += m.probability *
             cumulative[std::min<std::size_t>(m.span, slots.size())];
  }
  return total;
}

double expected_revenue_by_tail(std::span<const SlotTerms> slots,
                                const AttentionSpanDist& dist) {
  check_slots(slots);
  double total = 0.0;
  double survival = 1.0;
  for (std::size_t k = 0; k < slots.size(); ++k) {
    total += slot_revenue(survival, slots[k]) *
             dist.tail(static_cast<int>(k) + 1);
    survival *= 1.0 - slots[k].lambda;
  }
  return total;
}

double expected_revenue(std::span<const SlotTerms> slots,
                        const AttentionSpanDist& dist) {
  const double by_span = expected_revenue_by_span(slots, dist);
  const double by_tail = expected_revenue_by_tail(slots, dist);
  if (std::abs(by_span - by_tail) >
      kDualFormTolerance * std::max(1.0, std::abs(by_span))) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "expected revenue forms disagree: " << by_span << " vs " << by_tail;
    throw std::logic_error(msg.str());
  }
  return by_span;
}

// DemandInputs

DemandInputs::DemandInputs(Catalog catalog, std::optional<BeliefPrior> prior,
                           CostModel cost, std::optional<double> uniform_share)
    : catalog_(std::move(catalog)),
      prior_(prior),
      cost_(cost),
      uniform_share_(uniform_share) {
  if (uniform_share_ && !(*uniform_share_ > 0.0 && *uniform_share_ <= 1.0)) {
    throw std::invalid_argument("uniform revenue share must lie in (0, 1]");
  }
  if (cost_.slope < 0.0 || !std::isfinite(cost_.slope)) {
    throw std::invalid_argument("search cost slope must be nonnegative");
  }
}

bool DemandInputs::resolvable() const {
  if (prior_) return true;
  return std::all_of(catalog_.products().begin(), catalog_.products().end(),
                     [](const Product& p) { return p.demand_override.has_value(); });
}

bool DemandInputs::position_independent() const {
  if (cost_.slope == 0.0) return true;
  return std::all_of(catalog_.products().begin(), catalog_.products().end(),
                     [](const Product& p) { return p.demand_override.has_value(); });
}

double DemandInputs::lambda(const Product& product, int position) const {
  if (!product.demand_override && !prior_) {
    throw std::invalid_argument("product '" + product.id +
                                "' has no purchase probability and no belief "
                                "prior was supplied");
  }
  // The prior is never read when the product carries an override.
  return purchase_prob(product, prior_.value_or(BeliefPrior(0.0, 1.0, 1.0)),
                       position, cost_);
}

double DemandInputs::share(const Product& product) const {
  return uniform_share_.value_or(product.revenue_share);
}

SlotTerms DemandInputs::terms(const Product& product, int position) const {
  return {lambda(product, position), product.price, share(product)};
}

std::vector<SlotTerms> DemandInputs::slate_terms(
    std::span<const std::string> ids) const {
  std::vector<SlotTerms> out;
  out.reserve(ids.size());
  for (std::size_t k = 0; k < ids.size(); ++k) {
    out.push_back(terms(catalog_.at(ids[k]), static_cast<int>(k) + 1));
  }
  return out;
}

SlateEvaluation evaluate_slate(const Ranking& slate,
                               const AttentionSpanDist& dist,
                               const DemandInputs& inputs) {
  const auto terms = inputs.slate_terms(slate.slots);
  std::vector<double> lambdas;
  lambdas.reserve(terms.size());
  for (const auto& t : terms) lambdas.push_back(t.lambda);
  auto eval = cascade_probs(lambdas);
  eval.expected_revenue = expected_revenue(terms, dist);
  return eval;
}

double expected_revenue_fixed(const Ranking& slate, int span,
                              const DemandInputs& inputs) {
  if (slate.slots.empty()) throw std::invalid_argument("slate is empty");
  return expected_revenue_fixed(inputs.slate_terms(slate.slots), span);
}

double expected_revenue(const Ranking& slate, const AttentionSpanDist& dist,
                        const DemandInputs& inputs) {
  return expected_revenue(inputs.slate_terms(slate.slots), dist);
}

// Exhaustive search

std::uint64_t enumeration_count(std::size_t products, int slots) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 0;
  std::uint64_t falling = 1;
  const auto depth = std::min<std::size_t>(products, slots < 0 ? 0 : slots);
  for (std::size_t m = 0; m < depth; ++m) {
    const std::uint64_t factor = products - m;
    if (falling > kMax / factor) return kMax;
    falling *= factor;
    if (total > kMax - falling) return kMax;
    total += falling;
  }
  return total;
}

namespace {

struct Search {
  std::span<const SlotTerms> table;  // product-major, `depth` positions each
  std::span<const std::string> ids;
  std::span<const SpanMass> support;
  std::size_t depth;

  std::vector<std::size_t> current;
  std::vector<bool> used;
  std::vector<double> cumulative;

  std::vector<std::size_t> best;
  double best_value = -std::numeric_limits<double>::infinity();
  std::uint64_t evaluated = 0;

  bool ids_before(const std::vector<std::size_t>& a,
                  const std::vector<std::size_t>& b) const {
    return std::lexicographical_compare(
        a.begin(), a.end(), b.begin(), b.end(),
        [&](std::size_t x, std::size_t y) { return ids[x] < ids[y]; });
  }

  void visit(double survival) {
    const std::size_t length = current.size();
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (used[k]) continue;
      const auto& t = table[k * depth + length];
      cumulative[length + 1] = cumulative[length] + slot_revenue(survival, t);
      current.push_back(k);
      used[k] = true;

      double value = 0.0;
      for (const auto& m : support) {
        value += m.probability *
                 cumulative[std::min<std::size_t>(m.span, length + 1)];
      }
      ++evaluated;
      if (value > best_value || (value == best_value && ids_before(current, best))) {
        best_value = value;
        best = current;
      }
      if (length + 1 < depth) visit(survival * (1.0 - t.lambda));

      used[k] = false;
      current.pop_back();
    }
  }
};

}  // namespace

OptimizationResult brute_force_optimize(const DemandInputs& inputs, int slots,
                                        const AttentionSpanDist& dist,
                                        const std::optional<Ranking>& compare) {
  if (slots < 1) {
    throw std::invalid_argument("slot count must be at least 1, got " +
                                std::to_string(slots));
  }
  const auto products = inputs.catalog().products();
  if (products.empty()) throw std::invalid_argument("catalog is empty");
  const std::size_t count = products.size();
  const std::uint64_t slates = enumeration_count(count, slots);
  const std::size_t depth = std::min<std::size_t>(count, slots);
  if (count > kMaxEnumerationProducts ||
      depth > static_cast<std::size_t>(kMaxEnumerationSlots) ||
      slates > kMaxEnumeratedSlates) {
    std::ostringstream msg;
    msg << "exhaustive search over " << count << " products and " << slots
        << " slots would evaluate " << slates << " slates (limits: "
        << kMaxEnumerationProducts << " products, " << kMaxEnumerationSlots
        << " slots, " << kMaxEnumeratedSlates << " slates)";
    throw GuardError(msg.str(), slates);
  }
  if (!inputs.resolvable()) {
    throw std::invalid_argument(
        "purchase probabilities cannot be resolved: some products lack a "
        "demand override and no belief prior was supplied");
  }

  std::vector<SlotTerms> table;
  table.reserve(count * depth);
  std::vector<std::string> ids;
  for (const auto& p : products) {
    ids.push_back(p.id);
    for (std::size_t j = 0; j < depth; ++j) {
      auto t = inputs.terms(p, static_cast<int>(j) + 1);
      check_lambda(t.lambda);
      table.push_back(t);
    }
  }

  Search search{table, ids, dist.support(), depth, {}, {}, {}, {}, {}, 0};
  search.used.assign(count, false);
  search.cumulative.assign(depth + 1, 0.0);
  search.current.reserve(depth);
  search.visit(1.0);

  OptimizationResult result;
  result.best.slot_count = slots;
  for (auto k : search.best) result.best.slots.push_back(ids[k]);
  result.value = search.best_value;
  result.slates_evaluated = search.evaluated;
  if (compare) {
    result.gap = result.value - expected_revenue(*compare, dist, inputs);
  }
  return result;
}

}  // namespace shelfrank
