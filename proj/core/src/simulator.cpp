#include "shelfrank/simulator.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <random>
#include <set>

#include "shelfrank/format.hpp"
#include "shelfrank/random.hpp"

namespace shelfrank {

namespace {

int draw_span(const AttentionSpanDist& dist, double u) {
  double cumulative = 0.0;
  for (const auto& m : dist.support()) {
    cumulative += m.probability;
    if (u < cumulative) return m.span;
  }
  return dist.max_span();
}

std::vector<std::size_t> indices_of(const Catalog& catalog,
                                    std::span<const std::string> ids) {
  std::vector<std::size_t> out;
  out.reserve(ids.size());
  const auto products = catalog.products();
  for (const auto& id : ids) {
    const auto it = std::find_if(products.begin(), products.end(),
                                 [&](const Product& p) { return p.id == id; });
    if (it == products.end()) {
      throw SimulationError("slate references unknown product '" + id + "'");
    }
    out.push_back(static_cast<std::size_t>(it - products.begin()));
  }
  return out;
}

void validate(const Catalog& catalog, const SimConfig& cfg) {
  if (cfg.horizon < 1) throw SimulationError("horizon must be at least 1");
  if (cfg.cost.slope < 0.0) throw SimulationError("search cost slope must be nonnegative");
  if (cfg.clamp_ratings && !(cfg.clamp_ratings->low <= cfg.clamp_ratings->high)) {
    throw SimulationError("rating clamp needs low <= high");
  }
  std::vector<const Product*> shown;
  if (const auto* fixed = std::get_if<Ranking>(&cfg.slate)) {
    if (fixed->slots.empty()) throw SimulationError("fixed slate is empty");
    std::set<std::string_view> seen;
    for (auto idx : indices_of(catalog, fixed->slots)) {
      const auto& p = catalog.products()[idx];
      if (!seen.insert(p.id).second) {
        throw SimulationError("product '" + p.id + "' appears twice on the slate");
      }
      shown.push_back(&p);
    }
  } else {
    const auto& rerank = std::get<RerankPolicy>(cfg.slate);
    if (rerank.every < 1) throw SimulationError("re-rank interval must be at least 1");
    if (rerank.slots < 1) throw SimulationError("re-rank slot count must be at least 1");
    if (catalog.empty()) throw SimulationError("catalog is empty");
    for (const auto& p : catalog.products()) shown.push_back(&p);
  }
  if (cfg.freeze_beliefs) return;
  for (const auto* p : shown) {
    if (p->demand_override) continue;
    if (!p->true_quality || !p->rating_noise) {
      throw SimulationError("product '" + p->id +
                            "' needs true_quality and rating_noise when "
                            "beliefs evolve");
    }
  }
}

}  // namespace

SimTrace simulate(const Catalog& catalog, const SimConfig& cfg) {
  validate(catalog, cfg);
  const auto products = catalog.products();

  std::vector<ReviewState> states;
  states.reserve(products.size());
  for (const auto& p : products) states.push_back(review_state_of(p));

  const auto* rerank = std::get_if<RerankPolicy>(&cfg.slate);
  std::vector<std::size_t> slate;
  if (!rerank) slate = indices_of(catalog, std::get<Ranking>(cfg.slate).slots);

  SimTrace trace;
  trace.records.reserve(static_cast<std::size_t>(cfg.horizon));
  for (std::int64_t t = 1; t <= cfg.horizon; ++t) {
    if (rerank && (t - 1) % rerank->every == 0) {
      std::vector<Product> current(products.begin(), products.end());
      for (std::size_t k = 0; k < current.size(); ++k) {
        current[k].review_count = states[k].count;
        current[k].avg_rating = states[k].mean;
      }
      const auto ranked =
          two_stage_select(Catalog(std::move(current)), rerank->slots, rerank->ordering);
      slate = indices_of(catalog, ranked.ranking.slots);
    }

    StreamRng rng(cfg.seed, static_cast<std::uint64_t>(t));
    CustomerRecord rec;
    rec.t = t;
    rec.span = draw_span(cfg.span, rng.uniform());
    const int reach = std::min<int>(rec.span, static_cast<int>(slate.size()));
    for (int j = 1; j <= reach; ++j) {
      rec.viewed = j;
      const auto idx = slate[j - 1];
      const auto& p = products[idx];
      const double lambda = purchase_prob(p, states[idx], cfg.prior, j, cfg.cost);
      if (!(rng.uniform() < lambda)) continue;

      rec.slot = j;
      rec.product = p.id;
      if (p.true_quality && p.rating_noise) {
        double rating =
            std::normal_distribution<double>(*p.true_quality, *p.rating_noise)(rng);
        if (cfg.clamp_ratings) {
          rating = std::clamp(rating, cfg.clamp_ratings->low, cfg.clamp_ratings->high);
        }
        rec.rating = rating;
        if (!cfg.freeze_beliefs) states[idx] = update_review_state(states[idx], rating);
      }
      rec.post_state = states[idx];
      break;
    }
    trace.records.push_back(std::move(rec));
  }
  trace.summary = summarize(catalog, trace.records, cfg.prior);
  return trace;
}

SimSummary summarize(const Catalog& catalog,
                     std::span<const CustomerRecord> records,
                     const BeliefPrior& prior) {
  SimSummary s;
  s.customers = static_cast<std::int64_t>(records.size());
  std::map<std::string_view, std::size_t> index;
  for (const auto& p : catalog.products()) {
    index.emplace(p.id, s.products.size());
    s.products.push_back({p.id, 0, review_state_of(p), 0.0});
  }
  for (const auto& rec : records) {
    if (static_cast<std::size_t>(rec.viewed) > s.slot_purchases.size()) {
      s.slot_purchases.resize(rec.viewed, 0);
    }
    if (!rec.product) continue;
    const auto& p = catalog.at(*rec.product);
    auto& outcome = s.products[index.at(p.id)];
    ++s.purchases;
    ++outcome.purchases;
    if (rec.slot) {
      if (static_cast<std::size_t>(*rec.slot) > s.slot_purchases.size()) {
        s.slot_purchases.resize(*rec.slot, 0);
      }
      ++s.slot_purchases[*rec.slot - 1];
    }
    if (rec.post_state) outcome.final_state = *rec.post_state;
    s.gross_revenue += p.price;
    s.platform_revenue += p.price * p.revenue_share;
  }
  for (auto& outcome : s.products) {
    outcome.posterior_mean = posterior_mean(prior, outcome.final_state);
  }
  s.purchase_rate = s.customers > 0 ? static_cast<double>(s.purchases) /
                                          static_cast<double>(s.customers)
                                    : 0.0;
  return s;
}

void write_trace_table(std::ostream& out, std::span<const CustomerRecord> records) {
  out << "t\tspan\tviewed\tslot\tproduct\trating\treviews\tmean\n";
  for (const auto& rec : records) {
    out << rec.t << '\t' << rec.span << '\t' << rec.viewed << '\t';
    if (rec.slot) out << *rec.slot; else out << '-';
    out << '\t' << rec.product.value_or("-") << '\t';
    out << (rec.rating ? format_number(*rec.rating) : "-") << '\t';
    if (rec.post_state) {
      out << rec.post_state->count << '\t' << format_number(rec.post_state->mean);
    } else {
      out << "-\t-";
    }
    out << '\n';
  }
}

}  // namespace shelfrank
