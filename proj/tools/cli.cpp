#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "shelfrank/assortment.hpp"
#include "shelfrank/catalog.hpp"
#include "shelfrank/collusion.hpp"
#include "shelfrank/format.hpp"
#include "shelfrank/report.hpp"
#include "shelfrank/simulator.hpp"
#include "shelfrank/version.hpp"

namespace shelfrank::cli {

using nlohmann::json;

namespace {

double to_double(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw UsageError("invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

int to_int(std::string_view text, std::string_view what) {
  int value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw UsageError("invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

std::string read_file(const std::string& path, std::string_view what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + std::string(what) + " '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string describe_span(const AttentionSpanDist& dist) {
  if (dist.is_deterministic()) return "y=" + std::to_string(dist.max_span());
  std::string out = "pmf=";
  bool first = true;
  for (const auto& m : dist.support()) {
    if (!first) out += ",";
    first = false;
    out += std::to_string(m.span) + ":" + format_number(m.probability);
  }
  return out;
}

// Options shared by every subcommand.
struct Common {
  std::string catalog_path;
  std::string format = "text";
  double prior_mean = 0.0;
  double prior_var = 1.0;
  double noise_var = 1.0;
  double cost_slope = 0.1;
  std::string omega;

  json config() const {
    json c = {{"catalog", catalog_path},
              {"format", format},
              {"prior_mean", prior_mean},
              {"prior_var", prior_var},
              {"noise_var", noise_var},
              {"cost_slope", cost_slope}};
    c["omega"] = omega.empty() ? json("catalog") : json(omega);
    return c;
  }
};

struct Loaded {
  Catalog catalog;
  std::string digest;
};

Loaded load(const Common& common) {
  if (common.catalog_path.empty()) throw UsageError("--catalog is required");
  const auto bytes = read_file(common.catalog_path, "catalog file");
  return {load_catalog(bytes), content_digest(bytes)};
}

DemandInputs demand_inputs(const Common& common, const Catalog& catalog,
                           std::ostream& err) {
  std::optional<double> share;
  if (!common.omega.empty()) share = parse_omega_spec(common.omega);
  BeliefPrior prior(common.prior_mean, common.prior_var, common.noise_var);
  CostModel cost{common.cost_slope};
  for (const auto& w : utility_scale_warnings(catalog, prior, cost, 1)) {
    err << "warning: " << w << "\n";
  }
  return DemandInputs(catalog, prior, cost, share);
}

class Reporter {
 public:
  Reporter(std::ostream& out, const Common& common, RunManifest manifest)
      : out_(out), structured_(common.format == "structured"),
        manifest_(std::move(manifest)) {
    if (common.format != "text" && common.format != "structured") {
      throw UsageError("--format must be text or structured");
    }
  }

  bool structured() const { return structured_; }

  void emit_text(const std::string& body) {
    out_ << "# command: " << manifest_.command << "\n"
         << "# engine: " << manifest_.engine_version << "\n"
         << "# input: " << manifest_.input_digest << "\n"
         << "# config: " << manifest_.config.dump() << "\n"
         << body;
  }

  void emit_json(json result) {
    json doc = {{"manifest", manifest_.to_json()}, {"result", std::move(result)}};
    out_ << doc.dump(2) << "\n";
  }

 private:
  std::ostream& out_;
  bool structured_;
  RunManifest manifest_;
};

RunManifest manifest_for(std::string command, json config, std::string digest) {
  return {std::move(command), std::move(config), std::move(digest),
          std::string("shelfrank ") + std::string(kEngineVersion)};
}

// rank

struct RankOptions {
  int slots = 0;
  std::string policy = "quality";
  bool trace = false;
};

int cmd_rank(const Common& common, const RankOptions& opt, std::ostream& out) {
  const auto policy = parse_ordering_policy(opt.policy);
  if (!policy) throw UsageError("--policy must be quality or price-desc");
  auto [catalog, digest] = load(common);
  if (catalog.empty()) throw UsageError("catalog has no products");
  const auto result = two_stage_select(catalog, opt.slots, *policy);

  json config = common.config();
  config["slots"] = opt.slots;
  config["policy"] = opt.policy;
  config["trace"] = opt.trace;
  Reporter report(out, common, manifest_for("rank", config, digest));
  if (report.structured()) {
    json result_doc = {{"ranking", to_json(result.ranking)}};
    if (opt.trace) result_doc["trace"] = to_json(result.trace);
    report.emit_json(std::move(result_doc));
    return kOk;
  }
  std::ostringstream body;
  body << "ranking: " << join_ids(result.ranking.slots) << "\n";
  if (opt.trace) {
    int k = 1;
    for (const auto& it : result.trace.iterations) {
      body << "iteration " << k++ << ": stage1 threshold "
           << format_number(it.stage1_threshold) << ", stage1 order ["
           << join_ids(it.stage1_order) << "], stage2 threshold "
           << format_number(it.stage2_threshold) << ", stage2 passers ["
           << join_ids(it.stage2_passers) << "], selected " << it.selected
           << (it.fallback_used ? " (fallback)" : "") << "\n";
    }
  }
  report.emit_text(body.str());
  return kOk;
}

// expected-revenue

struct RevenueOptions {
  std::string slate;
  std::string span;
};

int cmd_expected_revenue(const Common& common, const RevenueOptions& opt,
                         std::ostream& out, std::ostream& err) {
  auto [catalog, digest] = load(common);
  Ranking slate{parse_slate(opt.slate), 0};
  if (slate.slots.empty()) throw UsageError("--slate is empty");
  slate.slot_count = static_cast<int>(slate.slots.size());
  const auto dist = opt.span.empty()
                        ? AttentionSpanDist::deterministic(slate.slot_count)
                        : parse_span_spec(opt.span);
  const auto inputs = demand_inputs(common, catalog, err);
  const auto eval = evaluate_slate(slate, dist, inputs);

  json config = common.config();
  config["slate"] = slate.slots;
  config["span"] = describe_span(dist);
  Reporter report(out, common, manifest_for("expected-revenue", config, digest));
  if (report.structured()) {
    report.emit_json({{"slate", slate.slots}, {"evaluation", to_json(eval)}});
    return kOk;
  }
  std::ostringstream body;
  body << "slate: " << join_ids(slate.slots) << "\n"
       << "span: " << describe_span(dist) << "\n";
  for (std::size_t k = 0; k < slate.slots.size(); ++k) {
    body << "slot " << k + 1 << " " << slate.slots[k] << ": purchase probability "
         << format_number(eval.per_slot_purchase_prob[k]) << "\n";
  }
  body << "no purchase: " << format_number(eval.no_purchase_prob) << "\n"
       << "expected revenue: " << format_number(eval.expected_revenue) << "\n";
  report.emit_text(body.str());
  return kOk;
}

// optimize

struct OptimizeOptions {
  int slots = 0;
  std::string span;
  std::string compare;
};

int cmd_optimize(const Common& common, const OptimizeOptions& opt,
                 std::ostream& out, std::ostream& err) {
  auto [catalog, digest] = load(common);
  const auto dist = opt.span.empty() ? AttentionSpanDist::deterministic(opt.slots)
                                     : parse_span_spec(opt.span);
  const auto inputs = demand_inputs(common, catalog, err);
  std::optional<Ranking> compare;
  if (!opt.compare.empty()) {
    compare = Ranking{parse_slate(opt.compare), 0};
    compare->slot_count = static_cast<int>(compare->slots.size());
  }
  const auto result = brute_force_optimize(inputs, opt.slots, dist, compare);

  json config = common.config();
  config["slots"] = opt.slots;
  config["span"] = describe_span(dist);
  config["compare"] = compare ? json(compare->slots) : json(nullptr);
  Reporter report(out, common, manifest_for("optimize", config, digest));
  if (report.structured()) {
    report.emit_json(to_json(result));
    return kOk;
  }
  std::ostringstream body;
  body << "best: " << join_ids(result.best.slots) << "\n"
       << "value: " << format_number(result.value) << "\n"
       << "slates evaluated: " << result.slates_evaluated << "\n";
  if (result.gap) {
    body << "gap vs " << join_ids(compare->slots) << ": "
         << format_number(*result.gap) << "\n";
  }
  report.emit_text(body.str());
  return kOk;
}

// audit

struct AuditOptions {
  std::string slate;
  std::string span;
  int slots = 0;
  std::string policy = "quality";
};

int cmd_audit(const Common& common, const AuditOptions& opt, std::ostream& out,
              std::ostream& err) {
  const auto policy = parse_ordering_policy(opt.policy);
  if (!policy) throw UsageError("--policy must be quality or price-desc");
  auto [catalog, digest] = load(common);
  Ranking displayed{parse_slate(opt.slate), 0};
  if (displayed.slots.empty()) throw UsageError("--slate is empty");
  displayed.slot_count = static_cast<int>(displayed.slots.size());
  const int slots = opt.slots > 0 ? opt.slots : displayed.slot_count;
  const auto dist = opt.span.empty()
                        ? AttentionSpanDist::deterministic(displayed.slot_count)
                        : parse_span_spec(opt.span);
  const auto inputs = demand_inputs(common, catalog, err);
  const auto findings = audit_ranking(inputs, displayed, slots, dist, *policy);

  json config = common.config();
  config["slate"] = displayed.slots;
  config["slots"] = slots;
  config["span"] = describe_span(dist);
  config["policy"] = opt.policy;
  Reporter report(out, common, manifest_for("audit", config, digest));
  if (report.structured()) {
    report.emit_json({{"displayed", displayed.slots}, {"findings", to_json(findings)}});
  } else {
    std::ostringstream body;
    body << "displayed: " << join_ids(displayed.slots) << "\n";
    if (findings.empty()) body << "findings: none\n";
    else body << "findings: " << findings.size() << "\n";
    for (const auto& f : findings) {
      body << "slot " << f.slot << " " << f.product_id << " " << to_string(f.kind)
           << " " << format_number(f.value) << ": " << f.detail << "\n";
    }
    report.emit_text(body.str());
  }
  return findings.empty() ? kOk : kFindings;
}

// simulate

struct SimulateOptions {
  std::string config_path;
  std::string out_prefix;
  std::optional<std::uint64_t> seed;
};

SimConfig parse_sim_config(const json& doc, const Catalog& catalog) {
  if (!doc.is_object()) throw UsageError("simulation config must be an object");
  SimConfig cfg;
  try {
    const auto horizon = doc.at("horizon").get<std::int64_t>();
    if (horizon < 1) throw UsageError("horizon must be at least 1");
    cfg.horizon = horizon;
    cfg.seed = doc.value("seed", std::uint64_t{0});
    cfg.span = parse_span_spec(doc.value("span", std::string("y=1")));
    if (doc.contains("slate") == doc.contains("rerank")) {
      throw UsageError("simulation config needs exactly one of 'slate' or 'rerank'");
    }
    if (doc.contains("slate")) {
      Ranking r{doc.at("slate").get<std::vector<std::string>>(), 0};
      r.slot_count = static_cast<int>(r.slots.size());
      for (const auto& id : r.slots) catalog.at(id);
      cfg.slate = std::move(r);
    } else {
      const auto& rr = doc.at("rerank");
      RerankPolicy policy;
      policy.every = rr.at("every").get<int>();
      policy.slots = rr.at("slots").get<int>();
      const auto name = rr.value("policy", std::string("quality"));
      const auto ordering = parse_ordering_policy(name);
      if (!ordering) throw UsageError("unknown re-rank policy '" + name + "'");
      policy.ordering = *ordering;
      cfg.slate = policy;
    }
    if (doc.contains("prior")) {
      const auto& p = doc.at("prior");
      cfg.prior = BeliefPrior(p.value("mean", 0.0), p.value("var", 1.0),
                              p.value("noise_var", 1.0));
    }
    cfg.cost.slope = doc.value("cost_slope", 0.1);
    cfg.freeze_beliefs = doc.value("freeze_beliefs", false);
    if (doc.contains("clamp_ratings")) {
      const auto c = doc.at("clamp_ratings").get<std::vector<double>>();
      if (c.size() != 2) throw UsageError("clamp_ratings must be [low, high]");
      cfg.clamp_ratings = RatingClamp{c[0], c[1]};
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("invalid simulation config: ") + e.what());
  }
  return cfg;
}

json sim_config_json(const SimConfig& cfg) {
  json c = {{"horizon", cfg.horizon},
            {"seed", cfg.seed},
            {"span", describe_span(cfg.span)},
            {"prior", {{"mean", cfg.prior.prior_mean()},
                       {"var", cfg.prior.prior_var()},
                       {"noise_var", cfg.prior.noise_var()}}},
            {"cost_slope", cfg.cost.slope},
            {"freeze_beliefs", cfg.freeze_beliefs}};
  if (const auto* r = std::get_if<Ranking>(&cfg.slate)) {
    c["slate"] = r->slots;
  } else {
    const auto& rr = std::get<RerankPolicy>(cfg.slate);
    c["rerank"] = {{"every", rr.every},
                   {"slots", rr.slots},
                   {"policy", std::string(to_string(rr.ordering))}};
  }
  c["clamp_ratings"] = cfg.clamp_ratings
                           ? json::array({cfg.clamp_ratings->low, cfg.clamp_ratings->high})
                           : json(nullptr);
  return c;
}

int cmd_simulate(const Common& common, const SimulateOptions& opt,
                 std::ostream& out) {
  auto [catalog, digest] = load(common);
  json doc;
  try {
    doc = json::parse(read_file(opt.config_path, "simulation config"));
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("malformed simulation config: ") + e.what());
  }
  auto cfg = parse_sim_config(doc, catalog);
  if (opt.seed) cfg.seed = *opt.seed;
  const auto trace = simulate(catalog, cfg);

  json config = common.config();
  config["simulation"] = sim_config_json(cfg);
  config["out"] = opt.out_prefix;
  const auto manifest = manifest_for("simulate", config, digest);

  if (!opt.out_prefix.empty()) {
    std::ofstream table(opt.out_prefix + ".tsv", std::ios::binary);
    std::ofstream summary(opt.out_prefix + ".summary.json", std::ios::binary);
    if (!table || !summary) {
      throw UsageError("cannot write outputs with prefix '" + opt.out_prefix + "'");
    }
    write_trace_table(table, trace.records);
    summary << json{{"manifest", manifest.to_json()},
                    {"summary", to_json(trace.summary)}}.dump(2)
            << "\n";
  }

  Reporter report(out, common, manifest);
  if (report.structured()) {
    report.emit_json(to_json(trace.summary));
    return kOk;
  }
  const auto& s = trace.summary;
  std::ostringstream body;
  body << "customers: " << s.customers << "\n"
       << "purchases: " << s.purchases << "\n"
       << "purchase rate: " << format_number(s.purchase_rate) << "\n"
       << "gross revenue: " << format_number(s.gross_revenue) << "\n"
       << "platform revenue: " << format_number(s.platform_revenue) << "\n"
       << "platform revenue per customer: "
       << format_number(s.platform_revenue / static_cast<double>(s.customers)) << "\n";
  for (std::size_t k = 0; k < s.slot_purchases.size(); ++k) {
    body << "slot " << k + 1 << " purchases: " << s.slot_purchases[k] << "\n";
  }
  for (const auto& p : s.products) {
    if (p.purchases == 0) continue;
    body << "product " << p.id << ": purchases " << p.purchases << ", reviews "
         << p.final_state.count << ", avg rating " << format_number(p.final_state.mean)
         << ", posterior mean " << format_number(p.posterior_mean) << "\n";
  }
  report.emit_text(body.str());
  return kOk;
}

}  // namespace

json RunManifest::to_json() const {
  return {{"command", command},
          {"config", config},
          {"input_digest", input_digest},
          {"engine_version", engine_version}};
}

AttentionSpanDist parse_span_spec(std::string_view spec) {
  if (spec.starts_with("y=")) {
    return AttentionSpanDist::deterministic(to_int(spec.substr(2), "attention span"));
  }
  if (spec.starts_with("pmf=")) {
    std::vector<SpanMass> pmf;
    auto rest = spec.substr(4);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto item = rest.substr(0, comma);
      const auto colon = item.find(':');
      if (colon == std::string_view::npos) {
        throw UsageError("span pmf entries look like SPAN:PROB, got '" +
                         std::string(item) + "'");
      }
      pmf.push_back({to_int(item.substr(0, colon), "attention span"),
                     to_double(item.substr(colon + 1), "span probability")});
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    try {
      return AttentionSpanDist::from_pmf(std::move(pmf));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  throw UsageError("span spec must be y=N or pmf=N:P,...; got '" + std::string(spec) + "'");
}

double parse_omega_spec(std::string_view spec) {
  if (!spec.starts_with("uniform:")) {
    throw UsageError("omega spec must be uniform:VALUE; got '" + std::string(spec) + "'");
  }
  const double v = to_double(spec.substr(8), "revenue share");
  if (!(v > 0.0 && v <= 1.0)) throw UsageError("uniform revenue share must lie in (0, 1]");
  return v;
}

std::vector<std::string> parse_slate(std::string_view text) {
  std::vector<std::string> ids;
  std::string current;
  for (char c : text) {
    if (c == ',' || c == ' ') {
      if (!current.empty()) ids.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) ids.push_back(std::move(current));
  return ids;
}

std::string content_digest(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::ostringstream hex;
  hex << "sha256:" << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) hex << std::setw(2) << static_cast<int>(md[i]);
  return hex.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-stage assortment ranking, cascade revenue and collusion audits",
               "shelfrank"};
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  app.add_option("--catalog", common.catalog_path, "Catalog document (JSON)");
  app.add_option("--format", common.format, "Output format: text or structured");
  app.add_option("--prior-mean", common.prior_mean, "Prior mean of product quality");
  app.add_option("--prior-var", common.prior_var, "Prior variance of product quality");
  app.add_option("--noise-var", common.noise_var, "Variance of individual ratings");
  app.add_option("--cost-slope", common.cost_slope, "Search cost per slot below the top");

  RankOptions rank;
  auto* rank_cmd = app.add_subcommand("rank", "Two-stage ranking");
  rank_cmd->add_option("--slots,-M", rank.slots, "Number of slots")->required();
  rank_cmd->add_option("--policy", rank.policy, "quality or price-desc");
  rank_cmd->add_flag("--trace", rank.trace, "Print every iteration");

  RevenueOptions revenue;
  auto* revenue_cmd = app.add_subcommand("expected-revenue", "Evaluate a slate");
  revenue_cmd->add_option("--slate", revenue.slate, "Product ids, comma separated")->required();
  revenue_cmd->add_option("--span", revenue.span, "y=N or pmf=N:P,...");
  revenue_cmd->add_option("--omega", common.omega, "uniform:VALUE revenue share override");

  OptimizeOptions optimize;
  auto* optimize_cmd = app.add_subcommand("optimize", "Exhaustive revenue maximization");
  optimize_cmd->add_option("--slots,-M", optimize.slots, "Number of slots")->required();
  optimize_cmd->add_option("--span", optimize.span, "y=N or pmf=N:P,...");
  optimize_cmd->add_option("--compare", optimize.compare, "Slate to compare against");
  optimize_cmd->add_option("--omega", common.omega, "uniform:VALUE revenue share override");

  AuditOptions audit;
  auto* audit_cmd = app.add_subcommand("audit", "Audit a displayed slate");
  audit_cmd->add_option("--slate", audit.slate, "Displayed product ids")->required();
  audit_cmd->add_option("--span", audit.span, "y=N or pmf=N:P,...");
  audit_cmd->add_option("--slots,-M", audit.slots, "Slot count (default: slate length)");
  audit_cmd->add_option("--policy", audit.policy, "quality or price-desc");
  audit_cmd->add_option("--omega", common.omega, "uniform:VALUE revenue share override");

  SimulateOptions sim;
  std::uint64_t seed = 0;
  auto* sim_cmd = app.add_subcommand("simulate", "Sequential customer simulation");
  sim_cmd->add_option("--config", sim.config_path, "Simulation config (JSON)")->required();
  sim_cmd->add_option("--out", sim.out_prefix, "Output prefix for .tsv and .summary.json");
  auto* seed_opt = sim_cmd->add_option("--seed", seed, "Override the config seed");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }
  if (seed_opt->count() > 0) sim.seed = seed;

  try {
    if (*rank_cmd) return cmd_rank(common, rank, out);
    if (*revenue_cmd) return cmd_expected_revenue(common, revenue, out, err);
    if (*optimize_cmd) return cmd_optimize(common, optimize, out, err);
    if (*audit_cmd) return cmd_audit(common, audit, out, err);
    if (*sim_cmd) return cmd_simulate(common, sim, out);
  } catch (const GuardError& e) {
    err << "error: " << e.what() << "\n";
    return kInternalError;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const CatalogError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const SimulationError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kInputError;
}

}  // namespace shelfrank::cli
