#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace shelfrank::cli {
namespace {

namespace fs = std::filesystem;

const std::string kData = SHELFRANK_DATA_DIR;
const std::string kReference = kData + "/reference_catalog.json";

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "shelfrank_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

std::string read(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

TEST(ParseSpanSpec, Forms) {
  EXPECT_EQ(parse_span_spec("y=3"), AttentionSpanDist::deterministic(3));
  const auto mix = parse_span_spec("pmf=1:0.5,3:0.5");
  EXPECT_EQ(mix.mass(1), 0.5);
  EXPECT_EQ(mix.mass(3), 0.5);
  EXPECT_THROW(parse_span_spec("y=0"), std::exception);
  EXPECT_THROW(parse_span_spec("y=abc"), UsageError);
  EXPECT_THROW(parse_span_spec("pmf=1:0.5"), UsageError);
  EXPECT_THROW(parse_span_spec("pmf=1"), UsageError);
  EXPECT_THROW(parse_span_spec("span=3"), UsageError);
}

TEST(ParseOmegaSpec, Forms) {
  EXPECT_EQ(parse_omega_spec("uniform:1.0"), 1.0);
  EXPECT_EQ(parse_omega_spec("uniform:0.25"), 0.25);
  EXPECT_THROW(parse_omega_spec("uniform:0"), UsageError);
  EXPECT_THROW(parse_omega_spec("fixed:1"), UsageError);
}

TEST(ParseSlate, Separators) {
  EXPECT_EQ(parse_slate("A,B,F"), (std::vector<std::string>{"A", "B", "F"}));
  EXPECT_EQ(parse_slate("A B,  F"), (std::vector<std::string>{"A", "B", "F"}));
  EXPECT_TRUE(parse_slate("").empty());
}

TEST(ContentDigest, KnownVector) {
  EXPECT_EQ(content_digest("abc"),
            "sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Rank, Reference) {
  const auto r = run_cli({"--catalog", kReference, "rank", "-M", "3"});
  EXPECT_EQ(r.code, kOk) << r.err;
  EXPECT_TRUE(contains(r.out, "ranking: A B F\n")) << r.out;
  EXPECT_TRUE(contains(r.out, "# input: sha256:"));
  EXPECT_TRUE(contains(r.out, "# engine: shelfrank "));
}

TEST(Rank, Trace) {
  const auto r = run_cli({"--catalog", kReference, "rank", "--slots", "3", "--trace"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_TRUE(contains(r.out, "iteration 1: stage1 threshold 13957.237500, stage1 order [F A B]"))
      << r.out;
}

TEST(Rank, PriceDescendingPolicy) {
  const auto r = run_cli({"--catalog", kReference, "rank", "-M", "3", "--policy", "price-desc"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_TRUE(contains(r.out, "ranking: A B J\n")) << r.out;
  EXPECT_EQ(run_cli({"--catalog", kReference, "rank", "-M", "3", "--policy", "cheapest"}).code,
            kInputError);
}

TEST(Rank, Structured) {
  const auto r = run_cli({"--catalog", kReference, "--format", "structured", "rank", "-M", "3"});
  ASSERT_EQ(r.code, kOk);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["result"]["ranking"]["slots"], nlohmann::json({"A", "B", "F"}));
  EXPECT_EQ(doc["manifest"]["command"], "rank");
  EXPECT_EQ(doc["manifest"]["input_digest"], content_digest(read(kReference)));
}

TEST(Rank, MissingFile) {
  const auto r = run_cli({"--catalog", "/nonexistent/catalog.json", "rank", "-M", "3"});
  EXPECT_EQ(r.code, kInputError);
  EXPECT_TRUE(contains(r.err, "/nonexistent/catalog.json")) << r.err;
}

TEST(Rank, BadArguments) {
  EXPECT_EQ(run_cli({"--catalog", kReference, "rank"}).code, kInputError);
  EXPECT_EQ(run_cli({"--catalog", kReference, "rank", "-M", "0"}).code, kInputError);
  EXPECT_EQ(run_cli({"--catalog", kReference, "frobnicate"}).code, kInputError);
  EXPECT_EQ(run_cli({"--catalog", kReference, "--format", "xml", "rank", "-M", "3"}).code,
            kInputError);
}

TEST(ExpectedRevenue, Slates) {
  auto r = run_cli({"--catalog", kReference, "expected-revenue", "--slate", "A,B,F", "--span",
                    "y=3", "--omega", "uniform:1.0"});
  EXPECT_EQ(r.code, kOk) << r.err;
  EXPECT_TRUE(contains(r.out, "expected revenue: 628.981875\n")) << r.out;
  EXPECT_TRUE(contains(r.out, "slot 3 F: purchase probability 0.005625\n")) << r.out;

  r = run_cli({"--catalog", kReference, "expected-revenue", "--slate", "A,D,F", "--span", "y=3"});
  EXPECT_TRUE(contains(r.out, "expected revenue: 608.786250\n")) << r.out;
  EXPECT_TRUE(contains(r.out, "slot 3 F: purchase probability 0.033750\n")) << r.out;

  r = run_cli({"--catalog", kReference, "expected-revenue", "--slate", "A", "--span", "y=1"});
  EXPECT_TRUE(contains(r.out, "expected revenue: 597.550000\n")) << r.out;

  r = run_cli({"--catalog", kReference, "expected-revenue", "--slate", "A,Q", "--span", "y=1"});
  EXPECT_EQ(r.code, kInputError);
}

TEST(Optimize, SubCatalogDominatesEngineSlate) {
  const auto path = scratch("abf.json");
  write(path, R"({"products": [
    {"id": "A", "price": 629, "reviews": 61806, "avg_rating": 4.0, "lambda": 0.95},
    {"id": "B", "price": 700, "reviews": 30002, "avg_rating": 4.0, "lambda": 0.85},
    {"id": "F", "price": 299, "reviews": 14385, "avg_rating": 5.0, "lambda": 0.75}]})");
  const auto r = run_cli({"--catalog", path.string(), "--format", "structured", "optimize",
                          "-M", "3", "--span", "y=3", "--compare", "A,B,F"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_GE(doc["result"]["gap"].get<double>(), 0.0);
  EXPECT_EQ(doc["result"]["slates_evaluated"], 15);
}

TEST(Optimize, SingleProduct) {
  const auto path = scratch("one.json");
  write(path, R"({"products": [{"id": "solo", "price": 10, "reviews": 2, "avg_rating": 3, "lambda": 0.4}]})");
  const auto r = run_cli({"--catalog", path.string(), "optimize", "-M", "3"});
  EXPECT_EQ(r.code, kOk) << r.err;
  EXPECT_TRUE(contains(r.out, "best: solo\n")) << r.out;
}

TEST(Optimize, GuardExceeded) {
  std::string doc = R"({"products": [)";
  for (int k = 0; k < 13; ++k) {
    if (k) doc += ",";
    doc += R"({"id": "p)" + std::to_string(k) +
           R"(", "price": 10, "reviews": 5, "avg_rating": 4, "lambda": 0.5})";
  }
  doc += "]}";
  const auto path = scratch("thirteen.json");
  write(path, doc);
  const auto r = run_cli({"--catalog", path.string(), "optimize", "-M", "3"});
  EXPECT_EQ(r.code, kInternalError);
  EXPECT_TRUE(contains(r.err, std::to_string(enumeration_count(13, 3)))) << r.err;
}

TEST(Audit, CollusiveSlate) {
  const auto r = run_cli({"--catalog", kReference, "audit", "--slate", "A,D,F", "--span", "y=3",
                          "--omega", "uniform:1.0"});
  EXPECT_EQ(r.code, kFindings) << r.err;
  EXPECT_TRUE(contains(r.out, "slot 2 D below-stage1-threshold")) << r.out;
  EXPECT_TRUE(contains(r.out, "slot 2 D revenue-dominated-swap -20.195625")) << r.out;
}

TEST(Audit, EngineSlateIsClean) {
  const auto r = run_cli({"--catalog", kReference, "audit", "--slate", "A,B,F", "--span", "y=3"});
  EXPECT_EQ(r.code, kOk) << r.out;
  EXPECT_TRUE(contains(r.out, "findings: none\n"));
}

TEST(Audit, UnknownId) {
  EXPECT_EQ(run_cli({"--catalog", kReference, "audit", "--slate", "A,Q"}).code, kInputError);
}

TEST(Audit, Structured) {
  const auto r = run_cli({"--catalog", kReference, "--format", "structured", "audit", "--slate",
                          "A,D,F"});
  ASSERT_EQ(r.code, kFindings);
  const auto doc = nlohmann::json::parse(r.out);
  bool seen = false;
  for (const auto& f : doc["result"]["findings"]) {
    if (f["kind"] == "revenue-dominated-swap") {
      seen = true;
      EXPECT_NEAR(f["value"].get<double>(), -20.195625, 1e-9);
    }
  }
  EXPECT_TRUE(seen);
}

TEST(Simulate, OutputsAreByteIdenticalAcrossRuns) {
  const auto cfg = scratch("t1.json");
  write(cfg, R"({"horizon": 1, "seed": 5, "span": "y=3", "slate": ["A", "B", "F"],
                 "freeze_beliefs": true})");
  const auto a = scratch("run_a");
  const auto b = scratch("run_b");
  const auto ra = run_cli({"--catalog", kReference, "simulate", "--config", cfg.string(), "--out",
                           a.string()});
  const auto rb = run_cli({"--catalog", kReference, "simulate", "--config", cfg.string(), "--out",
                           b.string()});
  ASSERT_EQ(ra.code, kOk) << ra.err;
  ASSERT_EQ(rb.code, kOk) << rb.err;
  EXPECT_EQ(read(a.string() + ".tsv"), read(b.string() + ".tsv"));
  EXPECT_EQ(read(a.string() + ".tsv").substr(0, 2), "t\t");
  const auto sa = nlohmann::json::parse(read(a.string() + ".summary.json"));
  EXPECT_EQ(sa["summary"]["customers"], 1);

  const auto again = run_cli({"--catalog", kReference, "simulate", "--config", cfg.string()});
  EXPECT_EQ(again.out, run_cli({"--catalog", kReference, "simulate", "--config", cfg.string()}).out);
}

TEST(Simulate, SeedFlagOverridesConfig) {
  const auto cfg = scratch("seeded.json");
  write(cfg, R"({"horizon": 200, "seed": 5, "span": "y=3", "slate": ["A", "B", "F"],
                 "freeze_beliefs": true})");
  const auto base = run_cli({"--catalog", kReference, "--format", "structured", "simulate",
                             "--config", cfg.string()});
  const auto seeded = run_cli({"--catalog", kReference, "--format", "structured", "simulate",
                               "--config", cfg.string(), "--seed", "6"});
  ASSERT_EQ(seeded.code, kOk) << seeded.err;
  EXPECT_EQ(nlohmann::json::parse(seeded.out)["manifest"]["config"]["simulation"]["seed"], 6);
  EXPECT_NE(base.out, seeded.out);
}

TEST(Simulate, FrozenPurchaseRate) {
  const auto r = run_cli({"--catalog", kReference, "--format", "structured", "simulate",
                          "--config", kData + "/abf_frozen_sim.json"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const double rate = nlohmann::json::parse(r.out)["result"]["purchase_rate"].get<double>();
  const double p = 1.0 - 0.05 * 0.15 * 0.25;
  EXPECT_NEAR(rate, p, 3.0 * std::sqrt(p * (1.0 - p) / 1e5));
}

TEST(Simulate, ZeroHorizon) {
  const auto cfg = scratch("zero.json");
  write(cfg, R"({"horizon": 0, "span": "y=3", "slate": ["A"]})");
  EXPECT_EQ(run_cli({"--catalog", kReference, "simulate", "--config", cfg.string()}).code,
            kInputError);
}

TEST(Simulate, BadConfigs) {
  const auto cfg = scratch("bad.json");
  write(cfg, R"({"horizon": 10, "span": "y=3"})");
  EXPECT_EQ(run_cli({"--catalog", kReference, "simulate", "--config", cfg.string()}).code,
            kInputError);
  write(cfg, "{not json");
  EXPECT_EQ(run_cli({"--catalog", kReference, "simulate", "--config", cfg.string()}).code,
            kInputError);
  EXPECT_EQ(run_cli({"--catalog", kReference, "simulate", "--config", "/nonexistent.json"}).code,
            kInputError);
}

TEST(Manifest, DigestFollowsCatalogBytes) {
  const auto path = scratch("digest.json");
  const auto original = read(kReference);
  write(path, original);
  const auto first = run_cli({"--catalog", path.string(), "rank", "-M", "3"});
  write(path, original + "\n");
  const auto second = run_cli({"--catalog", path.string(), "rank", "-M", "3"});
  write(path, original);
  const auto third = run_cli({"--catalog", path.string(), "rank", "-M", "3"});
  const auto digest_line = [](const std::string& out) {
    const auto at = out.find("# input: ");
    return out.substr(at, out.find('\n', at) - at);
  };
  EXPECT_NE(digest_line(first.out), digest_line(second.out));
  EXPECT_EQ(digest_line(first.out), digest_line(third.out));
  EXPECT_EQ(first.out, third.out);
}

}  // namespace
}  // namespace shelfrank::cli
