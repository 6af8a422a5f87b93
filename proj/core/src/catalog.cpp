#include "shelfrank/catalog.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace shelfrank {

using nlohmann::json;

Catalog::Catalog(std::vector<Product> products,
                 std::optional<DisplayScale> scale)
    : products_(std::move(products)), scale_(scale) {}

const Product* Catalog::find(std::string_view id) const {
  for (const auto& p : products_) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

const Product& Catalog::at(std::string_view id) const {
  if (const auto* p = find(id)) return *p;
  throw CatalogError("unknown product id '" + std::string(id) + "'");
}

BeliefPrior::BeliefPrior(double prior_mean, double prior_var,
                         double noise_var)
    : prior_mean_(prior_mean), prior_var_(prior_var), noise_var_(noise_var) {
  if (!std::isfinite(prior_mean)) {
    throw std::invalid_argument("prior mean must be finite");
  }
  if (!(prior_var > 0.0) || !std::isfinite(prior_var)) {
    throw std::invalid_argument("prior variance must be positive");
  }
  if (!(noise_var > 0.0) || !std::isfinite(noise_var)) {
    throw std::invalid_argument("rating noise variance must be positive");
  }
}

std::vector<Violation> validate_catalog(const Catalog& catalog) {
  std::vector<Violation> out;
  std::set<std::string> seen;
  for (const auto& p : catalog.products()) {
    auto add = [&](std::string field, std::string msg) {
      out.push_back({p.id, std::move(field), std::move(msg)});
    };
    if (p.id.empty()) add("id", "id must be a nonempty token");
    if (!seen.insert(p.id).second) add("id", "duplicate id");
    if (!std::isfinite(p.price) || p.price < 0.0) {
      add("price", "price must be a nonnegative number");
    }
    if (!(p.revenue_share > 0.0 && p.revenue_share <= 1.0)) {
      add("omega", "revenue share must lie in (0, 1]");
    }
    if (p.review_count < 0) add("reviews", "review count must be nonnegative");
    if (!std::isfinite(p.avg_rating)) add("avg_rating", "rating must be finite");
    if (p.review_count == 0 && p.avg_rating != 0.0) {
      add("avg_rating", "a product without reviews must have average rating 0");
    }
    if (p.demand_override &&
        !(*p.demand_override > 0.0 && *p.demand_override < 1.0)) {
      add("lambda", "purchase probability must lie strictly in (0, 1)");
    }
    if (p.true_quality && !std::isfinite(*p.true_quality)) {
      add("true_quality", "true quality must be finite");
    }
    if (p.rating_noise &&
        !(*p.rating_noise > 0.0 && std::isfinite(*p.rating_noise))) {
      add("rating_noise", "rating noise must be positive");
    }
  }
  if (const auto& s = catalog.display_scale(); s && !(s->low < s->high)) {
    out.push_back({"", "display_scale", "display scale must satisfy low < high"});
  }
  return out;
}

namespace {

double number_field(const json& obj, const char* key, const std::string& id) {
  const auto& v = obj.at(key);
  if (!v.is_number()) {
    throw CatalogError("product '" + id + "': field '" + key +
                       "' must be a number");
  }
  return v.get<double>();
}

std::optional<double> optional_number(const json& obj, const char* key,
                                      const std::string& id) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  return number_field(obj, key, id);
}

Product parse_product(const json& obj) {
  if (!obj.is_object()) throw CatalogError("product entry must be an object");
  for (const char* key : {"id", "price", "reviews", "avg_rating"}) {
    if (!obj.contains(key)) {
      throw CatalogError(std::string("product entry missing required key '") +
                         key + "'");
    }
  }
  if (!obj.at("id").is_string()) throw CatalogError("product id must be a string");
  Product p;
  p.id = obj.at("id").get<std::string>();
  p.price = number_field(obj, "price", p.id);
  p.revenue_share = optional_number(obj, "omega", p.id).value_or(1.0);
  const auto& reviews = obj.at("reviews");
  if (!reviews.is_number_integer()) {
    throw CatalogError("product '" + p.id + "': field 'reviews' must be an integer");
  }
  p.review_count = reviews.get<std::int64_t>();
  p.avg_rating = number_field(obj, "avg_rating", p.id);
  p.true_quality = optional_number(obj, "true_quality", p.id);
  p.rating_noise = optional_number(obj, "rating_noise", p.id);
  p.demand_override = optional_number(obj, "lambda", p.id);
  return p;
}

}  // namespace

Catalog load_catalog(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw CatalogError(std::string("malformed catalog document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("products") ||
      !doc.at("products").is_array()) {
    throw CatalogError("catalog document needs a top-level 'products' array");
  }
  std::vector<Product> products;
  for (const auto& entry : doc.at("products")) {
    products.push_back(parse_product(entry));
  }
  std::optional<DisplayScale> scale;
  if (doc.contains("display_scale")) {
    const auto& s = doc.at("display_scale");
    if (!s.is_array() || s.size() != 2 || !s[0].is_number() ||
        !s[1].is_number()) {
      throw CatalogError("display_scale must be a [low, high] pair");
    }
    scale = DisplayScale{s[0].get<double>(), s[1].get<double>()};
  }
  Catalog catalog(std::move(products), scale);
  if (auto violations = validate_catalog(catalog); !violations.empty()) {
    const auto& v = violations.front();
    throw CatalogError("product '" + v.product_id + "': field '" + v.field +
                       "': " + v.message);
  }
  return catalog;
}

Catalog load_catalog_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CatalogError("cannot read catalog file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_catalog(buf.str());
}

std::string serialize_catalog(const Catalog& catalog) {
  json products = json::array();
  for (const auto& p : catalog.products()) {
    json obj = {{"id", p.id},
                {"price", p.price},
                {"omega", p.revenue_share},
                {"reviews", p.review_count},
                {"avg_rating", p.avg_rating}};
    if (p.true_quality) obj["true_quality"] = *p.true_quality;
    if (p.rating_noise) obj["rating_noise"] = *p.rating_noise;
    if (p.demand_override) obj["lambda"] = *p.demand_override;
    products.push_back(std::move(obj));
  }
  json doc = {{"products", std::move(products)}};
  if (const auto& s = catalog.display_scale()) {
    doc["display_scale"] = {s->low, s->high};
  }
  return doc.dump(2) + "\n";
}

Catalog reference_catalog() {
  // id, reviews, average rating, price, purchase probability
  struct Row {
    const char* id;
    std::int64_t reviews;
    double rating;
    double price;
    double lambda;
  };
  static constexpr Row rows[] = {
      {"A", 61806, 4.0, 629, 0.95}, {"B", 30002, 4.0, 700, 0.85},
      {"C", 2858, 3.5, 360, 0.40},  {"D", 95, 4.5, 229, 0.10},
      {"E", 4064, 4.0, 587, 0.55},  {"F", 14385, 5.0, 299, 0.75},
      {"G", 8613, 4.0, 520, 0.65},  {"H", 1179, 4.0, 209, 0.20},
      {"I", 1210, 3.0, 314, 0.15},  {"J", 12412, 4.0, 399, 0.72},
  };
  std::vector<Product> products;
  for (const auto& r : rows) {
    Product p;
    p.id = r.id;
    p.price = r.price;
    p.review_count = r.reviews;
    p.avg_rating = r.rating;
    p.demand_override = r.lambda;
    products.push_back(std::move(p));
  }
  return Catalog(std::move(products), DisplayScale{1.0, 5.0});
}

}  // namespace shelfrank
