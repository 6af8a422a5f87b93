#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace shelfrank {

/// A listed product together with its public review state.
///
/// `true_quality` and `rating_noise` describe the product's rating
/// distribution and are only read by the simulator. `demand_override`
/// replaces the logit purchase probability when the data supplies it
/// directly.
struct Product {
  std::string id;
  double price = 0.0;
  double revenue_share = 1.0;
  std::int64_t review_count = 0;
  double avg_rating = 0.0;
  std::optional<double> true_quality;
  std::optional<double> rating_noise;
  std::optional<double> demand_override;

  bool operator==(const Product&) const = default;
};

/// Rating scale used for display only. Ratings themselves are unbounded.
struct DisplayScale {
  double low = 1.0;
  double high = 5.0;

  bool operator==(const DisplayScale&) const = default;
};

class Catalog {
 public:
  Catalog() = default;
  explicit Catalog(std::vector<Product> products,
                   std::optional<DisplayScale> scale = std::nullopt);

  std::span<const Product> products() const { return products_; }
  std::size_t universe_size() const { return products_.size(); }
  bool empty() const { return products_.empty(); }

  /// nullptr when the id is not listed.
  const Product* find(std::string_view id) const;
  /// Throws CatalogError when the id is not listed.
  const Product& at(std::string_view id) const;

  const std::optional<DisplayScale>& display_scale() const { return scale_; }

  bool operator==(const Catalog&) const = default;

 private:
  std::vector<Product> products_;
  std::optional<DisplayScale> scale_;
};

/// Customers' common prior over product quality and the known rating noise.
class BeliefPrior {
 public:
  /// Throws std::invalid_argument unless both variances are positive.
  BeliefPrior(double prior_mean, double prior_var, double noise_var);

  double prior_mean() const { return prior_mean_; }
  double prior_var() const { return prior_var_; }
  double noise_var() const { return noise_var_; }
  double precision_ratio() const { return prior_var_ / noise_var_; }

 private:
  double prior_mean_;
  double prior_var_;
  double noise_var_;
};

class CatalogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Violation {
  std::string product_id;
  std::string field;
  std::string message;

  bool operator==(const Violation&) const = default;
};

/// Parses and validates a catalog document. Throws CatalogError with a
/// message naming the first offending product and field.
Catalog load_catalog(std::string_view document);

/// Reads a catalog document from disk; throws CatalogError if unreadable.
Catalog load_catalog_file(const std::string& path);

/// Every invariant violation, in product order. Empty iff the catalog is
/// well formed.
std::vector<Violation> validate_catalog(const Catalog& catalog);

std::string serialize_catalog(const Catalog& catalog);

/// The ten-product worked example (products A through J).
Catalog reference_catalog();

}  // namespace shelfrank
