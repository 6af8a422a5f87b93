#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "shelfrank/revenue.hpp"

namespace shelfrank::cli {

enum ExitCode : int {
  kOk = 0,
  kFindings = 1,
  kInputError = 2,
  kInternalError = 3,
};

/// Raised for malformed command-line values and config files.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Self-description embedded in every report.
struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::string input_digest;
  std::string engine_version;

  nlohmann::json to_json() const;
};

/// "y=3" or "pmf=1:0.5,3:0.5".
AttentionSpanDist parse_span_spec(std::string_view spec);
/// "uniform:1.0".
double parse_omega_spec(std::string_view spec);
/// Comma- or space-separated product ids.
std::vector<std::string> parse_slate(std::string_view text);

/// Hex SHA-256 of `bytes`, prefixed with "sha256:".
std::string content_digest(std::string_view bytes);

/// Runs one command; never throws. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace shelfrank::cli
