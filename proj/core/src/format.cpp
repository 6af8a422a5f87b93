#include "shelfrank/format.hpp"

#include <cmath>
#include <cstdio>

namespace shelfrank {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  std::string out(buf);
  if (out == "-0.000000") out.erase(0, 1);
  return out;
}

std::string join_ids(std::span<const std::string> ids, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) out += sep;
    out += ids[i];
  }
  return out;
}

}  // namespace shelfrank
