#pragma once

#include <span>
#include <string>
#include <string_view>

namespace shelfrank {

/// Fixed notation with six decimals; "nan" for undefined values.
std::string format_number(double value);

/// Joins ids with `sep`.
std::string join_ids(std::span<const std::string> ids, std::string_view sep = " ");

}  // namespace shelfrank
