#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mapqa::text {

std::string trim(std::string_view s);
std::string lower(std::string_view s);
// Trims and collapses every whitespace run to a single space.
std::string collapse_ws(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
std::vector<std::string> split(std::string_view s, char sep);

// 1234567 -> "1,234,567"
std::string with_thousands(std::int64_t v);
// Round half up to `decimals` places and print with exactly that many.
std::string fixed_half_up(double v, int decimals);

}  // namespace mapqa::text
