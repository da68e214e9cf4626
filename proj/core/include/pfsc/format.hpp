#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pfsc::fmt {

/// %.17g-style decimal: 17 significant digits, trailing zeros dropped. Round-trips exactly.
std::string format_double(double x);

/// Strict decimal parse; returns false on trailing garbage or empty input.
bool parse_double(std::string_view text, double& out);
bool parse_int(std::string_view text, long long& out);

std::vector<std::string_view> split(std::string_view line, char sep);
std::string_view trim(std::string_view s);

} // namespace pfsc::fmt
