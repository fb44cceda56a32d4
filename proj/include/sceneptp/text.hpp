#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Locale-independent number parsing/formatting shared by the text formats.
namespace sceneptp::text {

std::vector<std::string_view> split_ws(std::string_view line);
std::string_view trim(std::string_view s);

std::optional<long long> parse_int(std::string_view s);
std::optional<double> parse_double(std::string_view s);

// Shortest representation that parses back to the identical value.
std::string format_double(double v);
std::string format_float(float v);

}  // namespace sceneptp::text
