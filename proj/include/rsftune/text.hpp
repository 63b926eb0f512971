#pragma once

// Small text helpers shared by the CSV / grid-file readers and writers.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rsftune::text {

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

std::string_view trim(std::string_view s);

std::vector<std::string_view> split(std::string_view s, char sep);

/// Splits on runs of spaces/tabs, dropping empty tokens.
std::vector<std::string_view> split_whitespace(std::string_view s);

/// Whole-token parses; nullopt on any trailing garbage or overflow.
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);
std::optional<unsigned long long> parse_uint(std::string_view s);

}  // namespace rsftune::text
