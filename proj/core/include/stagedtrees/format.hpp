#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace stagedtrees {

/// Fixed-point rendering with `digits` decimals ("NA" for NaN, "Inf"/"-Inf").
std::string format_fixed(double value, int digits);

/// Shortest decimal rendering that round-trips to the same double.
std::string format_roundtrip(double value);

std::vector<std::string> split(std::string_view text, char sep);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace stagedtrees
