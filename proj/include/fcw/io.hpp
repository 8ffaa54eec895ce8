#pragma once

#include <string>
#include <vector>

namespace fcw {

/// Shortest round-trip decimal form; NaN prints as "NaN", infinities as "inf"/"-inf".
std::string format_number(double v);

/// Inverse of format_number; also accepts "nan", "Inf", "+inf".
double parse_number(const std::string& s);

std::vector<std::string> split_csv(const std::string& line);

}  // namespace fcw
