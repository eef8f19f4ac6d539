#pragma once

#include <functional>
#include <string>

namespace conekit::cli {

// Parses an arithmetic expression in the variable r: numbers, r, pi, e,
// + - * / ^, parentheses and exp log sqrt sin cos tan atan abs. Throws
// Error(Validation) with the offending position.
std::function<double(double)> parse_expression(const std::string& text);

// Two-column CSV (r, value), optional header, r strictly increasing and
// positive. Linear in log r inside the table, power law from the last two
// rows beyond it, constant below the first row. Throws Io when unreadable.
std::function<double(double)> load_profile_csv(const std::string& path);

// Expression, or a CSV path when the text names an existing file.
std::function<double(double)> parse_profile(const std::string& text);

}  // namespace conekit::cli
