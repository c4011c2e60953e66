#pragma once

#include <string>
#include <string_view>

namespace hawkes_ls {

/// Shortest round-trip decimal form, '.' separator regardless of locale.
std::string format_double(double value);

/// Locale-independent parse of a full decimal string. Throws std::invalid_argument.
double parse_double(std::string_view text);

}  // namespace hawkes_ls
