#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace amb {

/// Fixed-point decimal with round-half-to-even. Values within 1e-9 (in units
/// of the last place) of a tie count as ties, so 0.125 -> "0.12" and a
/// binary-inexact 5.125 still rounds to even.
std::string format_fixed(double value, int places = 2);

/// RFC 4180 field quoting (only when needed).
std::string csv_field(std::string_view s);
std::string csv_row(const std::vector<std::string>& fields);

/// Left-aligned first column, right-aligned others, two-space gutters.
/// Width is measured in code points so "±" counts as one column.
std::string aligned_table(const std::vector<std::vector<std::string>>& rows);

}  // namespace amb
