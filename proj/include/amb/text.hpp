#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace amb::scenealign {

using Tokens = std::vector<std::string>;

/// NFKD-normalize, lowercase, and split into maximal runs of letters and
/// digits. Combining marks left over from decomposition are dropped in place
/// ("café" -> "cafe"); every other non-alphanumeric code point separates.
Tokens normalize_text(std::string_view utf8);

/// Token-multiset F1: 2 * |a ∩ b| / (|a| + |b|). Two empty lists score 1.
double line_similarity(const Tokens& a, const Tokens& b);

}  // namespace amb::scenealign
