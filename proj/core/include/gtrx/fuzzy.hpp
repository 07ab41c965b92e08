#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace gtrx::linking {

/// Lowercases ASCII letters and collapses whitespace.
std::string normalize_for_matching(std::string_view s);

/// Longest common subsequence length over code points (bit-parallel).
std::size_t lcs_length(std::u32string_view a, std::u32string_view b);

/// Insertions plus deletions needed to turn `a` into `b`.
std::size_t indel_distance(std::u32string_view a, std::u32string_view b);

/// 1 - indel(a', b') / (|a'| + |b'|) on normalized inputs, in [0,1].
/// Empty vs empty is 1.0; empty vs non-empty is 0.0.
double fuzzy_ratio(std::string_view a, std::string_view b);

}  // namespace gtrx::linking
