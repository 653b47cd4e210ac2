#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace illustrate {

using TokenSeq = std::vector<std::string>;

/// Lowercases, splits on whitespace and strips ASCII punctuation from both ends
/// of every token. Tokens that are pure punctuation disappear.
TokenSeq tokenize(std::string_view text);

std::string join_tokens(std::span<const std::string> tokens);

/// True iff `needle` occurs as a contiguous run inside `haystack`.
/// An empty needle never matches.
bool contains_run(std::span<const std::string> haystack, std::span<const std::string> needle);

/// Number of start positions at which `needle` occurs (overlapping occurrences count).
std::size_t count_occurrences(std::span<const std::string> haystack,
                              std::span<const std::string> needle);

}  // namespace illustrate
