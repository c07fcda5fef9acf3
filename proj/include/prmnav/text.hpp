#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace prmnav::text {

// Trim, collapse internal whitespace runs to one space, ASCII case-fold.
std::string normalize(std::string_view s);

// Lower-cased alphanumeric tokens, in order of appearance.
std::vector<std::string> tokenize(std::string_view s);

// 64-bit FNV-1a. Stable across platforms, unlike std::hash.
std::uint64_t fnv1a(std::string_view s, std::uint64_t seed = 14695981039346656037ULL);

std::string hex64(std::uint64_t v);

// Shortest decimal form that round-trips to the same double.
std::string format_double(double v);

// Rough token estimate used for usage accounting when a backend reports none.
std::int64_t estimate_tokens(std::string_view s);

}  // namespace prmnav::text
