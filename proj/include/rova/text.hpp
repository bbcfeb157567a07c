#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rova::text {

/// Lowercase, with every non-alphanumeric byte removed.
std::string fold(std::string_view s);

/// Lowercase alphanumeric words, in order of appearance.
std::vector<std::string> tokens(std::string_view s);

/// Jaccard index of the token sets; two empty sets give 1.
double token_jaccard(std::string_view a, std::string_view b);

/// Levenshtein distance over bytes.
std::size_t edit_distance(std::string_view a, std::string_view b);

std::string trim(std::string_view s);

/// Standard base64 with padding.
std::string base64(const std::vector<unsigned char>& bytes);

}  // namespace rova::text
