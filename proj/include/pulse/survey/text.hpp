#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pulse::survey {

/// Lower-cased word tokens. Letters, digits, apostrophes and '%' are kept;
/// everything else separates tokens.
std::vector<std::string> tokenize(std::string_view text);

std::string to_lower(std::string_view text);
bool is_blank(std::string_view text);

/// First cardinal number in the text, digits or English words
/// ("25%", "three", "twenty five"). "no"/"none"/"zero" count as 0 only when
/// `allow_none` is set.
std::optional<int> parse_first_number(std::string_view text, bool allow_none = false);

/// Yes/no reading of a short answer. Empty when neither polarity is clear.
std::optional<bool> parse_polar(std::string_view text);

/// Plain Levenshtein distance (unit cost insert/delete/substitute).
int edit_distance(std::string_view a, std::string_view b);

}  // namespace pulse::survey
