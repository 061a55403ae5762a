#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tgp::extraction {

/// Contents of the first well-formed `<answer>...</answer>` span, trimmed.
std::optional<std::string> extract_answer_tag(std::string_view raw);

/// First standalone capital letter from `alphabet` (word boundaries as in
/// the ECMAScript `\b`: word characters are ASCII letters, digits and '_').
/// When an answer span exists, only its contents are searched.
std::optional<char> extract_mc(std::string_view raw, std::string_view alphabet = "ABCDE");

/// First standalone yes/no/maybe, case-insensitive, returned lower-case.
/// When an answer span exists, only its contents are searched.
std::optional<std::string> extract_ynm(std::string_view raw);

/// Every standalone match in scan order (used to flag ambiguous answers).
std::string all_mc_letters(std::string_view text, std::string_view alphabet);
std::vector<std::string> all_ynm(std::string_view text);

}  // namespace tgp::extraction
