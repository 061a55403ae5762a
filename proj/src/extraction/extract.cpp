#include "tgp/extraction/extract.hpp"

#include <array>
#include <cctype>
#include <vector>

namespace tgp::extraction {
namespace {

constexpr std::string_view kOpenTag = "<answer>";
constexpr std::string_view kCloseTag = "</answer>";

bool is_word(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z') || (u >= '0' && u <= '9') ||
         u == '_';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<std::string_view> answer_span(std::string_view raw) {
  const auto open = raw.find(kOpenTag);
  if (open == std::string_view::npos) return std::nullopt;
  const auto body = open + kOpenTag.size();
  const auto close = raw.find(kCloseTag, body);
  if (close == std::string_view::npos) return std::nullopt;
  return raw.substr(body, close - body);
}

std::string_view search_region(std::string_view raw) {
  if (auto span = answer_span(raw)) return *span;
  return raw;
}

bool standalone(std::string_view text, std::size_t pos, std::size_t len) {
  const bool left = pos == 0 || !is_word(text[pos - 1]);
  const bool right = pos + len >= text.size() || !is_word(text[pos + len]);
  return left && right;
}

bool iequals_at(std::string_view text, std::size_t pos, std::string_view word) {
  if (pos + word.size() > text.size()) return false;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(text[pos + i])) != word[i]) return false;
  }
  return true;
}

}  // namespace

std::optional<std::string> extract_answer_tag(std::string_view raw) {
  if (auto span = answer_span(raw)) return std::string(trim(*span));
  return std::nullopt;
}

std::string all_mc_letters(std::string_view text, std::string_view alphabet) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (alphabet.find(text[i]) != std::string_view::npos && standalone(text, i, 1)) {
      out.push_back(text[i]);
    }
  }
  return out;
}

std::optional<char> extract_mc(std::string_view raw, std::string_view alphabet) {
  const auto region = search_region(raw);
  for (std::size_t i = 0; i < region.size(); ++i) {
    if (alphabet.find(region[i]) != std::string_view::npos && standalone(region, i, 1)) {
      return region[i];
    }
  }
  return std::nullopt;
}

std::vector<std::string> all_ynm(std::string_view text) {
  static constexpr std::array<std::string_view, 3> kLabels = {"yes", "no", "maybe"};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (i > 0 && is_word(text[i - 1])) continue;
    for (auto label : kLabels) {
      if (iequals_at(text, i, label) && standalone(text, i, label.size())) {
        out.emplace_back(label);
        i += label.size() - 1;
        break;
      }
    }
  }
  return out;
}

std::optional<std::string> extract_ynm(std::string_view raw) {
  auto labels = all_ynm(search_region(raw));
  if (labels.empty()) return std::nullopt;
  return std::move(labels.front());
}

}  // namespace tgp::extraction
