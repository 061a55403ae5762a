#include "tgp/extraction/grading.hpp"

#include <set>

#include "tgp/error.hpp"
#include "tgp/extraction/extract.hpp"

namespace tgp::extraction {
namespace {

bool is_ambiguous(std::string_view raw, bool mc, std::string_view alphabet) {
  const auto span = extract_answer_tag(raw);
  if (!span) return false;
  if (mc) {
    const auto letters = all_mc_letters(*span, alphabet);
    return std::set<char>(letters.begin(), letters.end()).size() > 1;
  }
  const auto labels = all_ynm(*span);
  return std::set<std::string>(labels.begin(), labels.end()).size() > 1;
}

}  // namespace

ExtractionRule ExtractionRule::for_format(const datasets::TaskFormat& format) {
  ExtractionRule rule;
  if (format.is_mc()) {
    rule.kind = Kind::first_mc_letter;
    rule.alphabet = format.option_alphabet.empty() ? "ABCDE" : format.option_alphabet;
  } else {
    rule.kind = Kind::ynm;
    rule.alphabet.clear();
  }
  return rule;
}

std::string_view to_string(FailureReason reason) {
  return reason == FailureReason::no_match ? "no_match" : "ambiguous_tag";
}

GradedPrediction grade(const datasets::QAItem& item, std::string_view raw,
                       const ExtractionRule& rule, const datasets::TaskFormat& format) {
  const bool mc = format.is_mc();
  if (rule.kind == ExtractionRule::Kind::first_mc_letter && !mc) {
    throw RuleMismatch("first_mc_letter rule applied to a ternary item");
  }
  if (rule.kind == ExtractionRule::Kind::ynm && mc) {
    throw RuleMismatch("ynm rule applied to a multiple-choice item");
  }
  if (mc && rule.alphabet.empty()) throw RuleMismatch("multiple-choice rule has an empty alphabet");

  GradedPrediction g;
  g.item_id = item.id;
  g.raw = std::string(raw);
  g.gold = item.gold;

  std::string_view region = raw;
  std::optional<std::string> span;
  if (rule.kind == ExtractionRule::Kind::answer_tag) {
    span = extract_answer_tag(raw);
    if (!span) {
      g.failure_reason = FailureReason::no_match;
      return g;
    }
    region = *span;
  }

  if (mc) {
    if (auto letter = extract_mc(region, rule.alphabet)) g.extracted = std::string(1, *letter);
  } else {
    g.extracted = extract_ynm(region);
  }

  if (!g.extracted) {
    g.failure_reason = FailureReason::no_match;
    return g;
  }
  g.correct = *g.extracted == item.gold;
  if (is_ambiguous(raw, mc, rule.alphabet)) g.failure_reason = FailureReason::ambiguous_tag;
  return g;
}

double accuracy(std::span<const GradedPrediction> graded) {
  if (graded.empty()) throw EmptyInput("accuracy of an empty prediction list");
  std::size_t correct = 0;
  for (const auto& g : graded) correct += g.correct ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(graded.size());
}

nlohmann::json to_json(const GradedPrediction& g) {
  nlohmann::json j;
  j["item_id"] = g.item_id;
  j["extracted"] = g.extracted ? nlohmann::json(*g.extracted) : nlohmann::json(nullptr);
  j["gold"] = g.gold;
  j["correct"] = g.correct;
  j["failure_reason"] =
      g.failure_reason ? nlohmann::json(to_string(*g.failure_reason)) : nlohmann::json(nullptr);
  return j;
}

GradedPrediction graded_from_json(const nlohmann::json& j) {
  GradedPrediction g;
  g.item_id = j.at("item_id").get<std::string>();
  if (!j.at("extracted").is_null()) g.extracted = j.at("extracted").get<std::string>();
  g.gold = j.at("gold").get<std::string>();
  g.correct = j.at("correct").get<bool>();
  if (const auto& f = j.at("failure_reason"); !f.is_null()) {
    g.failure_reason = f.get<std::string>() == "no_match" ? FailureReason::no_match
                                                          : FailureReason::ambiguous_tag;
  }
  return g;
}

}  // namespace tgp::extraction
