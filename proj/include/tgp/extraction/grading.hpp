#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tgp/datasets/qa_item.hpp"

namespace tgp::extraction {

struct ExtractionRule {
  enum class Kind { first_mc_letter, answer_tag, ynm };

  Kind kind = Kind::first_mc_letter;
  std::string alphabet = "ABCDE";

  /// The default rule for a task: first_mc_letter for MC, ynm for ternary.
  static ExtractionRule for_format(const datasets::TaskFormat& format);
};

enum class FailureReason { no_match, ambiguous_tag };

std::string_view to_string(FailureReason reason);

struct GradedPrediction {
  std::string item_id;
  std::string raw;
  std::optional<std::string> extracted;
  std::string gold;
  bool correct = false;
  std::optional<FailureReason> failure_reason;
};

/// Extracts and compares with the gold label.
///
/// first_mc_letter / ynm follow extract_mc / extract_ynm (answer span first).
/// answer_tag requires a well-formed answer span and applies the item's
/// label scan to its contents only. failure_reason is no_match when nothing
/// was extracted, ambiguous_tag when the answer span names more than one
/// distinct label (the first still counts). Throws RuleMismatch when the rule
/// does not fit the item's format.
GradedPrediction grade(const datasets::QAItem& item, std::string_view raw,
                       const ExtractionRule& rule, const datasets::TaskFormat& format);

/// Fraction correct; extraction failures count in the denominator.
/// Throws EmptyInput.
double accuracy(std::span<const GradedPrediction> graded);

/// {item_id, extracted, gold, correct, failure_reason}
nlohmann::json to_json(const GradedPrediction& g);
GradedPrediction graded_from_json(const nlohmann::json& j);

}  // namespace tgp::extraction
