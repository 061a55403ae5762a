#include "tgp/datasets/qa_item.hpp"

#include "tgp/error.hpp"

namespace tgp::datasets {

TaskFormat TaskFormat::multiple_choice(std::string alphabet) {
  TaskFormat f;
  f.kind = Kind::multiple_choice;
  f.option_alphabet = std::move(alphabet);
  return f;
}

TaskFormat TaskFormat::ternary(bool requires_context) {
  TaskFormat f;
  f.kind = Kind::ternary;
  f.option_alphabet.clear();
  f.requires_context = requires_context;
  return f;
}

TaskFormat format_from_string(std::string_view name) {
  if (name == "mc" || name == "multiple_choice") return TaskFormat::multiple_choice();
  if (name == "ternary") return TaskFormat::ternary();
  throw ConfigError("unknown task format '" + std::string(name) + "' (expected mc or ternary)");
}

std::string_view to_string(TaskFormat::Kind kind) {
  return kind == TaskFormat::Kind::multiple_choice ? "mc" : "ternary";
}

std::optional<std::string> check(const QAItem& item, const TaskFormat& format) {
  if (item.id.empty()) return "empty id";
  if (item.question.empty()) return "empty question";
  if (format.requires_context && (!item.context || item.context->empty())) {
    return "context is required for this task";
  }
  if (format.is_mc()) {
    if (format.option_alphabet.empty()) return "multiple-choice format has an empty alphabet";
    if (item.options.empty()) return "multiple-choice item has no options";
    for (const auto& [letter, text] : item.options) {
      if (format.option_alphabet.find(letter) == std::string::npos) {
        return std::string("option key '") + letter + "' is outside the alphabet " +
               format.option_alphabet;
      }
      if (text.empty()) return std::string("option ") + letter + " is empty";
    }
    if (item.gold.size() != 1 || !item.options.contains(item.gold[0])) {
      return "gold '" + item.gold + "' is not one of the option keys";
    }
  } else {
    if (!item.options.empty()) return "ternary item must not carry options";
    if (item.gold != "yes" && item.gold != "no" && item.gold != "maybe") {
      return "gold '" + item.gold + "' is not yes, no or maybe";
    }
  }
  return std::nullopt;
}

std::string gold_text(const QAItem& item) {
  if (item.gold.size() == 1) {
    if (auto it = item.options.find(item.gold[0]); it != item.options.end()) {
      return item.gold + ". " + it->second;
    }
  }
  return item.gold;
}

}  // namespace tgp::datasets
