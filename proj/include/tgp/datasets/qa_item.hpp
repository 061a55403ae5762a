#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace tgp::datasets {

struct TaskFormat {
  enum class Kind { multiple_choice, ternary };

  Kind kind = Kind::multiple_choice;
  std::string option_alphabet = "ABCDE";
  bool requires_context = false;

  static TaskFormat multiple_choice(std::string alphabet = "ABCDE");
  static TaskFormat ternary(bool requires_context = false);

  bool is_mc() const { return kind == Kind::multiple_choice; }
};

/// "mc" / "ternary". Throws ConfigError on anything else.
TaskFormat format_from_string(std::string_view name);
std::string_view to_string(TaskFormat::Kind kind);

struct QAItem {
  std::string id;
  std::string question;
  std::optional<std::string> context;
  std::map<char, std::string> options;  // empty for ternary items
  std::string gold;                     // letter, or yes/no/maybe
  nlohmann::json meta = nlohmann::json::object();
};

/// Empty optional when `item` satisfies `format`; otherwise the reason.
std::optional<std::string> check(const QAItem& item, const TaskFormat& format);

/// Text shown to the model for the gold answer, e.g. "C. Teriparatide".
std::string gold_text(const QAItem& item);

}  // namespace tgp::datasets
