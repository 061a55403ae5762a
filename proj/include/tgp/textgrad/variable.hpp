#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tgp/gateway/chat.hpp"

namespace tgp::textgrad {

struct TextualFeedback {
  enum class Kind { loss, response_grad, prompt_grad };

  std::string body;
  Kind kind = Kind::loss;
  std::string source_item_id;
  std::string engine_model;
};

std::string_view to_string(TextualFeedback::Kind kind);

/// The optimizable system prompt. `grads` holds prompt gradients
/// accumulated since the last step; `warnings` records refused operations.
struct PromptVariable {
  std::string text;
  bool requires_grad = true;
  std::vector<TextualFeedback> grads;
  std::vector<std::string> warnings;
};

struct ForwardRecord {
  std::string item_id;
  std::vector<gateway::ChatMessage> messages;
  std::string prediction;
  std::optional<std::string> extracted;  // set by grading
  std::optional<bool> correct;           // set by grading
};

}  // namespace tgp::textgrad
