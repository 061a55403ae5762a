#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tgp/datasets/qa_item.hpp"
#include "tgp/gateway/chat.hpp"

namespace tgp::strategies {

using datasets::QAItem;
using datasets::TaskFormat;
using gateway::ChatMessage;

/// Think/answer tag conversation template used as the CoT system message.
extern const std::string_view kCotSystemTemplate;

/// Default optimizable system prompt.
extern const std::string_view kDefaultSeedPrompt;

struct PromptStrategy {
  enum class Kind { zero_shot, few_shot, cot, system_prompt };

  Kind kind = Kind::zero_shot;
  std::optional<std::size_t> k;            // few_shot
  std::optional<std::string> system_text;  // system_prompt
  std::uint64_t rng_seed = 0;
};

/// "zero-shot", "few-shot", "cot". Throws ConfigError.
PromptStrategy::Kind strategy_from_string(std::string_view name);
std::string_view to_string(PromptStrategy::Kind kind);

/// Throws ConfigError when required fields for `kind` are missing.
void validate(const PromptStrategy& strategy);

/// Context, stem and lettered options ("A. ...") in sorted key order.
/// Throws FormatError if the item is not well-formed for `format`.
std::string render_question(const QAItem& item, const TaskFormat& format);

/// Fixed answer-format line appended for non-CoT strategies.
std::string answer_instruction(const QAItem& item, const TaskFormat& format);

std::vector<ChatMessage> build_zero_shot(const QAItem& item, const TaskFormat& format);

/// k exemplars drawn uniformly without replacement from `pool` (the target
/// item, matched by id, is never eligible), rendered as user/assistant
/// turns, then the target question. k = 0 equals build_zero_shot.
/// Throws PoolTooSmall.
std::vector<ChatMessage> build_few_shot(const QAItem& item, std::span<const QAItem> pool,
                                        std::size_t k, std::uint64_t rng_seed,
                                        const TaskFormat& format);

std::vector<ChatMessage> build_cot(const QAItem& item, const TaskFormat& format);

/// Throws FormatError on empty `system_text`.
std::vector<ChatMessage> build_with_system_prompt(const QAItem& item,
                                                  std::string_view system_text,
                                                  const TaskFormat& format);

/// Dispatches on `strategy.kind`. Few-shot sampling uses a per-item seed
/// derived from rng_seed and the item id so that exemplars vary by question
/// while staying reproducible.
std::vector<ChatMessage> build_messages(const PromptStrategy& strategy, const QAItem& item,
                                        std::span<const QAItem> pool,
                                        const TaskFormat& format);

std::uint64_t few_shot_item_seed(std::uint64_t rng_seed, std::string_view item_id);

}  // namespace tgp::strategies
