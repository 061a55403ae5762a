#include "tgp/strategies/strategies.hpp"

#include <unordered_set>

#include "tgp/digest.hpp"
#include "tgp/error.hpp"
#include "tgp/rng.hpp"

namespace tgp::strategies {

using gateway::Role;

const std::string_view kCotSystemTemplate =
    "A conversation between User and Assistant. The user asks a question, and the "
    "Assistant solves it. The assistant first thinks about the reasoning process in the "
    "mind and then provides the user with the answer. The reasoning process and answer "
    "are enclosed within <think> </think> and <answer> </answer> tags, respectively, "
    "i.e.,\n<think> reasoning process here </think>\n<answer> answer here </answer>";

const std::string_view kDefaultSeedPrompt = "You are a helpful, creative, and smart assistant.";

namespace {

std::string letter_list(const QAItem& item) {
  std::string out;
  std::size_t i = 0;
  for (const auto& [letter, text] : item.options) {
    if (i > 0) out += (i + 1 == item.options.size()) ? (i == 1 ? " or " : ", or ") : ", ";
    out.push_back(letter);
    ++i;
  }
  return out;
}

std::string cot_instruction(const QAItem& item, const TaskFormat& format) {
  if (format.is_mc()) {
    return "Think inside the <think> tags, then give only the letter of the single best "
           "option (" + letter_list(item) + ") inside the <answer> tags.";
  }
  return "Think inside the <think> tags, then answer yes, no, or maybe inside the <answer> "
         "tags.";
}

}  // namespace

PromptStrategy::Kind strategy_from_string(std::string_view name) {
  if (name == "zero-shot" || name == "zero_shot") return PromptStrategy::Kind::zero_shot;
  if (name == "few-shot" || name == "few_shot") return PromptStrategy::Kind::few_shot;
  if (name == "cot") return PromptStrategy::Kind::cot;
  throw ConfigError("unknown strategy '" + std::string(name) +
                    "' (expected zero-shot, few-shot or cot)");
}

std::string_view to_string(PromptStrategy::Kind kind) {
  switch (kind) {
    case PromptStrategy::Kind::zero_shot: return "zero-shot";
    case PromptStrategy::Kind::few_shot: return "few-shot";
    case PromptStrategy::Kind::cot: return "cot";
    case PromptStrategy::Kind::system_prompt: return "system-prompt";
  }
  return "zero-shot";
}

void validate(const PromptStrategy& strategy) {
  if (strategy.kind == PromptStrategy::Kind::few_shot && !strategy.k) {
    throw ConfigError("few-shot strategy requires k");
  }
  if (strategy.kind == PromptStrategy::Kind::system_prompt &&
      (!strategy.system_text || strategy.system_text->empty())) {
    throw ConfigError("system-prompt strategy requires non-empty system text");
  }
}

std::string render_question(const QAItem& item, const TaskFormat& format) {
  if (auto reason = datasets::check(item, format)) {
    throw FormatError("item " + item.id + ": " + *reason);
  }
  std::string out;
  if (item.context && !item.context->empty()) {
    out += *item.context;
    out += "\n\n";
  }
  out += item.question;
  if (format.is_mc()) {
    out += "\n";
    for (const auto& [letter, text] : item.options) {
      out += "\n";
      out.push_back(letter);
      out += ". ";
      out += text;
    }
  }
  return out;
}

std::string answer_instruction(const QAItem& item, const TaskFormat& format) {
  if (format.is_mc()) {
    return "Answer with the letter of the single best option (" + letter_list(item) + ").";
  }
  return "Answer yes, no, or maybe.";
}

namespace {

std::string user_turn(const QAItem& item, const TaskFormat& format) {
  return render_question(item, format) + "\n\n" + answer_instruction(item, format);
}

}  // namespace

std::vector<ChatMessage> build_zero_shot(const QAItem& item, const TaskFormat& format) {
  return {{Role::user, user_turn(item, format)}};
}

std::vector<ChatMessage> build_few_shot(const QAItem& item, std::span<const QAItem> pool,
                                        std::size_t k, std::uint64_t rng_seed,
                                        const TaskFormat& format) {
  std::vector<const QAItem*> eligible;
  eligible.reserve(pool.size());
  for (const auto& candidate : pool) {
    if (candidate.id != item.id) eligible.push_back(&candidate);
  }
  if (eligible.size() < k) throw PoolTooSmall(eligible.size(), k);

  std::vector<ChatMessage> messages;
  messages.reserve(2 * k + 1);
  SplitMix64 rng(rng_seed);
  const auto perm = partial_shuffle(eligible.size(), k, rng);
  for (std::size_t i = 0; i < k; ++i) {
    const QAItem& ex = *eligible[perm[i]];
    messages.push_back({Role::user, user_turn(ex, format)});
    messages.push_back({Role::assistant, ex.gold});
  }
  messages.push_back({Role::user, user_turn(item, format)});
  return messages;
}

std::vector<ChatMessage> build_cot(const QAItem& item, const TaskFormat& format) {
  return {
      {Role::system, std::string(kCotSystemTemplate)},
      {Role::user, render_question(item, format) + "\n\n" + cot_instruction(item, format)},
  };
}

std::vector<ChatMessage> build_with_system_prompt(const QAItem& item,
                                                  std::string_view system_text,
                                                  const TaskFormat& format) {
  if (system_text.empty()) throw FormatError("system prompt is empty");
  return {
      {Role::system, std::string(system_text)},
      {Role::user, user_turn(item, format)},
  };
}

std::uint64_t few_shot_item_seed(std::uint64_t rng_seed, std::string_view item_id) {
  return mix_seed(rng_seed, digest64(item_id));
}

std::vector<ChatMessage> build_messages(const PromptStrategy& strategy, const QAItem& item,
                                        std::span<const QAItem> pool,
                                        const TaskFormat& format) {
  validate(strategy);
  switch (strategy.kind) {
    case PromptStrategy::Kind::zero_shot:
      return build_zero_shot(item, format);
    case PromptStrategy::Kind::few_shot:
      return build_few_shot(item, pool, *strategy.k,
                            few_shot_item_seed(strategy.rng_seed, item.id), format);
    case PromptStrategy::Kind::cot:
      return build_cot(item, format);
    case PromptStrategy::Kind::system_prompt:
      return build_with_system_prompt(item, *strategy.system_text, format);
  }
  return build_zero_shot(item, format);
}

}  // namespace tgp::strategies
