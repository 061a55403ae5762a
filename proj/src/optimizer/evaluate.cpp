#include "tgp/optimizer/evaluate.hpp"

#include "tgp/error.hpp"
#include "tgp/textgrad/graph.hpp"

namespace tgp::optimizer {

Evaluation evaluate_items(std::span<const QAItem> items, Gateway& task, const TaskFormat& format,
                          const ExtractionRule& rule, std::size_t parallelism, Execution exec,
                          std::string_view role, const MessageBuilder& build) {
  if (items.empty()) throw EmptyInput("evaluation over an empty item list");

  struct Slot {
    GradedPrediction graded;
    bool call_failed = false;
  };
  auto outcomes = map_indices<Slot>(items.size(), parallelism, exec, [&](std::size_t i) {
    const QAItem& item = items[i];
    auto messages = build(item);
    Slot slot;
    try {
      const auto response = task.chat(std::move(messages), role);
      slot.graded = extraction::grade(item, response.content, rule, format);
    } catch (const Error& e) {
      if (!is_recoverable(e.category())) throw;
      slot.graded.item_id = item.id;
      slot.graded.gold = item.gold;
      slot.graded.failure_reason = extraction::FailureReason::no_match;
      slot.call_failed = true;
    }
    return slot;
  });

  Evaluation eval;
  eval.graded.reserve(items.size());
  for (auto& o : outcomes) {
    if (o.error) std::rethrow_exception(o.error);
  }
  for (auto& o : outcomes) {
    if (o.value->call_failed) eval.failed_items.push_back(o.value->graded.item_id);
    eval.graded.push_back(std::move(o.value->graded));
  }
  eval.accuracy = extraction::accuracy(eval.graded);
  return eval;
}

Evaluation evaluate_on_dev(std::string_view prompt_text, std::span<const QAItem> dev,
                           Gateway& task, const TaskFormat& format, const ExtractionRule& rule,
                           std::size_t parallelism, Execution exec) {
  const std::string prompt(prompt_text);
  return evaluate_items(dev, task, format, rule, parallelism, exec, textgrad::roles::kDevEval,
                        [&](const QAItem& item) {
                          return strategies::build_with_system_prompt(item, prompt, format);
                        });
}

Evaluation run_baseline(const strategies::PromptStrategy& strategy, std::span<const QAItem> test,
                        std::span<const QAItem> pool, Gateway& task, const TaskFormat& format,
                        const ExtractionRule& rule, std::size_t parallelism, Execution exec) {
  strategies::validate(strategy);
  return evaluate_items(test, task, format, rule, parallelism, exec, textgrad::roles::kBaseline,
                        [&](const QAItem& item) {
                          return strategies::build_messages(strategy, item, pool, format);
                        });
}

}  // namespace tgp::optimizer
