#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tgp/datasets/qa_item.hpp"
#include "tgp/extraction/grading.hpp"
#include "tgp/gateway/gateway.hpp"
#include "tgp/parallel.hpp"
#include "tgp/strategies/strategies.hpp"

namespace tgp::optimizer {

using datasets::QAItem;
using datasets::TaskFormat;
using extraction::ExtractionRule;
using extraction::GradedPrediction;
using gateway::Gateway;

struct Evaluation {
  double accuracy = 0.0;
  std::vector<GradedPrediction> graded;  // in item order
  std::vector<std::string> failed_items; // calls that failed; graded incorrect
};

using MessageBuilder =
    std::function<std::vector<gateway::ChatMessage>(const QAItem&)>;

/// Sends one message list per item through `task`, grades each response and
/// returns the accuracy. Items whose call fails with a recoverable error are
/// graded incorrect (no_match) and listed in failed_items; other errors
/// propagate. Throws EmptyInput on an empty item list.

Evaluation evaluate_items(std::span<const QAItem> items, Gateway& task, const TaskFormat& format,
                          const ExtractionRule& rule, std::size_t parallelism, Execution exec,
                          std::string_view role, const MessageBuilder& build);

/// Accuracy of a fixed system prompt on the dev items.
Evaluation evaluate_on_dev(std::string_view prompt_text, std::span<const QAItem> dev,
                           Gateway& task, const TaskFormat& format, const ExtractionRule& rule,
                           std::size_t parallelism, Execution exec = Execution::parallel);

/// Baseline strategy over the test items; `pool` feeds few-shot exemplars.
Evaluation run_baseline(const strategies::PromptStrategy& strategy, std::span<const QAItem> test,
                        std::span<const QAItem> pool, Gateway& task, const TaskFormat& format,
                        const ExtractionRule& rule, std::size_t parallelism,
                        Execution exec = Execution::parallel);

}  // namespace tgp::optimizer
