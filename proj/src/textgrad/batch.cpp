#include "tgp/error.hpp"
#include "tgp/textgrad/graph.hpp"

namespace tgp::textgrad {
namespace {

struct ItemPipeline {
  std::optional<TextualFeedback> gradient;
  std::vector<std::string> warnings;
  std::optional<ItemFailure> failure;
};

ItemPipeline run_item(const QAItem& item, const PromptVariable& prompt, Engines engines,
                      const TaskFormat& format) {
  ItemPipeline out;
  const char* stage = "forward";
  try {
    auto record = forward(item, prompt, engines.task, format);
    if (record.prediction.empty()) {
      out.failure = ItemFailure{item.id, stage, "task model returned an empty response"};
      return out;
    }
    stage = "loss";
    auto loss = natural_language_loss(record, item, engines.backward, format);
    stage = "response_grad";
    auto rgrad = grad_response(loss, record, item, engines.backward, format);
    stage = "prompt_grad";
    // Each item works on its own view of the prompt; accumulation onto the
    // shared variable happens afterwards, in item order.
    PromptVariable local{prompt.text, prompt.requires_grad, {}, {}};
    out.gradient = grad_prompt(local, record, rgrad, item, engines.backward, format);
    out.warnings = std::move(local.warnings);
  } catch (const Error& e) {
    if (!is_recoverable(e.category())) throw;
    out.failure = ItemFailure{item.id, stage, e.what()};
  }
  return out;
}

}  // namespace

BatchResult backward_batch(std::span<const QAItem> items, PromptVariable& prompt,
                           Engines engines, const TaskFormat& format,
                           std::size_t parallelism, Execution exec) {
  if (items.empty()) throw PreconditionError("backward pass over an empty batch");

  auto outcomes = map_indices<ItemPipeline>(items.size(), parallelism, exec, [&](std::size_t i) {
    return run_item(items[i], prompt, engines, format);
  });

  // Fatal errors (auth, interrupts, precondition) win over item results.
  for (auto& o : outcomes) {
    if (o.error) std::rethrow_exception(o.error);
  }

  BatchResult result;
  for (auto& o : outcomes) {
    auto& p = *o.value;
    for (auto& w : p.warnings) prompt.warnings.push_back(std::move(w));
    if (p.failure) {
      result.failures.push_back(std::move(*p.failure));
    } else if (p.gradient) {
      prompt.grads.push_back(*p.gradient);
      result.gradients.push_back(std::move(*p.gradient));
    }
  }
  if (result.failures.size() == items.size()) {
    throw TransportError("every item in the batch failed; first: " +
                         result.failures.front().message);
  }
  return result;
}

}  // namespace tgp::textgrad
