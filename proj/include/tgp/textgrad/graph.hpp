#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tgp/datasets/qa_item.hpp"
#include "tgp/gateway/gateway.hpp"
#include "tgp/parallel.hpp"
#include "tgp/textgrad/variable.hpp"

namespace tgp::textgrad {

using datasets::QAItem;
using datasets::TaskFormat;
using gateway::Gateway;

/// The task model and the backward engine. Usually two distinct gateways.
struct Engines {
  Gateway& task;
  Gateway& backward;
};

/// Role labels recorded in engine transcripts.
namespace roles {
inline constexpr std::string_view kForward = "forward";
inline constexpr std::string_view kLoss = "loss";
inline constexpr std::string_view kResponseGrad = "response_grad";
inline constexpr std::string_view kPromptGrad = "prompt_grad";
inline constexpr std::string_view kStep = "tgd_step";
inline constexpr std::string_view kDevEval = "dev_eval";
inline constexpr std::string_view kBaseline = "baseline";
}  // namespace roles

/// Prediction = task(Query, Prompt). One task-model call. Gateway failures
/// are rethrown as ItemError carrying the item id.
ForwardRecord forward(const QAItem& item, const PromptVariable& prompt, Gateway& task,
                      const TaskFormat& format);

/// Critique of the prediction against the gold answer. One backward call.
TextualFeedback natural_language_loss(const ForwardRecord& record, const QAItem& item,
                                      Gateway& backward, const TaskFormat& format);

/// How the response should change. One backward call. Requires a loss.
TextualFeedback grad_response(const TextualFeedback& loss, const ForwardRecord& record,
                              const QAItem& item, Gateway& backward,
                              const TaskFormat& format);

/// How the system prompt should change; appended to `prompt.grads`. One
/// backward call. A frozen prompt (requires_grad false) makes no call,
/// records a warning and returns nullopt.
std::optional<TextualFeedback> grad_prompt(PromptVariable& prompt, const ForwardRecord& record,
                                           const TextualFeedback& response_grad,
                                           const QAItem& item, Gateway& backward,
                                           const TaskFormat& format);

/// Rewrites the prompt from all accumulated gradients in one backward call
/// and clears them. Returns the candidate; never modifies `prompt.text`.
/// Throws EmptyGradients, PreconditionError (frozen prompt), PromptTooLong,
/// FormatError (empty rewrite).
std::string tgd_step(PromptVariable& prompt, Gateway& backward,
                     std::size_t max_prompt_chars = 2000);

/// Pulls the rewrite out of a step response: the tagged span if present,
/// otherwise the whole trimmed response.
std::string parse_rewrite(std::string_view response);

struct ItemFailure {
  std::string item_id;
  std::string stage;
  std::string message;
};

struct BatchResult {
  std::vector<TextualFeedback> gradients;  // in item order
  std::vector<ItemFailure> failures;
};

/// forward -> loss -> response grad -> prompt grad for every item, fanned
/// out up to `parallelism` (or serially), then accumulated onto
/// `prompt.grads` in item order. Items failing with a recoverable error are
/// recorded; if every item fails, TransportError is thrown.
BatchResult backward_batch(std::span<const QAItem> items, PromptVariable& prompt,
                           Engines engines, const TaskFormat& format,
                           std::size_t parallelism, Execution exec = Execution::parallel);

}  // namespace tgp::textgrad
