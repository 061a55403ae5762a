#include "tgp/textgrad/graph.hpp"

#include <cctype>

#include <fmt/format.h>

#include "tgp/error.hpp"
#include "tgp/strategies/strategies.hpp"
#include "tgp/textgrad/templates.hpp"

namespace tgp::textgrad {
namespace {

using gateway::ChatMessage;
using gateway::Role;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string ask(Gateway& backward, std::string prompt, std::string_view role) {
  return backward.chat({ChatMessage{Role::user, std::move(prompt)}}, role).content;
}

}  // namespace

std::string_view to_string(TextualFeedback::Kind kind) {
  switch (kind) {
    case TextualFeedback::Kind::loss: return "loss";
    case TextualFeedback::Kind::response_grad: return "response_grad";
    case TextualFeedback::Kind::prompt_grad: return "prompt_grad";
  }
  return "loss";
}

ForwardRecord forward(const QAItem& item, const PromptVariable& prompt, Gateway& task,
                      const TaskFormat& format) {
  if (prompt.text.empty()) throw PreconditionError("forward pass with an empty prompt");
  ForwardRecord record;
  record.item_id = item.id;
  record.messages = strategies::build_with_system_prompt(item, prompt.text, format);
  try {
    record.prediction = task.chat(record.messages, roles::kForward).content;
  } catch (const Error& e) {
    throw ItemError(item.id, e);
  }
  return record;
}

TextualFeedback natural_language_loss(const ForwardRecord& record, const QAItem& item,
                                      Gateway& backward, const TaskFormat& format) {
  if (record.prediction.empty()) {
    throw PreconditionError("item " + record.item_id + ": loss of an empty prediction");
  }
  const auto question = strategies::render_question(item, format);
  const auto gold = datasets::gold_text(item);
  auto body = ask(backward,
                  fill(kLossTemplate, {{"question", question},
                                       {"response", record.prediction},
                                       {"gold", gold}}),
                  roles::kLoss);
  return {std::move(body), TextualFeedback::Kind::loss, item.id,
          backward.endpoint().model_id};
}

TextualFeedback grad_response(const TextualFeedback& loss, const ForwardRecord& record,
                              const QAItem& item, Gateway& backward,
                              const TaskFormat& format) {
  if (loss.kind != TextualFeedback::Kind::loss) {
    throw PreconditionError("response gradient needs a loss, got " +
                            std::string(to_string(loss.kind)));
  }
  const auto question = strategies::render_question(item, format);
  const auto gold = datasets::gold_text(item);
  auto body = ask(backward,
                  fill(kResponseGradTemplate, {{"question", question},
                                               {"response", record.prediction},
                                               {"gold", gold},
                                               {"loss", loss.body}}),
                  roles::kResponseGrad);
  return {std::move(body), TextualFeedback::Kind::response_grad, item.id,
          backward.endpoint().model_id};
}

std::optional<TextualFeedback> grad_prompt(PromptVariable& prompt, const ForwardRecord& record,
                                           const TextualFeedback& response_grad,
                                           const QAItem& item, Gateway& backward,
                                           const TaskFormat& format) {
  if (response_grad.kind != TextualFeedback::Kind::response_grad) {
    throw PreconditionError("prompt gradient needs a response gradient, got " +
                            std::string(to_string(response_grad.kind)));
  }
  if (!prompt.requires_grad) {
    prompt.warnings.push_back("prompt gradient skipped for item " + item.id +
                              ": prompt does not require gradients");
    return std::nullopt;
  }
  const auto question = strategies::render_question(item, format);
  auto body = ask(backward,
                  fill(kPromptGradTemplate, {{"prompt", prompt.text},
                                             {"question", question},
                                             {"response", record.prediction},
                                             {"response_grad", response_grad.body}}),
                  roles::kPromptGrad);
  TextualFeedback fb{std::move(body), TextualFeedback::Kind::prompt_grad, item.id,
                     backward.endpoint().model_id};
  prompt.grads.push_back(fb);
  return fb;
}

std::string parse_rewrite(std::string_view response) {
  const auto open = response.find(kImprovedOpen);
  if (open != std::string_view::npos) {
    const auto body = open + kImprovedOpen.size();
    const auto close = response.find(kImprovedClose, body);
    if (close != std::string_view::npos) {
      return std::string(trim(response.substr(body, close - body)));
    }
    return std::string(trim(response.substr(body)));
  }
  return std::string(trim(response));
}

std::string tgd_step(PromptVariable& prompt, Gateway& backward, std::size_t max_prompt_chars) {
  if (!prompt.requires_grad) throw PreconditionError("cannot step a frozen prompt");
  if (prompt.grads.empty()) throw EmptyGradients();

  std::string feedback;
  for (std::size_t i = 0; i < prompt.grads.size(); ++i) {
    if (i > 0) feedback += "\n\n";
    feedback += fmt::format("<FEEDBACK index=\"{}\">\n{}\n</FEEDBACK>", i + 1,
                            prompt.grads[i].body);
  }
  const auto request = fill(kStepTemplate, {{"prompt", prompt.text}, {"feedback", feedback}});
  // Gradients never carry across steps, even when the call fails.
  prompt.grads.clear();

  auto candidate = parse_rewrite(ask(backward, request, roles::kStep));
  if (candidate.empty()) throw FormatError("step produced an empty prompt");
  if (candidate.size() > max_prompt_chars) {
    throw PromptTooLong(candidate.size(), max_prompt_chars);
  }
  return candidate;
}

}  // namespace tgp::textgrad
