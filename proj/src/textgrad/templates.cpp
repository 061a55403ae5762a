#include "tgp/textgrad/templates.hpp"

// The texts below are reproduced verbatim in docs/backward_templates.md.
// Keep the two in sync and bump kTemplateVersion on any edit.

namespace tgp::textgrad {

const std::string_view kLossTemplate =
    R"(You are evaluating a language model's answer to a question against a validated ground truth answer.

<QUESTION>
{question}
</QUESTION>

<MODEL_RESPONSE>
{response}
</MODEL_RESPONSE>

<GROUND_TRUTH>
{gold}
</GROUND_TRUTH>

Critique the model response. State whether its final answer agrees with the ground truth, then identify the concrete weaknesses in its reasoning, accuracy, or clarity. Be concise and specific.)";

const std::string_view kResponseGradTemplate =
    R"(You are part of an optimization system that improves a language model's answers to questions.

<QUESTION>
{question}
</QUESTION>

<MODEL_RESPONSE>
{response}
</MODEL_RESPONSE>

<GROUND_TRUTH>
{gold}
</GROUND_TRUTH>

<CRITIQUE>
{loss}
</CRITIQUE>

Given the critique, explain how the model response should change to better agree with the ground truth. Give specific, actionable feedback on the response. Do not write a new response.)";

const std::string_view kPromptGradTemplate =
    R"(You are part of an optimization system that improves the system prompt of a language model answering questions. The system prompt below was given to the model, which then answered the question.

<SYSTEM_PROMPT>
{prompt}
</SYSTEM_PROMPT>

<QUESTION>
{question}
</QUESTION>

<MODEL_RESPONSE>
{response}
</MODEL_RESPONSE>

<RESPONSE_FEEDBACK>
{response_grad}
</RESPONSE_FEEDBACK>

Explain how the system prompt contributed to the weaknesses described in the feedback, and how the system prompt should be modified so that future responses are more accurate and better reasoned. Give feedback on the system prompt only; do not rewrite it.)";

const std::string_view kStepTemplate =
    R"(You are optimizing the system prompt of a language model that answers questions.

<CURRENT_SYSTEM_PROMPT>
{prompt}
</CURRENT_SYSTEM_PROMPT>

Feedback on this system prompt, collected from a batch of questions:

{feedback}

Rewrite the system prompt to address the feedback. The prompt is applied to every question, so keep it general and do not mention specific questions. Reply with the new system prompt only, between <IMPROVED_SYSTEM_PROMPT> and </IMPROVED_SYSTEM_PROMPT>.)";

std::string fill(std::string_view tmpl,
                 const std::vector<std::pair<std::string_view, std::string_view>>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const auto open = tmpl.find('{', pos);
    if (open == std::string_view::npos) break;
    const auto close = tmpl.find('}', open + 1);
    if (close == std::string_view::npos) break;
    out.append(tmpl.substr(pos, open - pos));
    const auto name = tmpl.substr(open + 1, close - open - 1);
    bool replaced = false;
    for (const auto& [key, value] : values) {
      if (key == name) {
        out.append(value);
        replaced = true;
        break;
      }
    }
    if (!replaced) out.append(tmpl.substr(open, close - open + 1));
    pos = close + 1;
  }
  out.append(tmpl.substr(pos));
  return out;
}

}  // namespace tgp::textgrad
