#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tgp::textgrad {

/// Version tag of the backward-engine instruction set. Bump whenever any
/// template text changes; cached responses are keyed on the full text, so
/// old entries simply stop matching.
inline constexpr std::string_view kTemplateVersion = "v1";

extern const std::string_view kLossTemplate;
extern const std::string_view kResponseGradTemplate;
extern const std::string_view kPromptGradTemplate;
extern const std::string_view kStepTemplate;

/// Wraps rewrites in the step response.
inline constexpr std::string_view kImprovedOpen = "<IMPROVED_SYSTEM_PROMPT>";
inline constexpr std::string_view kImprovedClose = "</IMPROVED_SYSTEM_PROMPT>";

/// Replaces each `{name}` with its value. Unknown placeholders are left as is.
std::string fill(std::string_view tmpl,
                 const std::vector<std::pair<std::string_view, std::string_view>>& values);

}  // namespace tgp::textgrad
