#include "tgp/error.hpp"

#include <fmt/format.h>

namespace tgp {

std::string_view to_string(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::config: return "config";
    case ErrorCategory::data: return "data";
    case ErrorCategory::transport: return "transport";
    case ErrorCategory::auth: return "auth";
    case ErrorCategory::protocol: return "protocol";
    case ErrorCategory::format: return "format";
    case ErrorCategory::precondition: return "precondition";
    case ErrorCategory::interrupted: return "interrupted";
  }
  return "unknown";
}

int exit_code(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::config: return 2;
    case ErrorCategory::data: return 3;
    case ErrorCategory::transport: return 4;
    case ErrorCategory::auth: return 5;
    case ErrorCategory::protocol: return 6;
    case ErrorCategory::format: return 7;
    case ErrorCategory::precondition: return 8;
    case ErrorCategory::interrupted: return 9;
  }
  return 1;
}

PoolTooSmall::PoolTooSmall(std::size_t pool, std::size_t k)
    : PreconditionError(fmt::format(
          "exemplar pool has {} eligible items, need k = {}", pool, k)) {}

PromptTooLong::PromptTooLong(std::size_t length, std::size_t cap)
    : PreconditionError(fmt::format(
          "candidate prompt is {} characters, cap is {}", length, cap)) {}

ParseError::ParseError(std::size_t line, const std::string& reason)
    : Error(ErrorCategory::data, fmt::format("line {}: parse error: {}", line, reason)),
      line_(line) {}

ValidationError::ValidationError(std::size_t line, const std::string& reason)
    : Error(ErrorCategory::data, fmt::format("line {}: invalid item: {}", line, reason)),
      line_(line) {}

ItemError::ItemError(std::string item_id, const Error& cause)
    : Error(cause.category(), fmt::format("item {}: {}", item_id, cause.what())),
      item_id_(std::move(item_id)) {}

bool is_recoverable(ErrorCategory category) {
  return category == ErrorCategory::transport ||
         category == ErrorCategory::protocol;
}

}  // namespace tgp
