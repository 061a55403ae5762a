#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace tgp::gateway {

enum class Role { system, user, assistant };

std::string_view to_string(Role role);
Role role_from_string(std::string_view s);

struct ChatMessage {
  Role role = Role::user;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

struct ChatRequest {
  std::string model_id;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_tokens = 1024;
  std::optional<std::int64_t> seed;
};

struct TokenUsage {
  std::int64_t prompt = 0;
  std::int64_t completion = 0;
};

struct ChatResponse {
  std::string content;
  std::string model_id;
  TokenUsage usage;
  bool from_cache = false;
};

/// Throws FormatError if any message is empty, a role is misplaced, or the
/// request parameters are out of range.
void validate(const ChatRequest& request);

/// Throws FormatError unless the list has at most one system message and it
/// comes first, and no message content is empty.
void validate_messages(const std::vector<ChatMessage>& messages);

/// Canonical JSON form (object keys sorted) used for digests and the wire.
nlohmann::json to_json(const ChatRequest& request);

/// Cache digest: SHA-256 over the canonical JSON of model id, messages,
/// temperature, max_tokens and seed.
std::string cache_key(const ChatRequest& request);

nlohmann::json to_json(const ChatResponse& response);
ChatResponse response_from_json(const nlohmann::json& j);

/// All message contents joined by newlines. Mock matchers search this.
std::string flatten(const ChatRequest& request);

/// Content of the system message, if the first message is one.
std::optional<std::string> system_text(const ChatRequest& request);

}  // namespace tgp::gateway
