#include "tgp/gateway/chat.hpp"

#include "tgp/digest.hpp"
#include "tgp/error.hpp"

namespace tgp::gateway {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
  }
  return "user";
}

Role role_from_string(std::string_view s) {
  if (s == "system") return Role::system;
  if (s == "user") return Role::user;
  if (s == "assistant") return Role::assistant;
  throw FormatError("unknown chat role '" + std::string(s) + "'");
}

void validate_messages(const std::vector<ChatMessage>& messages) {
  if (messages.empty()) throw FormatError("chat request has no messages");
  for (std::size_t i = 0; i < messages.size(); ++i) {
    if (messages[i].content.empty()) {
      throw FormatError("message " + std::to_string(i) + " has empty content");
    }
    if (messages[i].role == Role::system && i != 0) {
      throw FormatError("system message must be first and unique");
    }
  }
}

void validate(const ChatRequest& request) {
  if (request.model_id.empty()) throw FormatError("chat request has no model id");
  validate_messages(request.messages);
  if (request.temperature < 0.0) throw FormatError("temperature must be >= 0");
  if (request.max_tokens <= 0) throw FormatError("max_tokens must be positive");
}

nlohmann::json to_json(const ChatRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  }
  nlohmann::json j = {
      {"model", request.model_id},
      {"messages", std::move(messages)},
      {"temperature", request.temperature},
      {"max_tokens", request.max_tokens},
  };
  if (request.seed) j["seed"] = *request.seed;
  return j;
}

std::string cache_key(const ChatRequest& request) {
  auto j = to_json(request);
  // Absent seed is part of the identity too.
  if (!request.seed) j["seed"] = nullptr;
  return sha256_hex(j.dump());
}

nlohmann::json to_json(const ChatResponse& response) {
  return {
      {"content", response.content},
      {"model_id", response.model_id},
      {"usage",
       {{"prompt_tokens", response.usage.prompt},
        {"completion_tokens", response.usage.completion}}},
  };
}

ChatResponse response_from_json(const nlohmann::json& j) {
  ChatResponse r;
  r.content = j.at("content").get<std::string>();
  r.model_id = j.value("model_id", std::string{});
  if (auto it = j.find("usage"); it != j.end() && it->is_object()) {
    r.usage.prompt = it->value("prompt_tokens", std::int64_t{0});
    r.usage.completion = it->value("completion_tokens", std::int64_t{0});
  }
  return r;
}

std::string flatten(const ChatRequest& request) {
  std::string out;
  for (const auto& m : request.messages) {
    if (!out.empty()) out.push_back('\n');
    out += m.content;
  }
  return out;
}

std::optional<std::string> system_text(const ChatRequest& request) {
  if (!request.messages.empty() && request.messages.front().role == Role::system) {
    return request.messages.front().content;
  }
  return std::nullopt;
}

}  // namespace tgp::gateway
