#include "tgp/gateway/http_backend.hpp"

#include <cstdlib>
#include <regex>

#include <fmt/format.h>
#include <httplib.h>

#include "tgp/error.hpp"

namespace tgp::gateway {
namespace {

void split_url(const std::string& url, std::string& origin, std::string& path) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, kUrl)) {
    throw ConfigError("base_url is not an http(s) URL: " + url);
  }
  origin = m[1].str();
  path = m[2].matched ? m[2].str() : std::string{};
  while (!path.empty() && path.back() == '/') path.pop_back();
}

}  // namespace

void validate(const BackendConfig& config) {
  if (config.retry_limit < 0) throw ConfigError("retry_limit must be >= 0");
  if (config.kind == BackendKind::http) {
    if (!config.base_url || config.base_url->empty()) {
      throw ConfigError("http backend requires base_url");
    }
    if (config.api_key_env.empty()) {
      throw ConfigError("http backend requires api_key_env");
    }
  }
}

HttpBackend::HttpBackend(BackendConfig config) : config_(std::move(config)) {
  validate(config_);
  split_url(*config_.base_url, origin_, path_);
  path_ += "/chat/completions";
}

std::string http_request_body(const ChatRequest& request) {
  return to_json(request).dump();
}

ChatResponse parse_completion_body(const std::string& body,
                                   const std::string& fallback_model) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("completion body is not JSON: ") + e.what());
  }
  try {
    const auto& choices = j.at("choices");
    if (!choices.is_array() || choices.empty()) {
      throw ProtocolError("completion body has no choices");
    }
    const auto& content = choices.at(0).at("message").at("content");
    ChatResponse r;
    // A null content is an explicit refusal; surface it as empty text.
    r.content = content.is_null() ? std::string{} : content.get<std::string>();
    r.model_id = j.value("model", fallback_model);
    if (auto it = j.find("usage"); it != j.end() && it->is_object()) {
      r.usage.prompt = it->value("prompt_tokens", std::int64_t{0});
      r.usage.completion = it->value("completion_tokens", std::int64_t{0});
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("unexpected completion body shape: ") + e.what());
  }
}

ChatResponse HttpBackend::send(const ChatRequest& request) {
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw AuthError("environment variable " + config_.api_key_env + " is not set");
  }

  httplib::Client client(origin_);
  const auto secs = config_.request_timeout.count() / 1000;
  const auto usecs = (config_.request_timeout.count() % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  client.set_bearer_token_auth(key);

  auto res = client.Post(path_, http_request_body(request), "application/json");
  if (!res) {
    throw TransientError("request failed: " + httplib::to_string(res.error()));
  }
  const int status = res->status;
  if (status == 401 || status == 403) {
    throw AuthError(fmt::format("endpoint rejected credentials (HTTP {})", status));
  }
  if (status == 429 || status >= 500) {
    throw TransientError(fmt::format("HTTP {}", status));
  }
  if (status < 200 || status >= 300) {
    throw ProtocolError(fmt::format("HTTP {}: {}", status, res->body.substr(0, 512)));
  }
  return parse_completion_body(res->body, request.model_id);
}

}  // namespace tgp::gateway
