#pragma once

#include <string>

#include "tgp/gateway/backend.hpp"

namespace tgp::gateway {

/// OpenAI-compatible `POST {base_url}/chat/completions` client.
///
/// The bearer token is read from the environment variable named by
/// `api_key_env` on every call, so a missing key fails with AuthError at
/// request time rather than at construction. Status handling:
///   401/403          -> AuthError
///   429, 5xx, I/O    -> TransientError (retried by the gateway)
///   other 4xx        -> ProtocolError, never retried
///   unparsable body  -> ProtocolError
class HttpBackend : public ChatBackend {
 public:
  explicit HttpBackend(BackendConfig config);

  ChatResponse send(const ChatRequest& request) override;

 private:
  BackendConfig config_;
  std::string origin_;  // scheme://host[:port]
  std::string path_;    // path prefix + /chat/completions
};

/// Builds the JSON body sent to the endpoint.
std::string http_request_body(const ChatRequest& request);

/// Parses an OpenAI-shaped completion body. Throws ProtocolError.
ChatResponse parse_completion_body(const std::string& body,
                                   const std::string& fallback_model);

}  // namespace tgp::gateway
