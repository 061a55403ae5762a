#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "tgp/gateway/chat.hpp"

namespace tgp::gateway {

enum class BackendKind { http, mock };

struct BackendConfig {
  BackendKind kind = BackendKind::mock;
  std::optional<std::string> base_url;
  std::string api_key_env;
  int retry_limit = 3;
  std::chrono::milliseconds request_timeout{60'000};
  std::optional<std::filesystem::path> cache_path;
  /// First retry waits this long; each further retry doubles it.
  std::chrono::milliseconds backoff_base{500};
  std::chrono::milliseconds backoff_max{30'000};
};

/// Throws ConfigError when the invariants of `config` do not hold.
void validate(const BackendConfig& config);

/// Retryable failure signalled by a backend (timeouts, 429, 5xx). The
/// gateway converts it to TransportError once retries are exhausted.
class TransientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One chat-completion provider. Implementations must be safe to call from
/// several threads at once.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatResponse send(const ChatRequest& request) = 0;
};

}  // namespace tgp::gateway
