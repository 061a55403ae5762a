#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "tgp/gateway/backend.hpp"
#include "tgp/gateway/cache.hpp"
#include "tgp/gateway/chat.hpp"
#include "tgp/gateway/transcript.hpp"

namespace tgp::gateway {

/// Per-engine request defaults.
struct EndpointConfig {
  std::string model_id;
  double temperature = 0.0;
  int max_tokens = 1024;
  std::optional<std::int64_t> seed;
  /// Upper bound on simultaneous live requests through this gateway.
  std::size_t parallelism = 8;

  static EndpointConfig task_defaults(std::string model_id);
  static EndpointConfig backward_defaults(std::string model_id);
};

struct GatewayStats {
  std::uint64_t requests = 0;       // complete() calls that returned or failed
  std::uint64_t backend_calls = 0;  // attempts that reached the backend
  std::uint64_t cache_hits = 0;
  std::uint64_t failures = 0;
};

/// Uniform entry point for one chat engine: request validation, response
/// cache, bounded concurrency, retry with exponential backoff, transcript.
/// Safe for concurrent use.
class Gateway {
 public:
  Gateway(std::shared_ptr<ChatBackend> backend, BackendConfig config,
          EndpointConfig endpoint, bool enable_cache = true);

  ChatResponse complete(const ChatRequest& request, std::string_view role = {});

  /// Builds a request from the endpoint defaults and sends it.
  ChatResponse chat(std::vector<ChatMessage> messages, std::string_view role = {});

  ChatRequest make_request(std::vector<ChatMessage> messages) const;

  void set_transcript(std::shared_ptr<TranscriptWriter> writer, std::string engine_label);

  const EndpointConfig& endpoint() const { return endpoint_; }
  const BackendConfig& config() const { return config_; }
  ChatBackend& backend() { return *backend_; }
  const ResponseCache* cache() const { return cache_.get(); }

  GatewayStats stats() const;

 private:
  ChatResponse send_with_retry(const ChatRequest& request);

  std::shared_ptr<ChatBackend> backend_;
  BackendConfig config_;
  EndpointConfig endpoint_;
  std::unique_ptr<ResponseCache> cache_;
  std::counting_semaphore<4096> slots_;
  std::shared_ptr<TranscriptWriter> transcript_;
  std::string engine_label_;

  std::atomic<std::uint64_t> requests_{0};
  std::atomic<std::uint64_t> backend_calls_{0};
  std::atomic<std::uint64_t> cache_hits_{0};
  std::atomic<std::uint64_t> failures_{0};
};

/// Constructs the backend named by `config.kind`. For mock kind, `mock` must
/// be provided.
std::shared_ptr<ChatBackend> make_backend(const BackendConfig& config,
                                          std::shared_ptr<ChatBackend> mock = nullptr);

}  // namespace tgp::gateway
