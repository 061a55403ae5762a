#include "tgp/gateway/gateway.hpp"

#include <algorithm>
#include <thread>

#include "tgp/error.hpp"
#include "tgp/gateway/http_backend.hpp"

namespace tgp::gateway {
namespace {

constexpr std::ptrdiff_t kMaxSlots = 4096;

std::ptrdiff_t slot_count(std::size_t parallelism) {
  return std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(parallelism), 1, kMaxSlots);
}

}  // namespace

EndpointConfig EndpointConfig::task_defaults(std::string model_id) {
  EndpointConfig c;
  c.model_id = std::move(model_id);
  c.temperature = 0.0;
  c.max_tokens = 1024;
  return c;
}

EndpointConfig EndpointConfig::backward_defaults(std::string model_id) {
  EndpointConfig c;
  c.model_id = std::move(model_id);
  c.temperature = 0.7;
  c.max_tokens = 2048;
  return c;
}

Gateway::Gateway(std::shared_ptr<ChatBackend> backend, BackendConfig config,
                 EndpointConfig endpoint, bool enable_cache)
    : backend_(std::move(backend)),
      config_(std::move(config)),
      endpoint_(std::move(endpoint)),
      slots_(slot_count(endpoint_.parallelism)) {
  if (!backend_) throw ConfigError("gateway needs a backend");
  validate(config_);
  if (enable_cache) {
    cache_ = config_.cache_path ? std::make_unique<ResponseCache>(*config_.cache_path)
                                : std::make_unique<ResponseCache>();
  }
}

void Gateway::set_transcript(std::shared_ptr<TranscriptWriter> writer,
                             std::string engine_label) {
  transcript_ = std::move(writer);
  engine_label_ = std::move(engine_label);
}

ChatRequest Gateway::make_request(std::vector<ChatMessage> messages) const {
  ChatRequest r;
  r.model_id = endpoint_.model_id;
  r.messages = std::move(messages);
  r.temperature = endpoint_.temperature;
  r.max_tokens = endpoint_.max_tokens;
  r.seed = endpoint_.seed;
  return r;
}

ChatResponse Gateway::chat(std::vector<ChatMessage> messages, std::string_view role) {
  return complete(make_request(std::move(messages)), role);
}

ChatResponse Gateway::send_with_retry(const ChatRequest& request) {
  for (int attempt = 0;; ++attempt) {
    try {
      slots_.acquire();
      struct Release {
        std::counting_semaphore<4096>& s;
        ~Release() { s.release(); }
      } release{slots_};
      ++backend_calls_;
      return backend_->send(request);
    } catch (const TransientError& e) {
      if (attempt >= config_.retry_limit) {
        throw TransportError("giving up after " + std::to_string(attempt + 1) +
                             " attempts: " + e.what());
      }
      std::chrono::milliseconds delay = config_.backoff_base * (1LL << std::min(attempt, 20));
      delay = std::min(delay, config_.backoff_max);
      if (delay.count() > 0) std::this_thread::sleep_for(delay);
    }
  }
}

ChatResponse Gateway::complete(const ChatRequest& request, std::string_view role) {
  validate(request);
  ++requests_;
  const std::string key = cache_key(request);

  if (cache_) {
    if (auto hit = cache_->lookup(key)) {
      ++cache_hits_;
      if (transcript_) transcript_->record(engine_label_, role, key, true, hit->content);
      return *hit;
    }
  }

  ChatResponse response;
  try {
    response = send_with_retry(request);
  } catch (...) {
    ++failures_;
    throw;
  }
  response.from_cache = false;
  if (cache_) cache_->store(key, response);
  if (transcript_) transcript_->record(engine_label_, role, key, false, response.content);
  return response;
}

GatewayStats Gateway::stats() const {
  return {requests_.load(), backend_calls_.load(), cache_hits_.load(), failures_.load()};
}

std::shared_ptr<ChatBackend> make_backend(const BackendConfig& config,
                                          std::shared_ptr<ChatBackend> mock) {
  validate(config);
  if (config.kind == BackendKind::http) return std::make_shared<HttpBackend>(config);
  if (!mock) throw ConfigError("mock backend selected but no mock script supplied");
  return mock;
}

}  // namespace tgp::gateway
