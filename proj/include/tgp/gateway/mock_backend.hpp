#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tgp/gateway/backend.hpp"

namespace tgp::gateway {

/// Deterministic scripted backend for offline runs and tests.
///
/// Rules are tried in registration order against the flattened request text
/// (all message contents joined by newlines); a rule matches when every one of
/// its substrings occurs. The catch-all, if any, is tried last. Response
/// templates may contain `{{random:a|b|c}}`, replaced by one alternative
/// chosen from the mock seed and the request digest, so the same request
/// always gets the same answer regardless of call order.
class MockBackend : public ChatBackend {
 public:
  using Responder = std::function<std::string(const ChatRequest&)>;

  struct Call {
    std::string digest;
    ChatRequest request;
    std::string response;
  };

  explicit MockBackend(std::uint64_t seed = 0) : seed_(seed) {}

  MockBackend& on(std::string substring, std::string response_template);
  MockBackend& on_all(std::vector<std::string> substrings,
                      std::string response_template);
  MockBackend& on(std::vector<std::string> substrings, Responder responder);
  /// Throws ConfigError if a catch-all is already registered.
  MockBackend& otherwise(std::string response_template);
  MockBackend& otherwise(Responder responder);

  /// Every call after the first `n` successful ones throws Interrupted.
  void abort_after(std::size_t n) { abort_after_ = n; }
  /// Sleeps this long inside every call (benchmarks).
  void set_latency(std::chrono::microseconds latency) { latency_ = latency; }

  ChatResponse send(const ChatRequest& request) override;

  std::vector<Call> calls() const;
  std::size_t call_count() const;
  void clear_calls();

 private:
  struct Rule {
    std::vector<std::string> substrings;
    Responder responder;
  };

  Responder template_responder(std::string tmpl) const;

  std::uint64_t seed_;
  std::vector<Rule> rules_;
  std::optional<Responder> catch_all_;
  std::optional<std::size_t> abort_after_;
  std::chrono::microseconds latency_{0};

  mutable std::mutex mu_;
  std::vector<Call> log_;
};

/// Builds a mock from a script. A script is either an object mapping
/// substring -> template ("*" is the catch-all; key order is registration
/// order), or an array of {"contains": string | [strings], "response":
/// template} / {"default": template} entries. Throws ConfigError.
std::shared_ptr<MockBackend> mock_register(const nlohmann::ordered_json& script,
                                           std::uint64_t seed = 0);

/// Applies a script to an existing mock.
void apply_script(MockBackend& mock, const nlohmann::ordered_json& script);

/// Expands `{{random:a|b|c}}` placeholders using `seed` and `digest`.
std::string render_template(const std::string& tmpl, std::uint64_t seed,
                            const std::string& digest);

}  // namespace tgp::gateway
