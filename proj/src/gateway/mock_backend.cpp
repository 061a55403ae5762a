#include "tgp/gateway/mock_backend.hpp"

#include <sstream>
#include <thread>

#include "tgp/digest.hpp"
#include "tgp/error.hpp"
#include "tgp/rng.hpp"

namespace tgp::gateway {
namespace {

std::int64_t word_count(std::string_view s) {
  std::int64_t n = 0;
  bool in_word = false;
  for (char c : s) {
    const bool space = c == ' ' || c == '\n' || c == '\t' || c == '\r';
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

}  // namespace

std::string render_template(const std::string& tmpl, std::uint64_t seed,
                            const std::string& digest) {
  static constexpr std::string_view kOpen = "{{random:";
  std::string out;
  std::size_t pos = 0;
  std::uint64_t salt = 0;
  while (true) {
    const auto start = tmpl.find(kOpen, pos);
    if (start == std::string::npos) break;
    const auto end = tmpl.find("}}", start);
    if (end == std::string::npos) break;
    out.append(tmpl, pos, start - pos);

    std::vector<std::string> choices;
    std::stringstream body(tmpl.substr(start + kOpen.size(), end - start - kOpen.size()));
    for (std::string c; std::getline(body, c, '|');) choices.push_back(c);
    if (!choices.empty()) {
      SplitMix64 rng(mix_seed(seed ^ digest64(digest), salt++));
      out += choices[rng.bounded(choices.size())];
    }
    pos = end + 2;
  }
  out.append(tmpl, pos, std::string::npos);
  return out;
}

MockBackend& MockBackend::on(std::string substring, std::string response_template) {
  return on_all({std::move(substring)}, std::move(response_template));
}

MockBackend& MockBackend::on_all(std::vector<std::string> substrings,
                                 std::string response_template) {
  return on(std::move(substrings), template_responder(std::move(response_template)));
}

MockBackend& MockBackend::on(std::vector<std::string> substrings, Responder responder) {
  rules_.push_back({std::move(substrings), std::move(responder)});
  return *this;
}

MockBackend& MockBackend::otherwise(std::string response_template) {
  return otherwise(template_responder(std::move(response_template)));
}

MockBackend& MockBackend::otherwise(Responder responder) {
  if (catch_all_) throw ConfigError("mock script has more than one catch-all");
  catch_all_ = std::move(responder);
  return *this;
}

MockBackend::Responder MockBackend::template_responder(std::string tmpl) const {
  return [seed = seed_, tmpl = std::move(tmpl)](const ChatRequest& r) {
    if (tmpl.find("{{random:") == std::string::npos) return tmpl;
    return render_template(tmpl, seed, cache_key(r));
  };
}

ChatResponse MockBackend::send(const ChatRequest& request) {
  if (abort_after_) {
    std::lock_guard lock(mu_);
    if (log_.size() >= *abort_after_) {
      throw Interrupted("mock backend aborted after " + std::to_string(*abort_after_) +
                        " calls");
    }
  }
  if (latency_.count() > 0) std::this_thread::sleep_for(latency_);

  const std::string text = flatten(request);
  const Responder* chosen = nullptr;
  for (const auto& rule : rules_) {
    bool all = true;
    for (const auto& s : rule.substrings) {
      if (text.find(s) == std::string::npos) {
        all = false;
        break;
      }
    }
    if (all) {
      chosen = &rule.responder;
      break;
    }
  }
  if (chosen == nullptr && catch_all_) chosen = &*catch_all_;
  if (chosen == nullptr) {
    throw ProtocolError("mock backend has no rule matching the request");
  }

  ChatResponse response;
  response.content = (*chosen)(request);
  response.model_id = request.model_id;
  response.usage.prompt = word_count(text);
  response.usage.completion = word_count(response.content);

  std::lock_guard lock(mu_);
  log_.push_back({cache_key(request), request, response.content});
  return response;
}

std::vector<MockBackend::Call> MockBackend::calls() const {
  std::lock_guard lock(mu_);
  return log_;
}

std::size_t MockBackend::call_count() const {
  std::lock_guard lock(mu_);
  return log_.size();
}

void MockBackend::clear_calls() {
  std::lock_guard lock(mu_);
  log_.clear();
}

void apply_script(MockBackend& mock, const nlohmann::ordered_json& script) {
  if (script.is_object()) {
    for (const auto& [key, value] : script.items()) {
      if (!value.is_string()) throw ConfigError("mock template for '" + key + "' is not a string");
      if (key == "*") {
        mock.otherwise(value.get<std::string>());
      } else {
        mock.on(key, value.get<std::string>());
      }
    }
    return;
  }
  if (!script.is_array()) throw ConfigError("mock script must be an object or array");
  for (const auto& rule : script) {
    if (!rule.is_object()) throw ConfigError("mock rule must be an object");
    if (rule.contains("default")) {
      mock.otherwise(rule.at("default").get<std::string>());
      continue;
    }
    if (!rule.contains("contains") || !rule.contains("response")) {
      throw ConfigError("mock rule needs 'contains' and 'response' (or 'default')");
    }
    std::vector<std::string> subs;
    const auto& c = rule.at("contains");
    if (c.is_string()) {
      subs.push_back(c.get<std::string>());
    } else if (c.is_array()) {
      for (const auto& s : c) subs.push_back(s.get<std::string>());
    } else {
      throw ConfigError("mock rule 'contains' must be a string or array of strings");
    }
    mock.on_all(std::move(subs), rule.at("response").get<std::string>());
  }
}

std::shared_ptr<MockBackend> mock_register(const nlohmann::ordered_json& script,
                                           std::uint64_t seed) {
  auto mock = std::make_shared<MockBackend>(seed);
  apply_script(*mock, script);
  return mock;
}

}  // namespace tgp::gateway
