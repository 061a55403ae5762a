#include "tgp/cli/config.hpp"

#include <fstream>
#include <set>

#include "tgp/error.hpp"

namespace tgp::cli {
namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::string_view section, const std::set<std::string>& known) {
  if (!j.is_object()) throw ConfigError(std::string(section) + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) {
      throw ConfigError("unknown config key '" + std::string(section) + "." + key + "'");
    }
  }
}

template <class T>
void read(const json& j, const char* key, T& out, std::string_view section) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + std::string(section) + "." + key + "' has the wrong type");
  }
}

gateway::BackendKind backend_from_string(const std::string& s) {
  if (s == "http") return gateway::BackendKind::http;
  if (s == "mock") return gateway::BackendKind::mock;
  throw ConfigError("unknown backend '" + s + "' (expected http or mock)");
}

std::string to_string(gateway::BackendKind kind) {
  return kind == gateway::BackendKind::http ? "http" : "mock";
}

void merge_engine(EngineSettings& e, const json& j, std::string_view section) {
  reject_unknown(j, section,
                 {"backend", "model", "base_url", "api_key_env", "temperature", "max_tokens",
                  "seed", "retry_limit", "timeout_ms", "backoff_ms", "backoff_max_ms",
                  "parallelism", "cache"});
  if (j.contains("backend")) {
    std::string kind;
    read(j, "backend", kind, section);
    e.backend.kind = backend_from_string(kind);
  }
  read(j, "model", e.endpoint.model_id, section);
  if (j.contains("base_url")) {
    if (j["base_url"].is_null()) {
      e.backend.base_url.reset();
    } else {
      std::string url;
      read(j, "base_url", url, section);
      e.backend.base_url = url;
    }
  }
  read(j, "api_key_env", e.backend.api_key_env, section);
  read(j, "temperature", e.endpoint.temperature, section);
  read(j, "max_tokens", e.endpoint.max_tokens, section);
  if (j.contains("seed")) {
    if (j["seed"].is_null()) {
      e.endpoint.seed.reset();
    } else {
      std::int64_t s = 0;
      read(j, "seed", s, section);
      e.endpoint.seed = s;
    }
  }
  read(j, "retry_limit", e.backend.retry_limit, section);
  std::int64_t ms = 0;
  if (j.contains("timeout_ms")) {
    read(j, "timeout_ms", ms, section);
    e.backend.request_timeout = std::chrono::milliseconds(ms);
  }
  if (j.contains("backoff_ms")) {
    read(j, "backoff_ms", ms, section);
    e.backend.backoff_base = std::chrono::milliseconds(ms);
  }
  if (j.contains("backoff_max_ms")) {
    read(j, "backoff_max_ms", ms, section);
    e.backend.backoff_max = std::chrono::milliseconds(ms);
  }
  read(j, "parallelism", e.endpoint.parallelism, section);
  read(j, "cache", e.cache, section);
}

json engine_json(const EngineSettings& e) {
  return {{"backend", to_string(e.backend.kind)},
          {"model", e.endpoint.model_id},
          {"base_url", e.backend.base_url ? json(*e.backend.base_url) : json(nullptr)},
          {"api_key_env", e.backend.api_key_env},
          {"temperature", e.endpoint.temperature},
          {"max_tokens", e.endpoint.max_tokens},
          {"seed", e.endpoint.seed ? json(*e.endpoint.seed) : json(nullptr)},
          {"retry_limit", e.backend.retry_limit},
          {"timeout_ms", e.backend.request_timeout.count()},
          {"backoff_ms", e.backend.backoff_base.count()},
          {"backoff_max_ms", e.backend.backoff_max.count()},
          {"parallelism", e.endpoint.parallelism},
          {"cache", e.cache}};
}

}  // namespace

RunConfig default_config() {
  RunConfig c;
  c.task.endpoint = gateway::EndpointConfig::task_defaults("llama-3-70b-instruct");
  c.task.backend.kind = gateway::BackendKind::http;
  c.task.backend.api_key_env = "TASK_API_KEY";
  c.backward.endpoint = gateway::EndpointConfig::backward_defaults("gpt-4o");
  c.backward.backend.kind = gateway::BackendKind::http;
  c.backward.backend.base_url = "https://api.openai.com/v1";
  c.backward.backend.api_key_env = "OPENAI_API_KEY";
  c.split.dev_size = 50;
  c.split.test_size = 500;
  c.strategy.k = 5;
  return c;
}

void merge(RunConfig& c, const nlohmann::json& j) {
  reject_unknown(j, "config",
                 {"task", "backward", "optimizer", "split", "format", "strategy", "mock_script"});
  if (j.contains("task")) merge_engine(c.task, j["task"], "task");
  if (j.contains("backward")) merge_engine(c.backward, j["backward"], "backward");

  if (j.contains("optimizer")) {
    const auto& o = j["optimizer"];
    reject_unknown(o, "optimizer",
                   {"seed_prompt", "batch_size", "patience", "max_iterations", "dev_parallelism",
                    "batch_parallelism", "rng_seed", "max_prompt_chars", "max_epochs"});
    auto& oc = c.optimizer;
    read(o, "seed_prompt", oc.seed_prompt, "optimizer");
    read(o, "batch_size", oc.batch_size, "optimizer");
    read(o, "patience", oc.patience_n, "optimizer");
    read(o, "max_iterations", oc.max_iterations, "optimizer");
    read(o, "dev_parallelism", oc.dev_parallelism, "optimizer");
    read(o, "batch_parallelism", oc.batch_parallelism, "optimizer");
    read(o, "rng_seed", oc.rng_seed, "optimizer");
    read(o, "max_prompt_chars", oc.max_prompt_chars, "optimizer");
    read(o, "max_epochs", oc.max_epochs, "optimizer");
  }

  if (j.contains("split")) {
    const auto& s = j["split"];
    reject_unknown(s, "split", {"dev_size", "test_size", "seed"});
    read(s, "dev_size", c.split.dev_size, "split");
    if (s.contains("test_size")) {
      if (s["test_size"].is_null()) {
        c.split.test_size.reset();
      } else {
        std::size_t n = 0;
        read(s, "test_size", n, "split");
        c.split.test_size = n;
      }
    }
    read(s, "seed", c.split.seed, "split");
  }

  if (j.contains("format")) {
    const auto& f = j["format"];
    if (f.is_string()) {
      c.format = datasets::format_from_string(f.get<std::string>());
    } else {
      reject_unknown(f, "format", {"kind", "alphabet", "requires_context"});
      std::string kind = std::string(datasets::to_string(c.format.kind));
      read(f, "kind", kind, "format");
      auto fmt = datasets::format_from_string(kind);
      read(f, "alphabet", fmt.option_alphabet, "format");
      read(f, "requires_context", fmt.requires_context, "format");
      if (fmt.is_mc() && fmt.option_alphabet.empty()) {
        throw ConfigError("format.alphabet must be non-empty for mc");
      }
      c.format = fmt;
    }
  }

  if (j.contains("strategy")) {
    const auto& s = j["strategy"];
    reject_unknown(s, "strategy", {"kind", "k", "seed"});
    if (s.contains("kind")) {
      std::string kind;
      read(s, "kind", kind, "strategy");
      c.strategy.kind = strategies::strategy_from_string(kind);
    }
    if (s.contains("k") && s["k"].is_null()) {
      c.strategy.k.reset();
    } else if (s.contains("k")) {
      std::size_t k = 0;
      read(s, "k", k, "strategy");
      c.strategy.k = k;
    }
    read(s, "seed", c.strategy.rng_seed, "strategy");
  }

  if (j.contains("mock_script")) {
    if (j["mock_script"].is_null()) {
      c.mock_script.reset();
    } else {
      std::string p;
      read(j, "mock_script", p, "config");
      c.mock_script = p;
    }
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  RunConfig c = default_config();
  merge(c, j);
  if (c.mock_script && c.mock_script->is_relative()) {
    c.mock_script = path.parent_path() / *c.mock_script;
  }
  return c;
}

nlohmann::json to_json(const RunConfig& c) {
  const auto& o = c.optimizer;
  return {
      {"task", engine_json(c.task)},
      {"backward", engine_json(c.backward)},
      {"optimizer",
       {{"seed_prompt", o.seed_prompt},
        {"batch_size", o.batch_size},
        {"patience", o.patience_n},
        {"max_iterations", o.max_iterations},
        {"dev_parallelism", o.dev_parallelism},
        {"batch_parallelism", o.batch_parallelism},
        {"rng_seed", o.rng_seed},
        {"max_prompt_chars", o.max_prompt_chars},
        {"max_epochs", o.max_epochs}}},
      {"split",
       {{"dev_size", c.split.dev_size},
        {"test_size", c.split.test_size ? json(*c.split.test_size) : json(nullptr)},
        {"seed", c.split.seed}}},
      {"format",
       {{"kind", datasets::to_string(c.format.kind)},
        {"alphabet", c.format.option_alphabet},
        {"requires_context", c.format.requires_context}}},
      {"strategy",
       {{"kind", strategies::to_string(c.strategy.kind)},
        {"k", c.strategy.k ? json(*c.strategy.k) : json(nullptr)},
        {"seed", c.strategy.rng_seed}}},
      {"mock_script", c.mock_script ? json(c.mock_script->string()) : json(nullptr)},
  };
}

}  // namespace tgp::cli
