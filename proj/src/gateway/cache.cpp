#include "tgp/gateway/cache.hpp"

#include "tgp/error.hpp"

namespace tgp::gateway {

ResponseCache::ResponseCache(std::filesystem::path path) : path_(std::move(path)) {
  if (path_->has_parent_path()) std::filesystem::create_directories(path_->parent_path());
  if (std::ifstream in(*path_); in) {
    for (std::string line; std::getline(in, line);) {
      if (line.empty()) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        entries_.try_emplace(j.at("key").get<std::string>(),
                             response_from_json(j.at("response")));
      } catch (const nlohmann::json::exception&) {
        // torn record from an interrupted append
      }
    }
  }
  bool needs_newline = false;
  if (std::ifstream tail(*path_, std::ios::binary | std::ios::ate); tail && tail.tellg() > 0) {
    tail.seekg(-1, std::ios::end);
    needs_newline = tail.get() != '\n';
  }
  out_.open(*path_, std::ios::app);
  if (!out_) throw IoError("cannot open cache file " + path_->string());
  if (needs_newline) out_ << '\n';
}

std::optional<ChatResponse> ResponseCache::lookup(const std::string& key) const {
  std::shared_lock lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  ChatResponse r = it->second;
  r.from_cache = true;
  return r;
}

void ResponseCache::store(const std::string& key, const ChatResponse& response) {
  std::unique_lock lock(mu_);
  auto [it, inserted] = entries_.try_emplace(key, response);
  if (!inserted) return;
  it->second.from_cache = false;
  if (out_.is_open()) {
    out_ << nlohmann::json{{"key", key}, {"response", to_json(response)}}.dump() << '\n';
    out_.flush();
  }
}

std::size_t ResponseCache::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

}  // namespace tgp::gateway
