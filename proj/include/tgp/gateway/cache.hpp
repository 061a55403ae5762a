#pragma once

#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "tgp/gateway/chat.hpp"

namespace tgp::gateway {

/// Response cache keyed by request digest. With a path, entries are loaded
/// on construction and every store appends one JSON line
/// `{"key": <hex digest>, "response": <ChatResponse>}`. A torn trailing line
/// (interrupted write) is ignored on load. Reads may run concurrently;
/// writes are serialized.
class ResponseCache {
 public:
  ResponseCache() = default;
  explicit ResponseCache(std::filesystem::path path);

  std::optional<ChatResponse> lookup(const std::string& key) const;
  void store(const std::string& key, const ChatResponse& response);

  std::size_t size() const;
  const std::optional<std::filesystem::path>& path() const { return path_; }

 private:
  std::optional<std::filesystem::path> path_;
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, ChatResponse> entries_;
  std::ofstream out_;
};

}  // namespace tgp::gateway
