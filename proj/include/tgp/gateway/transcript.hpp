#pragma once

#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <string_view>

namespace tgp::gateway {

/// Append-only JSONL audit log, one record per engine call:
/// {"timestamp", "engine", "role", "digest", "from_cache", "response"}.
class TranscriptWriter {
 public:
  explicit TranscriptWriter(const std::filesystem::path& path);

  void record(std::string_view engine, std::string_view role,
              std::string_view digest, bool from_cache, std::string_view response);

 private:
  std::mutex mu_;
  std::ofstream out_;
};

}  // namespace tgp::gateway
