#include "tgp/gateway/transcript.hpp"

#include <chrono>

#include <fmt/chrono.h>
#include <json.hpp>

#include "tgp/error.hpp"

namespace tgp::gateway {

TranscriptWriter::TranscriptWriter(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::app);
  if (!out_) throw IoError("cannot open transcript " + path.string());
}

void TranscriptWriter::record(std::string_view engine, std::string_view role,
                              std::string_view digest, bool from_cache,
                              std::string_view response) {
  const auto now = std::chrono::time_point_cast<std::chrono::milliseconds>(
      std::chrono::system_clock::now());
  nlohmann::json j = {
      {"timestamp", fmt::format("{:%Y-%m-%dT%H:%M:%S}Z", now)},
      {"engine", engine},
      {"role", role},
      {"digest", digest},
      {"from_cache", from_cache},
      {"response", response},
  };
  std::lock_guard lock(mu_);
  out_ << j.dump() << '\n';
  out_.flush();
}

}  // namespace tgp::gateway
