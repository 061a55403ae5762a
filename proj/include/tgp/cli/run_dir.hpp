#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tgp/datasets/splits.hpp"
#include "tgp/extraction/grading.hpp"

namespace tgp::cli {

namespace fs = std::filesystem;

/// File names inside a run directory.
namespace files {
inline constexpr const char* kManifest = "manifest.json";
inline constexpr const char* kConfig = "config.json";
inline constexpr const char* kSplits = "splits";
inline constexpr const char* kTrace = "trace.jsonl";
inline constexpr const char* kBestPrompt = "best_prompt.txt";
inline constexpr const char* kTranscripts = "transcripts.jsonl";
inline constexpr const char* kTaskCache = "cache_task.jsonl";
inline constexpr const char* kBackwardCache = "cache_backward.jsonl";
inline constexpr const char* kGraded = "graded.jsonl";
inline constexpr const char* kReport = "report.json";
}  // namespace files

struct RunManifest {
  std::string run_id;
  std::string created_at;
  std::string command;
  std::string config_digest;
  std::map<std::string, std::string> dataset_digests;  // file name -> sha256
  std::string version;
};

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

/// Build version string, "<semver>+<git rev>".
std::string artifact_version();

/// UTC, ISO 8601, second precision.
std::string utc_now();

nlohmann::json read_json_file(const fs::path& path);
/// Pretty-printed, trailing newline, written through a temporary file.
void write_json_file(const fs::path& path, const nlohmann::json& j);
void write_text_file(const fs::path& path, const std::string& text);
std::string read_text_file(const fs::path& path);

/// splits/{train,dev,test}.txt, one id per line.
void write_split_manifests(const fs::path& run_dir, const datasets::Splits& splits);

void write_graded(const fs::path& path, std::span<const extraction::GradedPrediction> graded);
std::vector<extraction::GradedPrediction> read_graded(const fs::path& path);

}  // namespace tgp::cli
