#include "tgp/cli/run_dir.hpp"

#include <chrono>
#include <fstream>
#include <iterator>
#include <sstream>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "tgp/error.hpp"

#ifndef TGP_VERSION
#define TGP_VERSION "0.0.0+unknown"
#endif

namespace tgp::cli {

using nlohmann::json;

json to_json(const RunManifest& m) {
  return {{"run_id", m.run_id},
          {"created_at", m.created_at},
          {"command", m.command},
          {"config_digest", m.config_digest},
          {"dataset_digests", m.dataset_digests},
          {"version", m.version}};
}

RunManifest manifest_from_json(const json& j) {
  try {
    RunManifest m;
    m.run_id = j.at("run_id").get<std::string>();
    m.created_at = j.at("created_at").get<std::string>();
    m.command = j.at("command").get<std::string>();
    m.config_digest = j.at("config_digest").get<std::string>();
    m.dataset_digests = j.at("dataset_digests").get<std::map<std::string, std::string>>();
    m.version = j.at("version").get<std::string>();
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  }
}

std::string artifact_version() { return TGP_VERSION; }

std::string utc_now() {
  const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", now);
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_text_file(const fs::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

json read_json_file(const fs::path& path) {
  const auto text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_json_file(const fs::path& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

void write_split_manifests(const fs::path& run_dir, const datasets::Splits& splits) {
  const auto dir = run_dir / files::kSplits;
  fs::create_directories(dir);
  auto write_ids = [&](const char* name, const std::vector<datasets::QAItem>& items) {
    std::string text;
    for (const auto& item : items) text += item.id + "\n";
    write_text_file(dir / name, text);
  };
  write_ids("train.txt", splits.train);
  write_ids("dev.txt", splits.dev);
  write_ids("test.txt", splits.test);
}

void write_graded(const fs::path& path, std::span<const extraction::GradedPrediction> graded) {
  std::string text;
  for (const auto& g : graded) {
    text += extraction::to_json(g).dump();
    text += '\n';
  }
  write_text_file(path, text);
}

std::vector<extraction::GradedPrediction> read_graded(const fs::path& path) {
  std::istringstream in(read_text_file(path));
  std::vector<extraction::GradedPrediction> out;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(extraction::graded_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ParseError(line_no, path.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace tgp::cli
