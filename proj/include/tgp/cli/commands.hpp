#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tgp/cli/config.hpp"

namespace tgp::cli {

/// Parsed command-line options shared by all subcommands. Unset optionals
/// leave the config file (or default) value in place.
struct CommandOptions {
  std::optional<std::filesystem::path> config;
  /// One file: a single pool split into train/dev/test. Two files: train
  /// then test; dev is carved out of train.
  std::vector<std::filesystem::path> datasets;
  std::optional<std::string> format;
  std::optional<std::string> strategy;
  std::optional<std::size_t> k;
  /// Applies to the split, the batch schedule and few-shot sampling.
  std::optional<std::uint64_t> seed;
  std::filesystem::path out;
  bool resume = false;
  std::optional<std::string> backend;
  std::optional<std::filesystem::path> mock_script;
  std::optional<std::filesystem::path> prompt_file;   // evaluate
  std::optional<std::size_t> stop_after;              // optimize; testing aid
  std::vector<std::filesystem::path> run_dirs;        // report
};

/// Config file (or defaults) with the flag overrides applied.
RunConfig resolve_config(const CommandOptions& opts);

int cmd_optimize(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_baseline(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_evaluate(const CommandOptions& opts, std::ostream& out, std::ostream& err);
/// Text table on `out`; CSV written to opts.out when set.
int cmd_report(const CommandOptions& opts, std::ostream& out, std::ostream& err);

/// Dispatches by name and maps tgp::Error to its exit status with a
/// "<category> error: ..." line on `err`.
int run_command(std::string_view name, const CommandOptions& opts, std::ostream& out,
                std::ostream& err);

}  // namespace tgp::cli
