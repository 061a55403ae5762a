#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tgp/textgrad/graph.hpp"

namespace tgp::optimizer {

/// Logical engine requests (cache hits included), so counts do not depend on
/// what an earlier run left in the cache.
struct CallCounts {
  std::uint64_t task = 0;
  std::uint64_t backward = 0;

  bool operator==(const CallCounts&) const = default;
};

struct IterationRecord {
  std::size_t index = 0;  // 1-based
  std::vector<std::string> batch_ids;
  std::string candidate_prompt;
  double dev_accuracy = 0.0;
  bool accepted = false;
  double best_accuracy_after = 0.0;
  CallCounts engine_call_counts;
  std::vector<textgrad::ItemFailure> item_failures;
  /// Set when the step produced an unusable candidate (too long, empty);
  /// such a candidate is never evaluated and dev_accuracy stays 0.
  std::optional<std::string> rejected_reason;
};

enum class StopReason { patience_exhausted, max_iterations, train_exhausted };

std::string_view to_string(StopReason reason);
StopReason stop_reason_from_string(std::string_view s);

struct OptimizationTrace {
  std::string seed_prompt;
  double seed_dev_accuracy = 0.0;
  CallCounts seed_call_counts;
  std::vector<IterationRecord> iterations;
  std::string best_prompt;
  double best_dev_accuracy = 0.0;
  std::optional<StopReason> stop_reason;  // absent while the run is in progress

  bool finished() const { return stop_reason.has_value(); }
};

/// Line-delimited form: a "seed" record, one "iteration" record per
/// iteration, and a "result" record once finished. No timestamps, so equal
/// traces serialize to equal bytes.
std::string to_jsonl(const OptimizationTrace& trace);
OptimizationTrace trace_from_jsonl(std::string_view text);

/// Writes via a temporary file and rename, so readers never see a torn trace.
void save_trace(const std::filesystem::path& path, const OptimizationTrace& trace);
OptimizationTrace load_trace(const std::filesystem::path& path);

}  // namespace tgp::optimizer
