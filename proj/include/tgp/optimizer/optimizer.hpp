#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tgp/datasets/splits.hpp"
#include "tgp/extraction/grading.hpp"
#include "tgp/optimizer/trace.hpp"
#include "tgp/parallel.hpp"
#include "tgp/strategies/strategies.hpp"
#include "tgp/textgrad/graph.hpp"

namespace tgp::optimizer {

struct OptimizerConfig {
  std::string seed_prompt{strategies::kDefaultSeedPrompt};
  std::size_t batch_size = 4;
  std::size_t patience_n = 3;
  std::size_t max_iterations = 20;
  std::size_t dev_parallelism = 8;
  std::size_t batch_parallelism = 4;
  std::uint64_t rng_seed = 0;
  std::size_t max_prompt_chars = 2000;
  /// Passes over the training split before stopping with train_exhausted;
  /// 0 means reshuffle forever.
  std::size_t max_epochs = 0;
  Execution execution = Execution::parallel;
};

/// Throws ConfigError when the config cannot drive a run over `splits`.
void validate(const OptimizerConfig& config, const datasets::Splits& splits);

/// Seed-shuffled pass over train indices, without replacement inside an
/// epoch; each epoch uses its own permutation. The last batch of an epoch may
/// be short.
class BatchSchedule {
 public:
  BatchSchedule(std::size_t train_size, std::size_t batch_size, std::uint64_t seed,
                std::size_t max_epochs = 0);

  /// Next batch of train indices, or nullopt once max_epochs are used up.
  std::optional<std::vector<std::size_t>> next();

 private:
  void start_epoch();

  std::size_t train_size_;
  std::size_t batch_size_;
  std::uint64_t seed_;
  std::size_t max_epochs_;
  std::size_t epoch_ = 0;
  std::size_t cursor_ = 0;
  std::vector<std::size_t> order_;
};

struct RunHooks {
  /// Called after the seed evaluation and after every iteration.
  std::function<void(const OptimizationTrace&)> persist;
  /// Continue this partial (or finished) trace instead of starting fresh.
  std::optional<OptimizationTrace> resume_from;
  /// Return an unfinished trace once this many iterations exist.
  std::optional<std::size_t> stop_after;
};

/// Scores the seed prompt on dev, then repeats: backward pass over the next
/// batch from the best prompt so far, one rewrite, dev evaluation of the
/// candidate, accept only on strict improvement. Stops on patience, the
/// iteration cap, or an exhausted training split.
OptimizationTrace run_optimization(const OptimizerConfig& config, const datasets::Splits& splits,
                                   textgrad::Engines engines, const datasets::TaskFormat& format,
                                   const extraction::ExtractionRule& rule,
                                   const RunHooks& hooks = {});

}  // namespace tgp::optimizer
