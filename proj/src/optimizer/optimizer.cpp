#include "tgp/optimizer/optimizer.hpp"

#include <span>

#include <fmt/format.h>

#include "tgp/error.hpp"
#include "tgp/optimizer/evaluate.hpp"
#include "tgp/rng.hpp"

namespace tgp::optimizer {

void validate(const OptimizerConfig& config, const datasets::Splits& splits) {
  if (config.seed_prompt.empty()) throw ConfigError("seed prompt is empty");
  if (config.batch_size == 0) throw ConfigError("batch_size must be positive");
  if (config.patience_n == 0) throw ConfigError("patience must be positive");
  if (config.max_iterations == 0) throw ConfigError("max_iterations must be positive");
  if (config.patience_n > config.max_iterations) {
    throw ConfigError(fmt::format("patience ({}) exceeds max_iterations ({})", config.patience_n,
                                  config.max_iterations));
  }
  if (config.batch_size > splits.train.size()) {
    throw ConfigError(fmt::format("batch_size ({}) exceeds the training split ({} items)",
                                  config.batch_size, splits.train.size()));
  }
  if (splits.dev.empty()) throw ConfigError("dev split is empty");
  if (config.dev_parallelism == 0 || config.batch_parallelism == 0) {
    throw ConfigError("parallelism must be positive");
  }
  if (config.seed_prompt.size() > config.max_prompt_chars) {
    throw ConfigError("seed prompt exceeds max_prompt_chars");
  }
}

BatchSchedule::BatchSchedule(std::size_t train_size, std::size_t batch_size, std::uint64_t seed,
                             std::size_t max_epochs)
    : train_size_(train_size), batch_size_(batch_size), seed_(seed), max_epochs_(max_epochs) {
  start_epoch();
}

void BatchSchedule::start_epoch() {
  order_ = permutation(train_size_, mix_seed(seed_, epoch_));
  cursor_ = 0;
}

std::optional<std::vector<std::size_t>> BatchSchedule::next() {
  if (train_size_ == 0) return std::nullopt;
  if (cursor_ >= order_.size()) {
    ++epoch_;
    if (max_epochs_ != 0 && epoch_ >= max_epochs_) return std::nullopt;
    start_epoch();
  }
  const std::size_t end = std::min(cursor_ + batch_size_, order_.size());
  std::vector<std::size_t> batch(order_.begin() + cursor_, order_.begin() + end);
  cursor_ = end;
  return batch;
}

namespace {

CallCounts snapshot(const textgrad::Engines& engines) {
  return {engines.task.stats().requests, engines.backward.stats().requests};
}

CallCounts delta(const CallCounts& after, const CallCounts& before) {
  return {after.task - before.task, after.backward - before.backward};
}

std::size_t trailing_rejects(const OptimizationTrace& trace) {
  std::size_t n = 0;
  for (auto it = trace.iterations.rbegin(); it != trace.iterations.rend() && !it->accepted; ++it) {
    ++n;
  }
  return n;
}

}  // namespace

OptimizationTrace run_optimization(const OptimizerConfig& config, const datasets::Splits& splits,
                                   textgrad::Engines engines, const datasets::TaskFormat& format,
                                   const extraction::ExtractionRule& rule, const RunHooks& hooks) {
  validate(config, splits);
  auto persist = [&](const OptimizationTrace& t) {
    if (hooks.persist) hooks.persist(t);
  };

  BatchSchedule schedule(splits.train.size(), config.batch_size, config.rng_seed,
                         config.max_epochs);
  OptimizationTrace trace;

  if (hooks.resume_from) {
    trace = *hooks.resume_from;
    if (trace.seed_prompt != config.seed_prompt) {
      throw ConfigError("resumed trace was started from a different seed prompt");
    }
    if (trace.finished()) return trace;
    // Replay the schedule so the next batch is the one an uninterrupted run
    // would draw.
    for (const auto& rec : trace.iterations) {
      auto batch = schedule.next();
      if (!batch || batch->size() != rec.batch_ids.size()) {
        throw ConfigError("resumed trace does not match the batch schedule");
      }
      for (std::size_t j = 0; j < batch->size(); ++j) {
        if (splits.train[(*batch)[j]].id != rec.batch_ids[j]) {
          throw ConfigError(fmt::format("resumed trace iteration {} used a different batch",
                                        rec.index));
        }
      }
    }
  } else {
    const auto before = snapshot(engines);
    const auto eval = evaluate_on_dev(config.seed_prompt, splits.dev, engines.task, format, rule,
                                      config.dev_parallelism, config.execution);
    trace.seed_prompt = config.seed_prompt;
    trace.seed_dev_accuracy = eval.accuracy;
    trace.seed_call_counts = delta(snapshot(engines), before);
    trace.best_prompt = config.seed_prompt;
    trace.best_dev_accuracy = eval.accuracy;
    persist(trace);
  }

  std::size_t rejects = trailing_rejects(trace);
  while (true) {
    if (rejects >= config.patience_n) {
      trace.stop_reason = StopReason::patience_exhausted;
      break;
    }
    if (trace.iterations.size() >= config.max_iterations) {
      trace.stop_reason = StopReason::max_iterations;
      break;
    }
    if (hooks.stop_after && trace.iterations.size() >= *hooks.stop_after) return trace;
    auto batch_idx = schedule.next();
    if (!batch_idx) {
      trace.stop_reason = StopReason::train_exhausted;
      break;
    }

    std::vector<datasets::QAItem> batch;
    IterationRecord rec;
    rec.index = trace.iterations.size() + 1;
    for (auto i : *batch_idx) {
      batch.push_back(splits.train[i]);
      rec.batch_ids.push_back(splits.train[i].id);
    }

    const auto before = snapshot(engines);
    textgrad::PromptVariable prompt{trace.best_prompt, true, {}, {}};
    auto result = textgrad::backward_batch(batch, prompt, engines, format,
                                           config.batch_parallelism, config.execution);
    rec.item_failures = std::move(result.failures);

    std::optional<std::string> candidate;
    try {
      candidate = textgrad::tgd_step(prompt, engines.backward, config.max_prompt_chars);
    } catch (const PromptTooLong&) {
      rec.rejected_reason = "candidate_too_long";
    } catch (const FormatError&) {
      rec.rejected_reason = "empty_candidate";
    }

    if (candidate) {
      rec.candidate_prompt = *candidate;
      const auto eval = evaluate_on_dev(*candidate, splits.dev, engines.task, format, rule,
                                        config.dev_parallelism, config.execution);
      rec.dev_accuracy = eval.accuracy;
      for (const auto& id : eval.failed_items) {
        rec.item_failures.push_back({id, std::string(textgrad::roles::kDevEval),
                                     "task call failed; graded incorrect"});
      }
      rec.accepted = eval.accuracy > trace.best_dev_accuracy;
    }
    if (rec.accepted) {
      trace.best_prompt = rec.candidate_prompt;
      trace.best_dev_accuracy = rec.dev_accuracy;
      rejects = 0;
    } else {
      ++rejects;
    }
    rec.best_accuracy_after = trace.best_dev_accuracy;
    rec.engine_call_counts = delta(snapshot(engines), before);
    trace.iterations.push_back(std::move(rec));
    persist(trace);
  }

  persist(trace);
  return trace;
}

}  // namespace tgp::optimizer
