#include "tgp/cli/commands.hpp"

#include <ostream>
#include <random>

#include <fmt/format.h>

#include "tgp/cli/run_dir.hpp"
#include "tgp/datasets/jsonl.hpp"
#include "tgp/digest.hpp"
#include "tgp/error.hpp"
#include "tgp/gateway/mock_backend.hpp"
#include "tgp/optimizer/evaluate.hpp"
#include "tgp/optimizer/optimizer.hpp"
#include "tgp/optimizer/trace.hpp"

namespace tgp::cli {
namespace {

using nlohmann::json;
using datasets::QAItem;

constexpr std::string_view kTestEvalRole = "test_eval";

struct LoadedData {
  datasets::Splits splits;
  std::map<std::string, std::string> digests;
  std::string label;  // dataset name shown in reports
};

LoadedData load_data(const CommandOptions& opts, const RunConfig& cfg) {
  if (opts.datasets.empty()) throw ConfigError("no --dataset given");
  if (opts.datasets.size() > 2) throw ConfigError("at most two --dataset files (train, test)");

  LoadedData data;
  auto spec = cfg.split;
  if (opts.datasets.size() == 1) {
    const auto& path = opts.datasets.front();
    auto items = datasets::load_jsonl(path, cfg.format);
    data.digests["pool"] = sha256_file_hex(path);
    data.label = path.stem().string();
    spec.protocol = datasets::SplitSpec::Protocol::dev_test_rest_train;
    data.splits = datasets::make_splits(items, spec);
  } else {
    datasets::PreSplit pre;
    pre.train = datasets::load_jsonl(opts.datasets[0], cfg.format);
    pre.test = datasets::load_jsonl(opts.datasets[1], cfg.format);
    data.digests["train"] = sha256_file_hex(opts.datasets[0]);
    data.digests["test"] = sha256_file_hex(opts.datasets[1]);
    data.label = opts.datasets[1].stem().string();
    spec.protocol = datasets::SplitSpec::Protocol::dev_from_train;
    data.splits = datasets::make_splits(pre, spec);
  }
  return data;
}

// Mock script file: {"seed": n, "task": <rules>, "backward": <rules>} where
// <rules> is anything mock_register accepts, or {"rules": ..., "abort_after": n}.
struct MockScript {
  nlohmann::ordered_json doc;
  std::string digest;
};

MockScript load_mock_script(const fs::path& path) {
  MockScript s;
  const auto text = read_text_file(path);
  try {
    s.doc = nlohmann::ordered_json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("mock script " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!s.doc.is_object()) throw ConfigError("mock script must be a JSON object");
  s.digest = sha256_hex(text);
  return s;
}

std::shared_ptr<gateway::ChatBackend> make_mock(const MockScript& script, const char* engine) {
  if (!script.doc.contains(engine)) {
    throw ConfigError(fmt::format("mock script has no '{}' section", engine));
  }
  const auto& section = script.doc[engine];
  const std::uint64_t seed = script.doc.value("seed", std::uint64_t{0});
  const bool structured = section.is_object() && section.contains("rules");
  auto mock = gateway::mock_register(structured ? section["rules"] : section, seed);
  if (structured && section.contains("abort_after")) {
    mock->abort_after(section["abort_after"].get<std::size_t>());
  }
  return mock;
}

struct EngineSet {
  std::unique_ptr<gateway::Gateway> task;
  std::unique_ptr<gateway::Gateway> backward;
};

std::unique_ptr<gateway::Gateway> make_gateway(const EngineSettings& settings, const char* name,
                                               const fs::path& cache_file,
                                               const std::optional<MockScript>& script,
                                               const std::shared_ptr<gateway::TranscriptWriter>& log) {
  auto backend_cfg = settings.backend;
  if (settings.cache) backend_cfg.cache_path = cache_file;
  std::shared_ptr<gateway::ChatBackend> mock;
  if (backend_cfg.kind == gateway::BackendKind::mock) {
    if (!script) throw ConfigError("mock backend needs --mock-script (or mock_script in config)");
    mock = make_mock(*script, name);
  }
  auto gw = std::make_unique<gateway::Gateway>(gateway::make_backend(backend_cfg, mock),
                                               backend_cfg, settings.endpoint, settings.cache);
  gw->set_transcript(log, name);
  return gw;
}

EngineSet make_engines(const RunConfig& cfg, const fs::path& run_dir, bool need_backward) {
  std::optional<MockScript> script;
  if (cfg.mock_script) script = load_mock_script(*cfg.mock_script);
  auto log = std::make_shared<gateway::TranscriptWriter>(run_dir / files::kTranscripts);
  EngineSet e;
  e.task = make_gateway(cfg.task, "task", run_dir / files::kTaskCache, script, log);
  if (need_backward) {
    e.backward =
        make_gateway(cfg.backward, "backward", run_dir / files::kBackwardCache, script, log);
  }
  return e;
}

std::string config_digest(const RunConfig& cfg) {
  std::string material = to_json(cfg).dump();
  if (cfg.mock_script) material += "\n" + sha256_file_hex(*cfg.mock_script);
  return sha256_hex(material);
}

std::string new_run_id(const std::string& seed_material) {
  std::random_device rd;
  return sha256_hex(fmt::format("{}|{}|{}", utc_now(), seed_material, rd())).substr(0, 12);
}

/// Creates (or, on resume, verifies) the run directory and its manifest.
RunManifest prepare_run_dir(const CommandOptions& opts, std::string_view command,
                            const RunConfig& cfg, const LoadedData& data) {
  if (opts.out.empty()) throw ConfigError("--out is required");
  const auto manifest_path = opts.out / files::kManifest;
  const auto digest = config_digest(cfg);

  if (opts.resume) {
    if (!fs::exists(manifest_path)) {
      throw ConfigError("--resume: no run found in " + opts.out.string());
    }
    auto m = manifest_from_json(read_json_file(manifest_path));
    if (m.command != command) {
      throw ConfigError("--resume: run directory holds a '" + m.command + "' run");
    }
    if (m.config_digest != digest) {
      throw ConfigError("--resume: configuration differs from the original run");
    }
    if (m.dataset_digests != data.digests) {
      throw ConfigError("--resume: dataset files differ from the original run");
    }
    return m;
  }

  if (fs::exists(manifest_path)) {
    throw ConfigError("run directory " + opts.out.string() +
                      " already holds a run; pass --resume or pick another --out");
  }
  fs::create_directories(opts.out);
  RunManifest m;
  m.created_at = utc_now();
  m.command = std::string(command);
  m.config_digest = digest;
  m.dataset_digests = data.digests;
  m.version = artifact_version();
  m.run_id = new_run_id(opts.out.string() + digest);
  write_json_file(manifest_path, to_json(m));
  write_json_file(opts.out / files::kConfig, to_json(cfg));
  write_split_manifests(opts.out, data.splits);
  return m;
}

json report_json(const RunManifest& m, std::string_view strategy, const LoadedData& data,
                 const optimizer::Evaluation& eval, std::uint64_t task_calls,
                 std::uint64_t backward_calls) {
  return {{"run_id", m.run_id},
          {"command", m.command},
          {"strategy", strategy},
          {"dataset", data.label},
          {"n", eval.graded.size()},
          {"accuracy", eval.accuracy},
          {"failed_calls", eval.failed_items.size()},
          {"task_calls", task_calls},
          {"backward_calls", backward_calls}};
}

void finish_eval(const fs::path& run_dir, const optimizer::Evaluation& eval, const json& report,
                 std::ostream& out) {
  write_graded(run_dir / files::kGraded, eval.graded);
  write_json_file(run_dir / files::kReport, report);
  out << fmt::format("test accuracy: {:.1f}% ({} items, {} failed calls)\n",
                     eval.accuracy * 100.0, eval.graded.size(), eval.failed_items.size());
}

std::string baseline_label(const strategies::PromptStrategy& s) {
  if (s.kind == strategies::PromptStrategy::Kind::few_shot) {
    return fmt::format("few-shot k={}", s.k.value_or(0));
  }
  return std::string(strategies::to_string(s.kind));
}

}  // namespace

RunConfig resolve_config(const CommandOptions& opts) {
  RunConfig cfg = opts.config ? load_config(*opts.config) : default_config();
  if (opts.format) cfg.format = datasets::format_from_string(*opts.format);
  if (opts.strategy) cfg.strategy.kind = strategies::strategy_from_string(*opts.strategy);
  if (opts.k) cfg.strategy.k = *opts.k;
  if (opts.seed) {
    cfg.split.seed = *opts.seed;
    cfg.optimizer.rng_seed = *opts.seed;
    cfg.strategy.rng_seed = *opts.seed;
  }
  if (opts.backend) {
    merge(cfg, json{{"task", {{"backend", *opts.backend}}},
                    {"backward", {{"backend", *opts.backend}}}});
  }
  if (opts.mock_script) cfg.mock_script = *opts.mock_script;
  gateway::validate(cfg.task.backend);
  gateway::validate(cfg.backward.backend);
  return cfg;
}

int cmd_optimize(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  const auto cfg = resolve_config(opts);
  const auto data = load_data(opts, cfg);
  optimizer::validate(cfg.optimizer, data.splits);
  const auto manifest = prepare_run_dir(opts, "optimize", cfg, data);

  const auto trace_path = opts.out / files::kTrace;
  optimizer::RunHooks hooks;
  if (opts.resume && fs::exists(trace_path)) hooks.resume_from = optimizer::load_trace(trace_path);
  hooks.stop_after = opts.stop_after;
  hooks.persist = [&](const optimizer::OptimizationTrace& t) {
    optimizer::save_trace(trace_path, t);
    write_text_file(opts.out / files::kBestPrompt, t.best_prompt + "\n");
  };

  auto engines = make_engines(cfg, opts.out, true);
  const auto rule = extraction::ExtractionRule::for_format(cfg.format);
  const auto trace = optimizer::run_optimization(cfg.optimizer, data.splits,
                                                 {*engines.task, *engines.backward}, cfg.format,
                                                 rule, hooks);
  if (!trace.finished()) {
    err << fmt::format("stopped after {} iterations; continue with --resume\n",
                       trace.iterations.size());
    return exit_code(ErrorCategory::interrupted);
  }

  out << fmt::format("stop reason: {}\n", optimizer::to_string(*trace.stop_reason));
  out << fmt::format("best dev accuracy: {:.1f}%\n", trace.best_dev_accuracy * 100.0);
  out << "best prompt:\n" << trace.best_prompt << "\n";

  const auto before = engines.task->stats().requests;
  const auto& prompt = trace.best_prompt;
  const auto eval = optimizer::evaluate_items(
      data.splits.test, *engines.task, cfg.format, rule, cfg.optimizer.dev_parallelism,
      Execution::parallel, kTestEvalRole, [&](const QAItem& item) {
        return strategies::build_with_system_prompt(item, prompt, cfg.format);
      });

  std::uint64_t task_calls = trace.seed_call_counts.task + (engines.task->stats().requests - before);
  std::uint64_t backward_calls = trace.seed_call_counts.backward;
  for (const auto& it : trace.iterations) {
    task_calls += it.engine_call_counts.task;
    backward_calls += it.engine_call_counts.backward;
  }
  auto report = report_json(manifest, "optimized-prompt", data, eval, task_calls, backward_calls);
  report["best_dev_accuracy"] = trace.best_dev_accuracy;
  report["iterations"] = trace.iterations.size();
  report["stop_reason"] = optimizer::to_string(*trace.stop_reason);
  finish_eval(opts.out, eval, report, out);
  return 0;
}

int cmd_baseline(const CommandOptions& opts, std::ostream& out, std::ostream&) {
  const auto cfg = resolve_config(opts);
  strategies::validate(cfg.strategy);
  const auto data = load_data(opts, cfg);
  const auto manifest = prepare_run_dir(opts, "baseline", cfg, data);

  auto engines = make_engines(cfg, opts.out, false);
  const auto rule = extraction::ExtractionRule::for_format(cfg.format);
  const auto eval = optimizer::run_baseline(cfg.strategy, data.splits.test, data.splits.train,
                                            *engines.task, cfg.format, rule,
                                            cfg.task.endpoint.parallelism);
  const auto report = report_json(manifest, baseline_label(cfg.strategy), data, eval,
                                  engines.task->stats().requests, 0);
  finish_eval(opts.out, eval, report, out);
  return 0;
}

int cmd_evaluate(const CommandOptions& opts, std::ostream& out, std::ostream&) {
  if (!opts.prompt_file) throw ConfigError("evaluate needs --prompt");
  std::string prompt;
  try {
    prompt = read_text_file(*opts.prompt_file);
  } catch (const IoError&) {
    throw ConfigError("cannot read prompt file " + opts.prompt_file->string());
  }
  while (!prompt.empty() && (prompt.back() == '\n' || prompt.back() == '\r')) prompt.pop_back();
  if (prompt.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw ConfigError("prompt file " + opts.prompt_file->string() + " is empty");
  }

  const auto cfg = resolve_config(opts);
  const auto data = load_data(opts, cfg);
  auto manifest = prepare_run_dir(opts, "evaluate", cfg, data);
  write_text_file(opts.out / files::kBestPrompt, prompt + "\n");

  auto engines = make_engines(cfg, opts.out, false);
  const auto rule = extraction::ExtractionRule::for_format(cfg.format);
  const auto eval = optimizer::evaluate_items(
      data.splits.test, *engines.task, cfg.format, rule, cfg.task.endpoint.parallelism,
      Execution::parallel, kTestEvalRole, [&](const QAItem& item) {
        return strategies::build_with_system_prompt(item, prompt, cfg.format);
      });
  const auto report =
      report_json(manifest, "fixed-prompt", data, eval, engines.task->stats().requests, 0);
  finish_eval(opts.out, eval, report, out);
  return 0;
}

int cmd_report(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  if (opts.run_dirs.empty()) throw ConfigError("report needs at least one run directory");

  struct Row {
    std::string run_id, command, strategy, dataset;
    std::size_t n = 0;
    double accuracy = 0.0;
    std::uint64_t task_calls = 0, backward_calls = 0;
  };
  std::vector<Row> rows;
  for (const auto& dir : opts.run_dirs) {
    try {
      const auto manifest = manifest_from_json(read_json_file(dir / files::kManifest));
      const auto report = read_json_file(dir / files::kReport);
      const auto graded = read_graded(dir / files::kGraded);
      Row r;
      r.run_id = manifest.run_id;
      r.command = manifest.command;
      r.strategy = report.at("strategy").get<std::string>();
      r.dataset = report.at("dataset").get<std::string>();
      r.n = graded.size();
      // Recomputed from the graded dump rather than trusted from report.json.
      r.accuracy = extraction::accuracy(graded);
      r.task_calls = report.at("task_calls").get<std::uint64_t>();
      r.backward_calls = report.at("backward_calls").get<std::uint64_t>();
      rows.push_back(std::move(r));
    } catch (const std::exception& e) {
      err << fmt::format("warning: skipping {}: {}\n", dir.string(), e.what());
    }
  }
  if (rows.empty()) throw FormatError("no readable run directories");

  out << fmt::format("{:<14} {:<9} {:<18} {:<16} {:>6} {:>9} {:>10} {:>14}\n", "run_id",
                     "command", "strategy", "dataset", "n", "accuracy", "task_calls",
                     "backward_calls");
  for (const auto& r : rows) {
    out << fmt::format("{:<14} {:<9} {:<18} {:<16} {:>6} {:>8.1f}% {:>10} {:>14}\n", r.run_id,
                       r.command, r.strategy, r.dataset, r.n, r.accuracy * 100.0, r.task_calls,
                       r.backward_calls);
  }

  if (!opts.out.empty()) {
    auto quote = [](const std::string& s) {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char c : s) {
        if (c == '"') q += '"';
        q += c;
      }
      return q + "\"";
    };
    std::string csv =
        "run_id,command,strategy,dataset,n,accuracy_pct,task_calls,backward_calls\n";
    for (const auto& r : rows) {
      csv += fmt::format("{},{},{},{},{},{:.1f},{},{}\n", quote(r.run_id), quote(r.command),
                         quote(r.strategy), quote(r.dataset), r.n, r.accuracy * 100.0,
                         r.task_calls, r.backward_calls);
    }
    if (opts.out.has_parent_path()) fs::create_directories(opts.out.parent_path());
    write_text_file(opts.out, csv);
  }
  return 0;
}

int run_command(std::string_view name, const CommandOptions& opts, std::ostream& out,
                std::ostream& err) {
  try {
    if (name == "optimize") return cmd_optimize(opts, out, err);
    if (name == "baseline") return cmd_baseline(opts, out, err);
    if (name == "evaluate") return cmd_evaluate(opts, out, err);
    if (name == "report") return cmd_report(opts, out, err);
    throw ConfigError("unknown command '" + std::string(name) + "'");
  } catch (const Error& e) {
    err << fmt::format("{} error: {}\n", to_string(e.category()), e.what());
    return exit_code(e.category());
  } catch (const fs::filesystem_error& e) {
    err << fmt::format("data error: {}\n", e.what());
    return exit_code(ErrorCategory::data);
  }
}

}  // namespace tgp::cli
