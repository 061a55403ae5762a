// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "support/test_support.hpp"
#include "tgp/cli/commands.hpp"
#include "tgp/cli/run_dir.hpp"
#include "tgp/datasets/splits.hpp"
#include "tgp/error.hpp"
#include "tgp/extraction/extract.hpp"
#include "tgp/extraction/grading.hpp"
#include "tgp/optimizer/evaluate.hpp"
#include "tgp/optimizer/optimizer.hpp"
#include "tgp/rng.hpp"

using namespace tgp;
using nlohmann::json;
using optimizer::OptimizationTrace;
using optimizer::OptimizerConfig;
namespace fs = std::filesystem;
namespace t = tgp::testing;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

const datasets::TaskFormat kMc = datasets::TaskFormat::multiple_choice();
const extraction::ExtractionRule kMcRule = extraction::ExtractionRule::for_format(kMc);

datasets::Splits synthetic_splits(std::size_t train, std::size_t dev) {
  datasets::Splits s;
  s.train = t::mc_items(train, "tr");
  s.dev = t::mc_items(dev, "dv");
  s.test = t::mc_items(4, "te");
  return s;
}

OptimizationTrace optimize(const OptimizerConfig& cfg, const datasets::Splits& splits,
                           std::shared_ptr<gateway::MockBackend> task,
                           std::shared_ptr<gateway::MockBackend> backward, bool cache = true) {
  auto task_gw = t::mock_gateway(std::move(task), cache);
  auto backward_gw = t::mock_gateway(std::move(backward), cache, 4, true);
  return optimizer::run_optimization(cfg, splits, {*task_gw, *backward_gw}, kMc, kMcRule);
}

std::vector<json> jsonl_rows(const fs::path& path) {
  std::ifstream in(path);
  std::vector<json> rows;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) rows.push_back(json::parse(line));
  }
  return rows;
}

int run_cli(std::string_view name, const cli::CommandOptions& opts) {
  std::ostringstream out, err;
  return cli::run_command(name, opts, out, err);
}

Verdict gate_soundness() {
  const auto start = std::chrono::steady_clock::now();
  SplitMix64 rng(20240601);
  std::size_t violations = 0, accepted = 0, iterations = 0;
  for (int run = 0; run < 200; ++run) {
    const std::size_t train = 12 + rng.next() % 20;
    const std::size_t dev = 5 + rng.next() % 16;
    OptimizerConfig cfg;
    cfg.batch_size = 1 + rng.next() % 5;
    cfg.patience_n = 1 + rng.next() % 4;
    cfg.max_iterations = cfg.patience_n + rng.next() % 8;
    cfg.rng_seed = rng.next();
    const std::uint64_t mock_seed = rng.next();
    const auto trace = optimize(cfg, synthetic_splits(train, dev), t::hashed_task_mock(mock_seed),
                                t::random_rewrite_mock(mock_seed));
    double best = trace.seed_dev_accuracy;
    for (const auto& it : trace.iterations) {
      ++iterations;
      const bool improves = it.dev_accuracy > best;
      if (it.accepted != improves) ++violations;
      if (it.best_accuracy_after < best) ++violations;
      if (improves) {
        best = it.dev_accuracy;
        ++accepted;
      }
      if (it.best_accuracy_after != best) ++violations;
    }
    if (trace.best_dev_accuracy != best) ++violations;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {violations == 0 && secs < 60.0,
          fmt::format("200 runs, {} iterations, {} accepted, {} violations, {:.2f}s", iterations,
                      accepted, violations, secs)};
}

Verdict stopping_exactness() {
  std::string detail;
  bool ok = true;
  const auto splits = synthetic_splits(20, 8);
  for (std::size_t patience : {1u, 2u, 3u, 5u}) {
    OptimizerConfig cfg;
    cfg.batch_size = 3;
    cfg.patience_n = patience;
    const auto flat = optimize(cfg, splits, t::keyword_task_mock("evidence-based"),
                               t::scripted_backward_mock(cfg.seed_prompt));
    const auto late = optimize(cfg, splits, t::keyword_task_mock("evidence-based"),
                               t::scripted_backward_mock("You are an evidence-based assistant."));
    const bool flat_ok = flat.iterations.size() == patience && flat.best_prompt == cfg.seed_prompt;
    const bool late_ok = late.iterations.size() == 1 + patience && late.iterations[0].accepted;
    ok = ok && flat_ok && late_ok;
    detail += fmt::format("p={}: {}/{} ", patience, flat.iterations.size(), late.iterations.size());
  }
  return {ok, detail + "(flat/improve-then-stall iterations)"};
}

Verdict synthetic_convergence() {
  OptimizerConfig cfg;
  cfg.batch_size = 4;
  cfg.patience_n = 2;
  const auto trace = optimize(cfg, synthetic_splits(20, 10), t::keyword_task_mock("evidence-based"),
                              t::scripted_backward_mock("You are an evidence-based assistant."));
  std::size_t reached = 0;
  for (const auto& it : trace.iterations) {
    if (it.best_accuracy_after == 1.0) {
      reached = it.index;
      break;
    }
  }
  const bool ok = trace.best_dev_accuracy == 1.0 && reached >= 1 && reached <= 2 &&
                  trace.best_prompt.find("evidence-based") != std::string::npos;
  return {ok, fmt::format("seed {:.2f} -> best {:.2f} at iteration {}", trace.seed_dev_accuracy,
                          trace.best_dev_accuracy, reached)};
}

Verdict call_budget() {
  const std::size_t b = 3, dev = 10;
  OptimizerConfig cfg;
  cfg.batch_size = b;
  cfg.patience_n = 3;
  cfg.max_iterations = 7;
  const auto splits = synthetic_splits(24, dev);
  auto task = t::hashed_task_mock(77);
  auto backward = t::random_rewrite_mock(77);
  const auto trace = optimize(cfg, splits, task, backward, false);
  const std::size_t i = trace.iterations.size();
  const std::size_t task_calls = task->call_count() - dev;  // less the seed evaluation
  const std::size_t backward_calls = backward->call_count();
  const bool ok = i > 0 && backward_calls == i * (3 * b + 1) && task_calls == i * (b + dev);
  return {ok, fmt::format("i={} b={} |dev|={}: backward {} (expect {}), task {} (expect {})", i, b,
                          dev, backward_calls, i * (3 * b + 1), task_calls, i * (b + dev))};
}

Verdict extraction_corpus() {
  std::size_t total = 0, agree = 0;
  // Reference transcripts, graded against their recorded ground truths.
  for (const auto& row : jsonl_rows(t::fixture("reference_transcripts.jsonl"))) {
    const bool mc = row["format"] == "mc";
    const auto format = mc ? kMc : datasets::TaskFormat::ternary();
    datasets::QAItem item;
    item.id = row["name"];
    item.question = "q";
    item.gold = row["gold"];
    if (mc) {
      for (char c = 'A'; c <= 'E'; ++c) item.options[c] = std::string(1, c);
    }
    extraction::ExtractionRule rule = extraction::ExtractionRule::for_format(format);
    if (row["rule"] == "answer_tag") rule.kind = extraction::ExtractionRule::Kind::answer_tag;
    const auto g = extraction::grade(item, row["raw"].get<std::string>(), rule, format);
    ++total;
    if (g.extracted == row["extracted"].get<std::string>() && g.correct == row["correct"]) ++agree;
  }
  const std::size_t transcripts = total;
  for (const auto& row : jsonl_rows(t::fixture("extraction_edge_cases.jsonl"))) {
    const auto raw = row["raw"].get<std::string>();
    std::optional<std::string> got;
    if (row["kind"] == "mc") {
      if (auto c = extraction::extract_mc(raw)) got = std::string(1, *c);
    } else if (row["kind"] == "ynm") {
      got = extraction::extract_ynm(raw);
    } else {
      got = extraction::extract_answer_tag(raw);
    }
    const std::optional<std::string> expected =
        row["expected"].is_null() ? std::nullopt
                                  : std::optional<std::string>(row["expected"].get<std::string>());
    ++total;
    if (got == expected) ++agree;
  }
  return {total == transcripts + 50 && transcripts == 7 && agree == total,
          fmt::format("{}/{} agree ({} transcripts, {} edge cases)", agree, total, transcripts,
                      total - transcripts)};
}

Verdict split_protocol() {
  datasets::SplitSpec spec;
  spec.dev_size = 50;
  spec.test_size = 500;
  spec.seed = 3;

  datasets::PreSplit given{t::ternary_items(500, "given-train"), t::ternary_items(500, "given-test")};
  spec.protocol = datasets::SplitSpec::Protocol::dev_from_train;
  const auto p1 = datasets::make_splits(given, spec);
  const auto p2 = datasets::make_splits(given, spec);

  const auto pool = t::mc_items(858, "pool");
  spec.protocol = datasets::SplitSpec::Protocol::dev_test_rest_train;
  const auto n1 = datasets::make_splits(pool, spec);
  const auto n2 = datasets::make_splits(pool, spec);
  spec.seed = 4;
  const auto n3 = datasets::make_splits(pool, spec);

  auto disjoint = [](const datasets::Splits& s) {
    std::set<std::string> ids;
    for (const auto* part : {&s.train, &s.dev, &s.test}) {
      for (const auto& item : *part) {
        if (!ids.insert(item.id).second) return false;
      }
    }
    return true;
  };
  auto same = [](const datasets::Splits& a, const datasets::Splits& b) {
    return datasets::ids_of(a.train) == datasets::ids_of(b.train) &&
           datasets::ids_of(a.dev) == datasets::ids_of(b.dev) &&
           datasets::ids_of(a.test) == datasets::ids_of(b.test);
  };
  const bool sizes = p1.train.size() == 450 && p1.dev.size() == 50 && p1.test.size() == 500 &&
                     n1.train.size() == 308 && n1.dev.size() == 50 && n1.test.size() == 500;
  const bool ok = sizes && disjoint(p1) && disjoint(n1) && same(p1, p2) && same(n1, n2) &&
                  !same(n1, n3);
  return {ok, fmt::format("500+500 pre-split {}/{}/{}, 858-item pool {}/{}/{}", p1.train.size(),
                          p1.dev.size(), p1.test.size(), n1.train.size(), n1.dev.size(),
                          n1.test.size())};
}

Verdict random_floor() {
  strategies::PromptStrategy zero_shot;
  auto mc_guess = std::make_shared<gateway::MockBackend>(101);
  mc_guess->otherwise("{{random:A|B|C|D}}");
  auto mc_gw = t::mock_gateway(mc_guess);
  const auto mc = t::mc_items(10000, "rmc");
  const double mc_acc =
      optimizer::run_baseline(zero_shot, mc, {}, *mc_gw, kMc, kMcRule, 8).accuracy;

  const auto tern_format = datasets::TaskFormat::ternary();
  auto tern_guess = std::make_shared<gateway::MockBackend>(202);
  tern_guess->otherwise("{{random:yes|no|maybe}}");
  auto tern_gw = t::mock_gateway(tern_guess);
  const auto tern = t::ternary_items(10000, "rtn");
  const double tern_acc = optimizer::run_baseline(zero_shot, tern, {}, *tern_gw, tern_format,
                                                  extraction::ExtractionRule::for_format(tern_format),
                                                  8)
                              .accuracy;
  const bool ok = std::abs(mc_acc - 0.25) <= 0.015 && std::abs(tern_acc - 1.0 / 3.0) <= 0.015;
  return {ok, fmt::format("4-option {:.2f}%, ternary {:.2f}%", mc_acc * 100, tern_acc * 100)};
}

Verdict determinism() {
  t::TempDir dir;
  bool ok = true;
  std::string detail;
  for (const char* command : {"optimize", "baseline"}) {
    std::vector<fs::path> runs;
    for (int r = 0; r < 2; ++r) {
      cli::CommandOptions o;
      o.config = t::sample("config.json");
      o.datasets = {t::sample("mc_tiny.jsonl")};
      o.out = dir / fmt::format("{}-{}", command, r);
      if (run_cli(command, o) != 0) return {false, std::string(command) + " run failed"};
      runs.push_back(o.out);
    }
    const bool graded = cli::read_text_file(runs[0] / cli::files::kGraded) ==
                        cli::read_text_file(runs[1] / cli::files::kGraded);
    bool trace = true;
    if (std::string_view(command) == "optimize") {
      trace = cli::read_text_file(runs[0] / cli::files::kTrace) ==
              cli::read_text_file(runs[1] / cli::files::kTrace);
    }
    ok = ok && graded && trace;
    detail += fmt::format("{}: {}; ", command,
                          trace && graded ? "byte-identical" : "outputs differ");
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

std::set<std::string> backend_calls(const fs::path& run_dir) {
  std::set<std::string> unique;
  for (const auto& row : jsonl_rows(run_dir / cli::files::kTranscripts)) {
    if (!row["from_cache"].get<bool>()) {
      unique.insert(row["engine"].get<std::string>() + ":" + row["digest"].get<std::string>());
    }
  }
  return unique;
}

Verdict resume_equivalence() {
  t::TempDir dir;
  // Same responses as the sample script, but the backward engine dies after
  // a handful of calls in every process.
  auto script = cli::read_json_file(t::sample("mock_script.json"));
  const auto base_cfg = cli::read_json_file(t::sample("config.json"));
  cli::write_json_file(dir / "plain.json", script);
  script["backward"] = {{"rules", script["backward"]}, {"abort_after", 7}};
  cli::write_json_file(dir / "flaky.json", script);
  for (const char* name : {"plain", "flaky"}) {
    auto cfg = base_cfg;
    cfg["mock_script"] = std::string(name) + ".json";
    cli::write_json_file(dir / fmt::format("{}_cfg.json", name), cfg);
  }

  cli::CommandOptions whole;
  whole.config = dir / "plain_cfg.json";
  whole.datasets = {t::sample("mc_tiny.jsonl")};
  whole.out = dir / "whole";
  if (run_cli("optimize", whole) != 0) return {false, "uninterrupted run failed"};

  cli::CommandOptions flaky = whole;
  flaky.config = dir / "flaky_cfg.json";
  flaky.out = dir / "flaky";
  int attempts = 0, interrupts = 0, code = -1;
  while (attempts < 50) {
    code = run_cli("optimize", flaky);
    ++attempts;
    flaky.resume = true;
    if (code != 9) break;
    ++interrupts;
  }
  if (code != 0) return {false, fmt::format("attempt {} exited {}", attempts, code)};

  const bool trace = cli::read_text_file(whole.out / cli::files::kTrace) ==
                     cli::read_text_file(flaky.out / cli::files::kTrace);
  const bool graded = cli::read_text_file(whole.out / cli::files::kGraded) ==
                      cli::read_text_file(flaky.out / cli::files::kGraded);
  const auto a = backend_calls(whole.out);
  const auto b = backend_calls(flaky.out);
  const bool ok = interrupts > 0 && trace && graded && a == b;
  return {ok, fmt::format("{} interrupts; trace {}; unique engine calls {} vs {}", interrupts,
                          trace ? "identical" : "DIFFERS", a.size(), b.size())};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"gate soundness and monotonicity", gate_soundness},
      {"stopping exactness", stopping_exactness},
      {"synthetic convergence", synthetic_convergence},
      {"call-budget accounting", call_budget},
      {"extraction golden corpus", extraction_corpus},
      {"split protocol", split_protocol},
      {"random-choice floor", random_floor},
      {"determinism", determinism},
      {"resume equivalence", resume_equivalence},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::printf("%s [%zu] %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}
