#include <doctest.h>

#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "support/test_support.hpp"
#include "tgp/cli/commands.hpp"
#include "tgp/cli/config.hpp"
#include "tgp/cli/run_dir.hpp"
#include "tgp/datasets/jsonl.hpp"
#include "tgp/error.hpp"
#include "tgp/optimizer/trace.hpp"

using namespace tgp;
using namespace tgp::cli;
using nlohmann::json;
using tgp::testing::sample;
using tgp::testing::TempDir;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::string_view name, const CommandOptions& opts) {
  std::ostringstream out, err;
  const int code = run_command(name, opts, out, err);
  return {code, out.str(), err.str()};
}

CommandOptions sample_opts(const fs::path& out) {
  CommandOptions o;
  o.config = sample("config.json");
  o.datasets = {sample("mc_tiny.jsonl")};
  o.out = out;
  return o;
}

std::vector<json> jsonl_rows(const fs::path& path) {
  std::istringstream in(read_text_file(path));
  std::vector<json> rows;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) rows.push_back(json::parse(line));
  }
  return rows;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("config: defaults, file merge and flag precedence") {
  const auto d = default_config();
  CHECK(d.task.backend.kind == gateway::BackendKind::http);
  CHECK(d.split.dev_size == 50);
  CHECK(d.split.test_size == 500);
  CHECK(d.optimizer.patience_n == 3);

  auto file = load_config(sample("config.json"));
  CHECK(file.task.backend.kind == gateway::BackendKind::mock);
  CHECK(file.optimizer.patience_n == 2);
  CHECK(file.split.dev_size == 8);
  CHECK(file.strategy.k == 3);
  REQUIRE(file.mock_script);
  CHECK(fs::exists(*file.mock_script));

  CommandOptions o;
  o.config = sample("config.json");
  o.seed = 77;
  o.k = 1;
  o.strategy = "cot";
  o.format = "ternary";
  const auto merged = resolve_config(o);
  CHECK(merged.split.seed == 77);
  CHECK(merged.optimizer.rng_seed == 77);
  CHECK(merged.strategy.rng_seed == 77);
  CHECK(merged.strategy.k == 1);
  CHECK(merged.strategy.kind == strategies::PromptStrategy::Kind::cot);
  CHECK(merged.format.kind == datasets::TaskFormat::ternary().kind);
  CHECK(merged.optimizer.batch_size == 4);

  // The snapshot survives a round trip.
  auto again = default_config();
  merge(again, to_json(merged));
  CHECK(to_json(again) == to_json(merged));
}

TEST_CASE("config: unknown keys and wrong types are rejected") {
  auto c = default_config();
  CHECK_THROWS_AS(merge(c, json{{"optimiser", json::object()}}), ConfigError);
  CHECK_THROWS_AS(merge(c, json{{"optimizer", {{"patiense", 2}}}}), ConfigError);
  CHECK_THROWS_AS(merge(c, json{{"optimizer", {{"patience", "two"}}}}), ConfigError);
  CHECK_THROWS_AS(merge(c, json{{"task", {{"backend", "grpc"}}}}), ConfigError);
  CHECK_THROWS_AS(merge(c, json{{"strategy", {{"kind", "many-shot"}}}}), ConfigError);
  CHECK_THROWS_AS(load_config(sample("nope.json")), ConfigError);
}

TEST_CASE("optimize on the sample data writes a complete run directory") {
  TempDir dir;
  const auto run_dir = dir / "opt";
  const auto r = run("optimize", sample_opts(run_dir));
  REQUIRE_MESSAGE(r.code == 0, r.err);
  for (const char* f : {files::kManifest, files::kConfig, files::kTrace, files::kBestPrompt,
                        files::kTranscripts, files::kGraded, files::kReport}) {
    CHECK_MESSAGE(fs::exists(run_dir / f), f);
  }
  CHECK(fs::exists(run_dir / files::kSplits / "dev.txt"));
  CHECK(r.out.find("stop reason: ") != std::string::npos);

  const auto trace = optimizer::load_trace(run_dir / files::kTrace);
  CHECK(trace.finished());
  CHECK(read_text_file(run_dir / files::kBestPrompt).find(trace.best_prompt) == 0);

  const auto report = read_json_file(run_dir / files::kReport);
  CHECK(report["strategy"] == "optimized-prompt");
  CHECK(report["n"] == 16);
  CHECK(report["iterations"] == trace.iterations.size());
  std::size_t task = trace.seed_call_counts.task, backward = 0;
  for (const auto& it : trace.iterations) {
    task += it.engine_call_counts.task;
    backward += it.engine_call_counts.backward;
  }
  CHECK(report["task_calls"] == task + 16);
  CHECK(report["backward_calls"] == backward);

  const auto manifest = manifest_from_json(read_json_file(run_dir / files::kManifest));
  CHECK(manifest.command == "optimize");
  CHECK(manifest.dataset_digests.count("pool") == 1);
  CHECK(manifest.version == artifact_version());

  // A finished run directory is never silently overwritten.
  CHECK(run("optimize", sample_opts(run_dir)).code == 2);
}

TEST_CASE("exit codes: missing dataset, missing flags, unknown command") {
  TempDir dir;
  auto o = sample_opts(dir / "x");
  o.datasets = {dir / "missing.jsonl"};
  const auto r = run("baseline", o);
  CHECK(r.code == 3);
  CHECK(r.err.rfind("data error: ", 0) == 0);

  auto no_out = sample_opts({});
  CHECK(run("baseline", no_out).code == 2);
  CHECK(run("tune", sample_opts(dir / "y")).code == 2);

  auto no_script = sample_opts(dir / "z");
  no_script.config.reset();
  no_script.backend = "mock";
  CHECK(run("baseline", no_script).code == 2);
}

TEST_CASE("baseline: few-shot with k = 0 is byte-identical to zero-shot") {
  TempDir dir;
  auto zero = sample_opts(dir / "zs");
  zero.strategy = "zero-shot";
  auto few = sample_opts(dir / "fs0");
  few.strategy = "few-shot";
  few.k = 0;
  REQUIRE(run("baseline", zero).code == 0);
  REQUIRE(run("baseline", few).code == 0);
  CHECK(read_text_file(dir / "zs" / files::kGraded) == read_text_file(dir / "fs0" / files::kGraded));
  CHECK(read_json_file(dir / "fs0" / files::kReport)["strategy"] == "few-shot k=0");
}

TEST_CASE("evaluate: prompt file handling and one graded row per test item") {
  TempDir dir;
  auto o = sample_opts(dir / "empty");
  CHECK(run("evaluate", o).code == 2);
  write_text_file(dir / "empty.txt", "  \n");
  o.prompt_file = dir / "empty.txt";
  CHECK(run("evaluate", o).code == 2);

  // 560-item pool, dev 50, test 500.
  const auto pool = tgp::testing::mc_items(560, "big");
  datasets::write_jsonl(dir / "big.jsonl", pool);
  write_text_file(dir / "script.json", R"({"task": [{"default": "Answer: {{random:A|B|C|D}}"}],
                                           "backward": [{"default": "unused"}]})");
  write_text_file(dir / "cfg.json", R"({"task": {"backend": "mock"}, "backward": {"backend": "mock"},
                                        "split": {"dev_size": 50, "test_size": 500, "seed": 3},
                                        "mock_script": "script.json"})");
  write_text_file(dir / "prompt.txt", "Pick one letter.\n");
  CommandOptions big;
  big.config = dir / "cfg.json";
  big.datasets = {dir / "big.jsonl"};
  big.prompt_file = dir / "prompt.txt";
  big.out = dir / "eval";
  const auto r = run("evaluate", big);
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto rows = jsonl_rows(dir / "eval" / files::kGraded);
  CHECK(rows.size() == 500);
  CHECK(lines_of(read_text_file(dir / "eval" / files::kSplits / "test.txt")).size() == 500);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].contains("item_id"));
  CHECK(read_json_file(dir / "eval" / files::kReport)["strategy"] == "fixed-prompt");
}

TEST_CASE("report: accuracy is recomputed from the graded dumps") {
  TempDir dir;
  auto a = sample_opts(dir / "a");
  a.strategy = "zero-shot";
  auto b = sample_opts(dir / "b");
  b.strategy = "cot";
  REQUIRE(run("baseline", a).code == 0);
  REQUIRE(run("baseline", b).code == 0);

  // Tampering with report.json must not change the reported accuracy.
  auto tampered = read_json_file(dir / "a" / files::kReport);
  tampered["accuracy"] = 0.999;
  write_json_file(dir / "a" / files::kReport, tampered);

  fs::create_directories(dir / "junk");
  CommandOptions rep;
  rep.run_dirs = {dir / "a", dir / "junk", dir / "b"};
  rep.out = dir / "summary.csv";
  const auto r = run("report", rep);
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.err.find("warning: skipping") != std::string::npos);

  const auto csv = lines_of(read_text_file(dir / "summary.csv"));
  REQUIRE(csv.size() == 3);
  CHECK(csv[0] == "run_id,command,strategy,dataset,n,accuracy_pct,task_calls,backward_calls");
  for (std::size_t i = 0; i < 2; ++i) {
    const auto run_dir = dir / (i == 0 ? "a" : "b");
    const auto rows = jsonl_rows(run_dir / files::kGraded);
    std::size_t right = 0;
    for (const auto& row : rows) right += row["correct"].get<bool>() ? 1 : 0;
    const auto pct = fmt::format("{:.1f}", 100.0 * static_cast<double>(right) / rows.size());
    CHECK_MESSAGE(csv[i + 1].find(fmt::format(",{},{},", rows.size(), pct)) != std::string::npos,
                  csv[i + 1]);
  }

  CommandOptions none;
  CHECK(run("report", none).code == 2);
  CommandOptions only_junk;
  only_junk.run_dirs = {dir / "junk"};
  CHECK(run("report", only_junk).code == 7);
}

TEST_CASE("optimize: interrupted runs resume only under the original configuration") {
  TempDir dir;
  auto full = sample_opts(dir / "full");
  REQUIRE(run("optimize", full).code == 0);

  auto part = sample_opts(dir / "part");
  part.stop_after = 1;
  const auto stopped = run("optimize", part);
  CHECK(stopped.code == 9);
  CHECK(stopped.err.find("continue with --resume") != std::string::npos);

  auto mismatched = sample_opts(dir / "part");
  mismatched.resume = true;
  mismatched.seed = 999;
  CHECK(run("optimize", mismatched).code == 2);

  auto wrong_command = sample_opts(dir / "part");
  wrong_command.resume = true;
  CHECK(run("baseline", wrong_command).code == 2);

  auto resume = sample_opts(dir / "part");
  resume.resume = true;
  const auto r = run("optimize", resume);
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(read_text_file(dir / "part" / files::kTrace) == read_text_file(dir / "full" / files::kTrace));
  CHECK(read_text_file(dir / "part" / files::kGraded) ==
        read_text_file(dir / "full" / files::kGraded));

  auto fresh_resume = sample_opts(dir / "nothing");
  fresh_resume.resume = true;
  CHECK(run("optimize", fresh_resume).code == 2);
}

TEST_CASE("two dataset files: dev is carved out of train, test passes through") {
  TempDir dir;
  datasets::write_jsonl(dir / "train.jsonl", tgp::testing::mc_items(30, "tr"));
  datasets::write_jsonl(dir / "test.jsonl", tgp::testing::mc_items(16, "te"));
  auto o = sample_opts(dir / "two");
  o.datasets = {dir / "train.jsonl", dir / "test.jsonl"};
  o.strategy = "zero-shot";
  const auto r = run("baseline", o);
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(lines_of(read_text_file(dir / "two" / files::kSplits / "test.txt")).size() == 16);
  CHECK(lines_of(read_text_file(dir / "two" / files::kSplits / "dev.txt")).size() == 8);
  CHECK(lines_of(read_text_file(dir / "two" / files::kSplits / "train.txt")).size() == 22);
  const auto m = manifest_from_json(read_json_file(dir / "two" / files::kManifest));
  CHECK(m.dataset_digests.count("train") == 1);
  CHECK(m.dataset_digests.count("test") == 1);
  CHECK(read_json_file(dir / "two" / files::kReport)["dataset"] == "test");
}
