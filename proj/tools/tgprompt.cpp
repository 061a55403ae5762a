#include <iostream>

#include <CLI11.hpp>

#include "tgp/cli/commands.hpp"
#include "tgp/cli/run_dir.hpp"
#include "tgp/error.hpp"

namespace {

void add_run_flags(CLI::App* cmd, tgp::cli::CommandOptions& o) {
  cmd->add_option("--config", o.config, "JSON config file");
  cmd->add_option("--dataset", o.datasets,
                  "JSONL dataset; give twice for separate train and test files")
      ->required();
  cmd->add_option("--format", o.format, "task format")->check(CLI::IsMember({"mc", "ternary"}));
  cmd->add_option("--seed", o.seed, "seed for splits, batch order and few-shot sampling");
  cmd->add_option("--out", o.out, "run directory")->required();
  cmd->add_option("--backend", o.backend, "engine backend")
      ->check(CLI::IsMember({"http", "mock"}));
  cmd->add_option("--mock-script", o.mock_script, "scripted responses for the mock backend");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Textual-gradient system prompt optimizer and QA evaluation harness"};
  app.set_version_flag("--version", tgp::cli::artifact_version());
  app.require_subcommand(1);

  tgp::cli::CommandOptions opts;

  auto* optimize = app.add_subcommand("optimize", "optimize a system prompt, then score it on test");
  add_run_flags(optimize, opts);
  optimize->add_flag("--resume", opts.resume, "continue the run in --out");
  optimize->add_option("--stop-after", opts.stop_after)->group("");

  auto* baseline = app.add_subcommand("baseline", "score a baseline prompting strategy on test");
  add_run_flags(baseline, opts);
  baseline->add_option("--strategy", opts.strategy, "prompting strategy")
      ->check(CLI::IsMember({"zero-shot", "few-shot", "cot"}));
  baseline->add_option("--k", opts.k, "few-shot exemplar count");
  baseline->add_flag("--resume", opts.resume, "reuse the run in --out and its cache");

  auto* evaluate = app.add_subcommand("evaluate", "score a saved system prompt on test");
  add_run_flags(evaluate, opts);
  evaluate->add_option("--prompt", opts.prompt_file, "system prompt file")->required();
  evaluate->add_flag("--resume", opts.resume, "reuse the run in --out and its cache");

  auto* report = app.add_subcommand("report", "compare finished runs");
  report->add_option("run_dirs", opts.run_dirs, "run directories")->required();
  report->add_option("--out", opts.out, "CSV output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : tgp::exit_code(tgp::ErrorCategory::config);
  }

  const auto* sub = app.get_subcommands().front();
  return tgp::cli::run_command(sub->get_name(), opts, std::cout, std::cerr);
}
