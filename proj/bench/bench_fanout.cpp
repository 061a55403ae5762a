// Dev-set evaluation against a mock task model with fixed per-call latency.
// Arg 0: dev parallelism (1 runs the serial reference path).

#include <benchmark/benchmark.h>

#include "support/test_support.hpp"
#include "tgp/optimizer/evaluate.hpp"

namespace {

using namespace tgp;

void BM_DevEvaluation(benchmark::State& state) {
  const auto parallelism = static_cast<std::size_t>(state.range(0));
  const auto dev = testing::mc_items(50, "dev");
  const auto format = datasets::TaskFormat::multiple_choice();
  const auto rule = extraction::ExtractionRule::for_format(format);
  const auto exec = parallelism == 1 ? Execution::serial : Execution::parallel;

  auto mock = std::make_shared<gateway::MockBackend>(1);
  mock->otherwise("The answer is {{random:A|B|C|D}}.");
  mock->set_latency(std::chrono::microseconds(2000));
  // Caching off so every iteration pays the backend latency.
  auto task = testing::mock_gateway(mock, false, parallelism);

  for (auto _ : state) {
    auto ev = optimizer::evaluate_on_dev("Answer with one letter.", dev, *task, format, rule,
                                         parallelism, exec);
    benchmark::DoNotOptimize(ev.accuracy);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(dev.size()));
}

BENCHMARK(BM_DevEvaluation)->Arg(1)->Arg(4)->Arg(8)->Arg(16)->UseRealTime()->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
