#include "tgp/optimizer/trace.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#include "tgp/error.hpp"

namespace tgp::optimizer {
namespace {

using nlohmann::json;

json counts_json(const CallCounts& c) { return {{"task", c.task}, {"backward", c.backward}}; }

CallCounts counts_from(const json& j) {
  return {j.at("task").get<std::uint64_t>(), j.at("backward").get<std::uint64_t>()};
}

}  // namespace

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::patience_exhausted: return "patience_exhausted";
    case StopReason::max_iterations: return "max_iterations";
    case StopReason::train_exhausted: return "train_exhausted";
  }
  return "max_iterations";
}

StopReason stop_reason_from_string(std::string_view s) {
  if (s == "patience_exhausted") return StopReason::patience_exhausted;
  if (s == "max_iterations") return StopReason::max_iterations;
  if (s == "train_exhausted") return StopReason::train_exhausted;
  throw FormatError("unknown stop reason '" + std::string(s) + "'");
}

std::string to_jsonl(const OptimizationTrace& trace) {
  std::string out;
  out += json{{"type", "seed"},
              {"seed_prompt", trace.seed_prompt},
              {"dev_accuracy", trace.seed_dev_accuracy},
              {"engine_call_counts", counts_json(trace.seed_call_counts)}}
             .dump();
  out += '\n';
  for (const auto& it : trace.iterations) {
    json failures = json::array();
    for (const auto& f : it.item_failures) {
      failures.push_back({{"item_id", f.item_id}, {"stage", f.stage}, {"message", f.message}});
    }
    json rec = {{"type", "iteration"},
                {"index", it.index},
                {"batch_ids", it.batch_ids},
                {"candidate_prompt", it.candidate_prompt},
                {"dev_accuracy", it.dev_accuracy},
                {"accepted", it.accepted},
                {"best_accuracy_after", it.best_accuracy_after},
                {"engine_call_counts", counts_json(it.engine_call_counts)},
                {"item_failures", std::move(failures)},
                {"rejected_reason",
                 it.rejected_reason ? json(*it.rejected_reason) : json(nullptr)}};
    out += rec.dump();
    out += '\n';
  }
  if (trace.stop_reason) {
    out += json{{"type", "result"},
                {"best_prompt", trace.best_prompt},
                {"best_dev_accuracy", trace.best_dev_accuracy},
                {"stop_reason", to_string(*trace.stop_reason)}}
               .dump();
    out += '\n';
  }
  return out;
}

OptimizationTrace trace_from_jsonl(std::string_view text) {
  OptimizationTrace trace;
  bool have_seed = false;
  std::istringstream in{std::string(text)};
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
      const auto type = j.at("type").get<std::string>();
      if (type == "seed") {
        trace.seed_prompt = j.at("seed_prompt").get<std::string>();
        trace.seed_dev_accuracy = j.at("dev_accuracy").get<double>();
        trace.seed_call_counts = counts_from(j.at("engine_call_counts"));
        trace.best_prompt = trace.seed_prompt;
        trace.best_dev_accuracy = trace.seed_dev_accuracy;
        have_seed = true;
      } else if (type == "iteration") {
        IterationRecord it;
        it.index = j.at("index").get<std::size_t>();
        it.batch_ids = j.at("batch_ids").get<std::vector<std::string>>();
        it.candidate_prompt = j.at("candidate_prompt").get<std::string>();
        it.dev_accuracy = j.at("dev_accuracy").get<double>();
        it.accepted = j.at("accepted").get<bool>();
        it.best_accuracy_after = j.at("best_accuracy_after").get<double>();
        it.engine_call_counts = counts_from(j.at("engine_call_counts"));
        for (const auto& f : j.at("item_failures")) {
          it.item_failures.push_back({f.at("item_id").get<std::string>(),
                                      f.at("stage").get<std::string>(),
                                      f.at("message").get<std::string>()});
        }
        if (const auto& r = j.at("rejected_reason"); !r.is_null()) {
          it.rejected_reason = r.get<std::string>();
        }
        if (it.accepted) {
          trace.best_prompt = it.candidate_prompt;
          trace.best_dev_accuracy = it.dev_accuracy;
        }
        trace.iterations.push_back(std::move(it));
      } else if (type == "result") {
        trace.best_prompt = j.at("best_prompt").get<std::string>();
        trace.best_dev_accuracy = j.at("best_dev_accuracy").get<double>();
        trace.stop_reason = stop_reason_from_string(j.at("stop_reason").get<std::string>());
      } else {
        throw FormatError("unknown record type '" + type + "'");
      }
    } catch (const json::exception& e) {
      throw ParseError(line_no, std::string("trace: ") + e.what());
    }
  }
  if (!have_seed) throw FormatError("trace has no seed record");
  return trace;
}

void save_trace(const std::filesystem::path& path, const OptimizationTrace& trace) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << to_jsonl(trace);
  }
  std::filesystem::rename(tmp, path);
}

OptimizationTrace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::string text{std::istreambuf_iterator<char>(in), {}};
  return trace_from_jsonl(text);
}

}  // namespace tgp::optimizer
