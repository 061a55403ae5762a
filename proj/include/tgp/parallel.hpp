#pragma once

#include <omp.h>

#include <algorithm>
#include <cstddef>
#include <exception>
#include <optional>
#include <utility>
#include <vector>

namespace tgp {

/// How per-item fan-out runs. `serial` is the reference path the parallel
/// kernels are tested against.
enum class Execution { serial, parallel };

/// Result slot for one item: a value or the exception its task threw.
template <class T>
struct Outcome {
  std::optional<T> value;
  std::exception_ptr error;

  bool ok() const { return value.has_value(); }
};

/// Applies `fn(i)` for every i in [0, n) and returns the outcomes in index
/// order. Exceptions are captured per slot and never escape the parallel
/// region. `max_threads` bounds simultaneous tasks.
template <class T, class Fn>
std::vector<Outcome<T>> map_indices(std::size_t n, std::size_t max_threads,
                                    Execution exec, Fn&& fn) {
  std::vector<Outcome<T>> out(n);
  auto run_one = [&](std::size_t i) {
    try {
      out[i].value.emplace(fn(i));
    } catch (...) {
      out[i].error = std::current_exception();
    }
  };

  if (exec == Execution::serial || n <= 1 || max_threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) run_one(i);
    return out;
  }

  const int threads = static_cast<int>(std::min(max_threads, n));
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long long i = 0; i < count; ++i) {
    run_one(static_cast<std::size_t>(i));
  }
  return out;
}

}  // namespace tgp
