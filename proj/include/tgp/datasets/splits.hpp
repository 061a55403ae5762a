#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tgp/datasets/qa_item.hpp"

namespace tgp::datasets {

struct SplitSpec {
  enum class Protocol {
    dev_from_train,       // train/test given; dev carved out of train
    dev_test_rest_train,  // one pool; dev, then test, sampled; rest is train
  };

  std::size_t dev_size = 50;
  std::optional<std::size_t> test_size;
  std::uint64_t seed = 0;
  Protocol protocol = Protocol::dev_test_rest_train;
};

struct PreSplit {
  std::vector<QAItem> train;
  std::vector<QAItem> test;
};

struct Splits {
  std::vector<QAItem> train;
  std::vector<QAItem> dev;
  std::vector<QAItem> test;
};

/// Protocol dev_test_rest_train. A SplitMix64 stream seeded with `spec.seed`
/// drives one forward Fisher-Yates pass over the input indices: the first
/// dev_size draws form dev, the next test_size draws form test. Every split
/// keeps the input order of its members. Throws SpecUnsatisfiable.
Splits make_splits(std::span<const QAItem> items, const SplitSpec& spec);

/// Protocol dev_from_train: dev drawn from `pre.train` the same way; test
/// passes through unchanged. Throws SpecUnsatisfiable (including when train
/// and test share an id).
Splits make_splits(const PreSplit& pre, const SplitSpec& spec);

std::vector<std::string> ids_of(std::span<const QAItem> items);

}  // namespace tgp::datasets
