#include "tgp/datasets/splits.hpp"

#include <algorithm>
#include <unordered_set>

#include <fmt/format.h>

#include "tgp/error.hpp"
#include "tgp/rng.hpp"

namespace tgp::datasets {
namespace {

std::vector<QAItem> gather(std::span<const QAItem> items, std::vector<std::size_t> idx) {
  std::sort(idx.begin(), idx.end());
  std::vector<QAItem> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(items[i]);
  return out;
}

}  // namespace

Splits make_splits(std::span<const QAItem> items, const SplitSpec& spec) {
  if (spec.protocol != SplitSpec::Protocol::dev_test_rest_train) {
    throw SpecUnsatisfiable("dev_from_train protocol needs a pre-split train/test pair");
  }
  if (!spec.test_size) {
    throw SpecUnsatisfiable("dev_test_rest_train protocol needs test_size");
  }
  const std::size_t n = items.size();
  const std::size_t dev = spec.dev_size;
  const std::size_t test = *spec.test_size;
  if (dev + test > n) {
    throw SpecUnsatisfiable(
        fmt::format("dev_size {} + test_size {} exceeds {} items", dev, test, n));
  }

  SplitMix64 rng(spec.seed);
  const auto perm = partial_shuffle(n, dev + test, rng);
  std::vector<std::size_t> dev_idx(perm.begin(), perm.begin() + dev);
  std::vector<std::size_t> test_idx(perm.begin() + dev, perm.begin() + dev + test);
  std::vector<std::size_t> train_idx(perm.begin() + dev + test, perm.end());

  return {gather(items, std::move(train_idx)), gather(items, std::move(dev_idx)),
          gather(items, std::move(test_idx))};
}

Splits make_splits(const PreSplit& pre, const SplitSpec& spec) {
  if (spec.protocol != SplitSpec::Protocol::dev_from_train) {
    throw SpecUnsatisfiable("dev_test_rest_train protocol takes a single item pool");
  }
  if (spec.test_size && *spec.test_size != pre.test.size()) {
    throw SpecUnsatisfiable(fmt::format("test_size {} does not match the provided test set ({})",
                                        *spec.test_size, pre.test.size()));
  }
  if (spec.dev_size > pre.train.size()) {
    throw SpecUnsatisfiable(fmt::format("dev_size {} exceeds train size {}", spec.dev_size,
                                        pre.train.size()));
  }
  std::unordered_set<std::string> test_ids;
  for (const auto& item : pre.test) test_ids.insert(item.id);
  for (const auto& item : pre.train) {
    if (test_ids.contains(item.id)) {
      throw SpecUnsatisfiable("train and test share id '" + item.id + "'");
    }
  }

  SplitMix64 rng(spec.seed);
  const auto perm = partial_shuffle(pre.train.size(), spec.dev_size, rng);
  std::vector<std::size_t> dev_idx(perm.begin(), perm.begin() + spec.dev_size);
  std::vector<std::size_t> train_idx(perm.begin() + spec.dev_size, perm.end());

  return {gather(pre.train, std::move(train_idx)), gather(pre.train, std::move(dev_idx)),
          pre.test};
}

std::vector<std::string> ids_of(std::span<const QAItem> items) {
  std::vector<std::string> ids;
  ids.reserve(items.size());
  for (const auto& item : items) ids.push_back(item.id);
  return ids;
}

}  // namespace tgp::datasets
