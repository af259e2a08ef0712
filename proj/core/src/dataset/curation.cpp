// SPDX-License-Identifier: Apache-2.0
#include "mvmt/dataset/curation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "mvmt/error.hpp"
#include "mvmt/random.hpp"

namespace mvmt::data {

std::vector<RecordMeta> drop_blank_reports(std::vector<RecordMeta> records) {
  std::erase_if(records, [](const RecordMeta& r) {
    return std::all_of(r.note_text.begin(), r.note_text.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
  });
  return records;
}

std::vector<RecordMeta> balance_undersample(const std::vector<RecordMeta>& records, std::size_t per_class_cap,
                                            std::uint64_t seed) {
  if (per_class_cap < 1) throw ContractError("balance_undersample: per-class cap must be at least 1");
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order.begin(), order.end());

  std::array<std::size_t, kNumClasses> counts{};
  std::vector<bool> keep(records.size(), false);
  for (auto i : order) {
    const auto& labels = records[i].labels;
    bool fits = true;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      if (labels.test(c) && counts[c] >= per_class_cap) fits = false;
    }
    if (!fits) continue;
    keep[i] = true;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      if (labels.test(c)) ++counts[c];
    }
  }
  std::vector<RecordMeta> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (keep[i]) out.push_back(records[i]);
  }
  return out;
}

std::array<std::size_t, kNumClasses> class_counts(std::span<const RecordMeta> records) {
  std::array<std::size_t, kNumClasses> counts{};
  for (const auto& r : records) {
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      if (r.labels.test(c)) ++counts[c];
    }
  }
  return counts;
}

void SplitSpec::validate() const {
  if (!(train_fraction > 0.0 && val_fraction > 0.0 && test_fraction > 0.0)) {
    throw ContractError("split fractions must all be positive");
  }
  if (std::abs(train_fraction + val_fraction + test_fraction - 1.0) > 1e-9) {
    throw ContractError("split fractions must sum to 1");
  }
}

SplitIndices split_indices(std::size_t n, const SplitSpec& spec) {
  spec.validate();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(spec.seed);
  rng.shuffle(order.begin(), order.end());
  const auto n_train = static_cast<std::size_t>(std::lround(static_cast<double>(n) * spec.train_fraction));
  const auto n_val = static_cast<std::size_t>(std::lround(static_cast<double>(n) * spec.val_fraction));
  if (n_train == 0 || n_val == 0 || n_train + n_val >= n) {
    throw ContractError("split of " + std::to_string(n) + " records leaves an empty partition");
  }
  SplitIndices out;
  out.train.assign(order.begin(), order.begin() + static_cast<long>(n_train));
  out.val.assign(order.begin() + static_cast<long>(n_train), order.begin() + static_cast<long>(n_train + n_val));
  out.test.assign(order.begin() + static_cast<long>(n_train + n_val), order.end());
  return out;
}

std::uint64_t split_hash(std::span<const std::string> ids) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& id : ids) {
    for (unsigned char c : id) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xFF;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace mvmt::data
