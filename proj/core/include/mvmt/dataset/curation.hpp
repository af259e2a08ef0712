// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mvmt/dataset/labels.hpp"
#include "mvmt/dataset/records.hpp"

namespace mvmt::data {

/// Keeps records whose note is nonempty after trimming whitespace.
std::vector<RecordMeta> drop_blank_reports(std::vector<RecordMeta> records);

/// Caps the number of records carrying each class at `per_class_cap`.
///
/// Records are visited in a seeded random order and kept while every class
/// they carry is still under the cap, so multi-label records count toward
/// all of their classes and are never duplicated. Output keeps input order.
std::vector<RecordMeta> balance_undersample(const std::vector<RecordMeta>& records, std::size_t per_class_cap,
                                            std::uint64_t seed);

std::array<std::size_t, kNumClasses> class_counts(std::span<const RecordMeta> records);

struct SplitSpec {
  double train_fraction = 0.8;
  double val_fraction = 0.1;
  double test_fraction = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SplitIndices {
  std::vector<std::size_t> train, val, test;
};

/// Seeded shuffle of [0, n), then contiguous partition: round(n·train) and
/// round(n·val) items, test gets the rest. Any empty part is a ContractError.
SplitIndices split_indices(std::size_t n, const SplitSpec& spec);

template <typename T>
struct Splits {
  std::vector<T> train, val, test;
};

template <typename T>
Splits<T> split(const std::vector<T>& items, const SplitSpec& spec) {
  const auto idx = split_indices(items.size(), spec);
  Splits<T> out;
  for (auto i : idx.train) out.train.push_back(items[i]);
  for (auto i : idx.val) out.val.push_back(items[i]);
  for (auto i : idx.test) out.test.push_back(items[i]);
  return out;
}

/// FNV-1a over the ordered ids; identifies a split for cross-run checks.
std::uint64_t split_hash(std::span<const std::string> ids);

}  // namespace mvmt::data
