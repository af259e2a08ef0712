// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "mvmt/dataset/curation.hpp"
#include "mvmt/error.hpp"

using namespace mvmt;
using namespace mvmt::data;

namespace {

RecordMeta rec(std::string id, std::uint8_t mask, std::string note = "note") {
  return RecordMeta{std::move(id), LabelVector::from_mask(mask), std::move(note), "w.f32"};
}

std::vector<std::string> ids(const std::vector<RecordMeta>& r) {
  std::vector<std::string> out;
  for (const auto& m : r) out.push_back(m.record_id);
  return out;
}

}  // namespace

TEST(Curation, DropsBlankAndWhitespaceReports) {
  const auto kept = drop_blank_reports({rec("a", 1, ""), rec("b", 1, "   \t\n"), rec("c", 1, "sinus rhythm.")});
  EXPECT_EQ(ids(kept), (std::vector<std::string>{"c"}));
}

TEST(Curation, UndersamplingCapsSingleClass) {
  std::vector<RecordMeta> records;
  for (int i = 0; i < 10000; ++i) records.push_back(rec("n" + std::to_string(i), 1));
  for (int i = 0; i < 30; ++i) records.push_back(rec("m" + std::to_string(i), 2));
  const auto out = balance_undersample(records, 2500, 3);
  const auto counts = class_counts(out);
  EXPECT_EQ(counts[0], 2500u);
  EXPECT_EQ(counts[1], 30u);
}

TEST(Curation, UndersamplingIsIdentityUnderCapAndDeterministic) {
  std::vector<RecordMeta> records;
  for (int i = 0; i < 50; ++i) records.push_back(rec("r" + std::to_string(i), static_cast<std::uint8_t>(1 + i % 31)));
  EXPECT_EQ(ids(balance_undersample(records, 1000, 1)), ids(records));
  const auto a = balance_undersample(records, 7, 42);
  const auto b = balance_undersample(records, 7, 42);
  EXPECT_EQ(ids(a), ids(b));
  EXPECT_THROW(balance_undersample(records, 0, 1), ContractError);
}

TEST(Curation, MultiLabelRecordsCountForEveryClassAndStayOrdered) {
  std::vector<RecordMeta> records;
  for (int i = 0; i < 400; ++i) {
    const std::uint8_t mask = i % 3 == 0 ? 0b00011 : (i % 3 == 1 ? 0b00001 : 0b10100);
    records.push_back(rec("r" + std::to_string(i), mask));
  }
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto out = balance_undersample(records, 60, seed);
    for (auto c : class_counts(out)) EXPECT_LE(c, 60u);
    const auto got = ids(out);
    std::set<std::string> unique(got.begin(), got.end());
    EXPECT_EQ(unique.size(), got.size());
    // Output preserves input order.
    std::vector<std::size_t> positions;
    for (const auto& id : got) positions.push_back(std::stoul(id.substr(1)));
    EXPECT_TRUE(std::is_sorted(positions.begin(), positions.end()));
  }
}

TEST(Split, SizesAndPartitionLaw) {
  const auto idx = split_indices(10, SplitSpec{0.8, 0.1, 0.1, 5});
  EXPECT_EQ(idx.train.size(), 8u);
  EXPECT_EQ(idx.val.size(), 1u);
  EXPECT_EQ(idx.test.size(), 1u);
  std::vector<std::size_t> all;
  for (const auto* part : {&idx.train, &idx.val, &idx.test}) all.insert(all.end(), part->begin(), part->end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(all[i], i);
  const auto again = split_indices(10, SplitSpec{0.8, 0.1, 0.1, 5});
  EXPECT_EQ(again.train, idx.train);
  EXPECT_EQ(again.test, idx.test);
}

TEST(Split, Errors) {
  EXPECT_THROW(split_indices(3, SplitSpec{0.8, 0.1, 0.1, 0}), ContractError);
  EXPECT_THROW(split_indices(100, SplitSpec{0.8, 0.1, 0.2, 0}), ContractError);
  EXPECT_THROW(split_indices(100, SplitSpec{1.0, 0.0, 0.0, 0}), ContractError);
}

TEST(Split, HashDependsOnOrderAndContent) {
  const std::vector<std::string> a{"x", "y"}, b{"y", "x"}, c{"xy"};
  EXPECT_NE(split_hash(a), split_hash(b));
  EXPECT_NE(split_hash(a), split_hash(c));
  EXPECT_EQ(split_hash(a), split_hash(std::vector<std::string>{"x", "y"}));
}
