// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "mvmt/dataset/embeddings.hpp"
#include "mvmt/dataset/manifest.hpp"
#include "mvmt/dataset/synth.hpp"
#include "mvmt/dataset/waveform_io.hpp"
#include "test_support.hpp"

using namespace mvmt;
using namespace mvmt::data;

namespace {

// Frequency (Hz) of the largest DFT magnitude bin, excluding DC.
double dominant_frequency(std::span<const double> x, double fs) {
  const std::size_t n = x.size();
  double best = -1.0;
  std::size_t best_k = 0;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double w = 2.0 * std::numbers::pi * static_cast<double>(k * t) / static_cast<double>(n);
      re += x[t] * std::cos(w);
      im -= x[t] * std::sin(w);
    }
    const double mag = re * re + im * im;
    if (mag > best) {
      best = mag;
      best_k = k;
    }
  }
  return static_cast<double>(best_k) * fs / static_cast<double>(n);
}

}  // namespace

TEST(Synth, CountsAndDualLabels) {
  const auto recs = synth_dataset({4, 1, true, 10.0});
  EXPECT_EQ(recs.size(), 22u);
  std::size_t duals = 0;
  for (const auto& r : recs) {
    EXPECT_GE(r.meta.labels.count(), 1u);
    if (r.meta.labels.count() == 2) ++duals;
    EXPECT_EQ(r.embedding.size(), kEmbeddingDim);
    EXPECT_FALSE(r.meta.note_text.empty());
  }
  EXPECT_EQ(duals, 2u);
  EXPECT_EQ(dual_label_count(1), 1u);
  EXPECT_EQ(dual_label_count(10), 5u);
}

TEST(Synth, Deterministic) {
  const auto a = synth_dataset({3, 9, true, 10.0});
  const auto b = synth_dataset({3, 9, true, 10.0});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].meta.record_id, b[i].meta.record_id);
    EXPECT_EQ(a[i].meta.note_text, b[i].meta.note_text);
    EXPECT_TRUE(std::equal(a[i].waveform.samples().begin(), a[i].waveform.samples().end(),
                           b[i].waveform.samples().begin()));
    EXPECT_EQ(a[i].embedding, b[i].embedding);
  }
  const auto c = synth_dataset({3, 10, true, 10.0});
  EXPECT_NE(c[0].embedding, a[0].embedding);
}

TEST(Synth, ClassSignaturesPeakAtDeclaredFrequencies) {
  const auto recs = synth_dataset({2, 4, true, 10.0});
  for (const auto& r : recs) {
    if (r.meta.labels.count() != 1) continue;
    std::size_t cls = 0;
    while (!r.meta.labels.test(cls)) ++cls;
    for (std::size_t lead : {0u, 7u}) {
      EXPECT_NEAR(dominant_frequency(r.waveform.lead(lead), sigproc::kSampleRateHz), kClassFrequencyHz[cls], 1e-9)
          << r.meta.record_id << " lead " << lead;
    }
  }
}

TEST(Synth, InformativeEmbeddingsClusterByClass) {
  const auto recs = synth_dataset({3, 2, true, 10.0});
  auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };
  // records 0..2 are NORM, 3..5 MI
  EXPECT_GT(dot(recs[0].embedding, recs[1].embedding), 0.9);
  EXPECT_LT(std::abs(dot(recs[0].embedding, recs[3].embedding)), 0.2);
}

TEST(Synth, WritesLoadableDirectory) {
  const auto dir = mvmt::testing::scratch_dir("synth_dir");
  const auto recs = synth_dataset({1, 5, true, 10.0});
  write_synth_dataset(recs, dir);
  const auto manifest = read_manifest(dir / "manifest.csv");
  ASSERT_EQ(manifest.size(), recs.size());
  const auto table = load_embeddings(dir / "embeddings.bin");
  for (const auto& m : manifest) {
    const auto raw = read_raw_waveform(resolve_waveform(dir / "manifest.csv", m.waveform_path), m.record_id);
    EXPECT_EQ(raw.samples().size(), 12000u);
    EXPECT_EQ(table.count(m.record_id), 1u);
  }
}
