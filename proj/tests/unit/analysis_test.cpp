// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "mvmt/analysis/heatmap.hpp"
#include "mvmt/analysis/similarity.hpp"
#include "mvmt/error.hpp"
#include "test_support.hpp"

using namespace mvmt;
using namespace mvmt::analysis;
using ad::Tensor;
using mvmt::testing::random_tensor;

namespace {

Tensor identity(std::size_t n) {
  Tensor t = Tensor::zeros({n, n});
  for (std::size_t i = 0; i < n; ++i) t.mutable_data()[i * n + i] = 1.0;
  return t;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(Heatmap, IdentityAttentionReproducesInput) {
  const Tensor ecg = random_tensor({12, 10}, 1);
  const auto h = heatmap_from_attention(ecg, pool_heads({identity(10), identity(10)}));
  ASSERT_EQ(h.rows, 12u);
  ASSERT_EQ(h.cols, 10u);
  for (std::size_t i = 0; i < ecg.size(); ++i) EXPECT_EQ(h.values[i], ecg[i]);
}

TEST(Heatmap, UniformAttentionGivesLeadMeans) {
  const Tensor ecg = random_tensor({12, 8}, 2);
  const auto h = heatmap_from_attention(ecg, Tensor::full({8, 8}, 1.0 / 8.0));
  for (std::size_t r = 0; r < 12; ++r) {
    double mean = 0.0;
    for (std::size_t c = 0; c < 8; ++c) mean += ecg[r * 8 + c];
    mean /= 8.0;
    for (std::size_t c = 0; c < 8; ++c) EXPECT_NEAR(h.at(r, c), mean, 1e-15);
  }
}

TEST(Heatmap, PooledHeadsOfModelAreRowStochastic) {
  const model::ModelConfig c = model::tiny_config();
  const model::Mvmtnet net(c, 3);
  model::ForwardTrace trace;
  net.predict(random_tensor({12, 16}, 4), random_tensor({768}, 5), &trace);
  const Tensor pooled = pool_heads(trace.encoder_attention.front());
  for (std::size_t r = 0; r < 16; ++r) {
    double s = 0.0;
    for (std::size_t col = 0; col < 16; ++col) s += pooled[r * 16 + col];
    EXPECT_NEAR(s, 1.0, 1e-10);
  }
  const auto h = attention_heatmap(net, random_tensor({12, 16}, 4), random_tensor({768}, 5), 0, "rec");
  EXPECT_EQ(h.record_id, "rec");
  EXPECT_EQ(h.rows, 12u);
  EXPECT_THROW(attention_heatmap(net, random_tensor({12, 16}, 4), random_tensor({768}, 5), 1), ContractError);
}

TEST(Heatmap, PerLeadModelUsesMultivariateLayer) {
  model::ModelConfig c = model::tiny_config();
  c.per_lead_encoders = true;
  c.d_model = 24;
  c.n_heads = 12;
  c.feedforward_dim = 48;
  const model::Mvmtnet net(c, 6);
  const auto h = attention_heatmap(net, random_tensor({12, 16}, 7), random_tensor({768}, 8), 0);
  EXPECT_EQ(h.cols, 16u);
  EXPECT_THROW(attention_heatmap(net, random_tensor({12, 16}, 7), random_tensor({768}, 8), 1), ContractError);
}

TEST(Heatmap, CsvAndPgmExport) {
  HeatmapMatrix h{"r", 0, 2, 3, {0.0, 0.5, 1.0, 2.0, 2.0, 2.0}};
  const auto csv = heatmap_csv(h);
  EXPECT_EQ(csv, "0.000000,0.500000,1.000000\n2.000000,2.000000,2.000000\n");
  const auto pgm = heatmap_pgm(h);
  const std::string header = "P5\n3 2\n255\n";
  ASSERT_EQ(pgm.size(), header.size() + 6);
  EXPECT_EQ(pgm.substr(0, header.size()), header);
  const auto* px = reinterpret_cast<const unsigned char*>(pgm.data() + header.size());
  EXPECT_EQ(px[0], 0);
  EXPECT_EQ(px[2], 255);
  EXPECT_EQ(px[3], 128);
  EXPECT_EQ(px[5], 128);

  const auto dir = mvmt::testing::scratch_dir("heatmap");
  export_heatmap(h, dir / "map");
  EXPECT_EQ(slurp(dir / "map.csv"), csv);
  EXPECT_EQ(slurp(dir / "map.pgm"), pgm);
  // CSV parses back to the same values at 6 decimals.
  std::istringstream in(slurp(dir / "map.csv"));
  std::string line;
  std::size_t i = 0;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) EXPECT_NEAR(std::stod(cell), h.values[i++], 5e-7);
  }
  EXPECT_EQ(i, 6u);
}

TEST(Similarity, ParallelOrthogonalAntiParallel) {
  const std::vector<double> a{1.0, 2.0, -3.0}, twice{2.0, 4.0, -6.0}, neg{-3.0, -6.0, 9.0}, orth{2.0, -1.0, 0.0};
  EXPECT_EQ(cosine_similarity(a, twice).value, 1.0);
  EXPECT_EQ(cosine_similarity(a, neg).value, -1.0);
  EXPECT_EQ(cosine_similarity(a, orth).value, 0.0);
  const auto zero = cosine_similarity(a, std::vector<double>(3, 0.0));
  EXPECT_TRUE(zero.degenerate);
  EXPECT_EQ(zero.value, 0.0);
  const auto sims = head_pool_similarity({twice, neg, orth}, a);
  ASSERT_EQ(sims.size(), 3u);
  EXPECT_EQ(sims[0].value, 1.0);
  EXPECT_EQ(sims[1].value, -1.0);
  EXPECT_EQ(sims[2].value, 0.0);
  EXPECT_THROW(cosine_similarity(a, std::vector<double>{1.0}), ShapeError);
}

TEST(Similarity, HistoryExport) {
  const auto dir = mvmt::testing::scratch_dir("history_export");
  export_history({{1, 0.5, 0.6, 0.3, 0.4}, {2, 0.4, 0.5, 0.2, 0.3}}, dir / "hist");
  EXPECT_TRUE(std::filesystem::exists(dir / "hist.csv"));
  for (const char* curve : {"train_loss", "val_loss", "train_error", "val_error"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / (std::string("hist_") + curve + ".dat"))) << curve;
  }
  const auto dat = slurp(dir / "hist_val_error.dat");
  EXPECT_NE(dat.find("2 0.3"), std::string::npos) << dat;
}
