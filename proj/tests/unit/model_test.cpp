// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "mvmt/autodiff/gradcheck.hpp"
#include "mvmt/error.hpp"
#include "mvmt/model/mvmtnet.hpp"
#include "mvmt/training/loss.hpp"
#include "test_support.hpp"

using namespace mvmt;
using namespace mvmt::model;
using ad::Shape;
using mvmt::testing::random_tensor;

namespace {

AttentionParams random_attention(std::size_t d, std::uint64_t seed) {
  auto lin = [&](std::uint64_t s) { return Linear{random_tensor({d, d}, seed + s), random_tensor({d}, seed + s + 100)}; };
  return {lin(1), lin(2), lin(3), lin(4)};
}

// Row-major L×d matrix helpers for the loop oracle.
std::vector<double> project(const std::vector<double>& x, std::size_t rows, const Linear& p) {
  const std::size_t in = p.weight.dim(0), out = p.weight.dim(1);
  std::vector<double> y(rows * out);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t o = 0; o < out; ++o) {
      double acc = p.bias[o];
      for (std::size_t i = 0; i < in; ++i) acc += x[r * in + i] * p.weight[i * out + o];
      y[r * out + o] = acc;
    }
  return y;
}

std::vector<double> attention_oracle(const Tensor& q, const Tensor& kv, const AttentionParams& p, std::size_t heads) {
  const std::size_t lq = q.dim(0), lk = kv.dim(0), d = q.dim(1), dh = d / heads;
  const std::vector<double> qv(q.data().begin(), q.data().end()), kvv(kv.data().begin(), kv.data().end());
  const auto Q = project(qv, lq, p.query), K = project(kvv, lk, p.key), V = project(kvv, lk, p.value);
  std::vector<double> joined(lq * d, 0.0);
  for (std::size_t h = 0; h < heads; ++h) {
    for (std::size_t i = 0; i < lq; ++i) {
      std::vector<double> s(lk);
      double mx = -1e300;
      for (std::size_t j = 0; j < lk; ++j) {
        double acc = 0.0;
        for (std::size_t c = 0; c < dh; ++c) acc += Q[i * d + h * dh + c] * K[j * d + h * dh + c];
        s[j] = acc / std::sqrt(static_cast<double>(dh));
        mx = std::max(mx, s[j]);
      }
      double z = 0.0;
      for (auto& v : s) z += (v = std::exp(v - mx));
      for (std::size_t j = 0; j < lk; ++j)
        for (std::size_t c = 0; c < dh; ++c) joined[i * d + h * dh + c] += s[j] / z * V[j * d + h * dh + c];
    }
  }
  return project(joined, lq, p.output);
}

ModelConfig per_lead_config() {
  ModelConfig c = tiny_config();
  c.per_lead_encoders = true;
  c.d_model = 24;
  c.n_heads = 12;
  c.feedforward_dim = 48;
  return c;
}

void expect_row_stochastic(const Tensor& a) {
  ASSERT_EQ(a.rank(), 2u);
  for (std::size_t r = 0; r < a.dim(0); ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < a.dim(1); ++c) {
      EXPECT_GE(a[r * a.dim(1) + c], 0.0);
      s += a[r * a.dim(1) + c];
    }
    EXPECT_NEAR(s, 1.0, 1e-10);
  }
}

Tensor ecg_for(const ModelConfig& c, std::uint64_t seed) { return random_tensor({c.n_leads, c.seq_len}, seed, -2.0, 2.0); }
Tensor notes_for(const ModelConfig& c, std::uint64_t seed) { return random_tensor({c.notes_dim}, seed, -0.1, 0.1); }

}  // namespace

TEST(ModelConfig, DefaultsAndValidation) {
  const ModelConfig c;
  EXPECT_EQ(c.d_model, 120u);
  EXPECT_EQ(c.n_heads, 12u);
  EXPECT_EQ(c.head_dim(), 10u);
  EXPECT_EQ(c.n_encoder_layers, 6u);
  EXPECT_EQ(c.feedforward_dim, 480u);
  EXPECT_DOUBLE_EQ(c.dropout, 0.2);
  EXPECT_NO_THROW(c.validate());
  ModelConfig bad = c;
  bad.n_heads = 7;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = c;
  bad.per_lead_encoders = true;
  bad.n_heads = 10;
  EXPECT_THROW(bad.validate(), ConfigError);
  EXPECT_THROW(parse_fusion_mode("late"), ConfigError);
  ModelConfig kv;
  for (const auto& [k, v] : per_lead_config().to_kv()) EXPECT_TRUE(kv.set(k, v)) << k;
  EXPECT_EQ(kv.to_kv(), per_lead_config().to_kv());
  EXPECT_FALSE(kv.set("nonsense", "1"));
}

TEST(Condense, ZeroInputGivesZeroOutput) {
  Tape tape(false);
  CondenseParams p{random_tensor({1, 1, 12, 1}, 1), Tensor::zeros({1}), Linear{random_tensor({1, 8}, 2), Tensor::zeros({8})}};
  const Tensor y = condense_leads(tape, Tensor::zeros({12, 16}), p);
  EXPECT_EQ(y.shape(), (Shape{16, 8}));
  for (double v : y.data()) EXPECT_EQ(v, 0.0);
}

TEST(Condense, OneHotKernelSelectsLead) {
  Tape tape(false);
  Tensor kernel = Tensor::zeros({1, 1, 12, 1});
  kernel.mutable_data()[3] = 1.0;
  Tensor token = Tensor::zeros({1, 8});
  token.mutable_data()[0] = 1.0;
  CondenseParams p{kernel, Tensor::zeros({1}), Linear{token, Tensor::zeros({8})}};
  const Tensor x = random_tensor({12, 16}, 3);
  const Tensor y = condense_leads(tape, x, p);
  for (std::size_t t = 0; t < 16; ++t) {
    EXPECT_EQ(y[t * 8], x[3 * 16 + t]);
    EXPECT_EQ(y[t * 8 + 1], 0.0);
  }
  EXPECT_THROW(condense_leads(tape, Tensor::zeros({11, 16}), p), ShapeError);
}

TEST(PositionalEncoding, KnownValues) {
  const Tensor pe = positional_encoding(250, 120);
  for (std::size_t j = 0; j < 120; ++j) EXPECT_EQ(pe[j], j % 2 == 0 ? 0.0 : 1.0);
  EXPECT_NEAR(pe[5 * 120 + 2], std::sin(5.0 / std::pow(10000.0, 2.0 / 120.0)), 1e-15);
  EXPECT_NEAR(pe[5 * 120 + 3], std::cos(5.0 / std::pow(10000.0, 2.0 / 120.0)), 1e-15);
  for (double v : pe.data()) EXPECT_LE(std::abs(v), 1.0);
  const Tensor again = positional_encoding(250, 120);
  EXPECT_TRUE(std::equal(pe.data().begin(), pe.data().end(), again.data().begin()));
}

TEST(Attention, MatchesPerHeadLoopOracle) {
  Tape tape(false);
  const auto p = random_attention(8, 10);
  const Tensor q = random_tensor({4, 8}, 20), kv = random_tensor({5, 8}, 21);
  for (std::size_t heads : {1u, 2u, 4u}) {
    std::vector<Tensor> weights;
    const Tensor y = multi_head_attention(tape, q, kv, kv, p, heads, &weights);
    EXPECT_LT(mvmt::testing::max_abs_diff(y.data(), attention_oracle(q, kv, p, heads)), 1e-10);
    ASSERT_EQ(weights.size(), heads);
    for (const auto& w : weights) {
      EXPECT_EQ(w.shape(), (Shape{4, 5}));
      expect_row_stochastic(w);
    }
  }
}

TEST(Attention, SingleTokenAndIdenticalKeys) {
  Tape tape(false);
  const auto p = random_attention(4, 30);
  const Tensor v = random_tensor({1, 4}, 31);
  std::vector<Tensor> w;
  const Tensor y = multi_head_attention(tape, v, v, v, p, 2, &w);
  for (const auto& m : w) EXPECT_EQ(m[0], 1.0);
  const Tensor direct = linear(tape, linear(tape, v, p.value), p.output);
  EXPECT_LT(mvmt::testing::max_abs_diff(y.data(), direct.data()), 1e-14);

  const Tensor row = random_tensor({4}, 32);
  const Tensor keys = ad::broadcast_rows(tape, row, 6);
  w.clear();
  multi_head_attention(tape, random_tensor({3, 4}, 33), keys, keys, p, 2, &w);
  for (const auto& m : w)
    for (double e : m.data()) EXPECT_NEAR(e, 1.0 / 6.0, 1e-15);
  EXPECT_THROW(multi_head_attention(tape, v, v, v, p, 3), ShapeError);
}

TEST(NotesAdapt, BroadcastsOneRow) {
  Tape tape(false);
  const Linear p{random_tensor({768, 8}, 40), random_tensor({8}, 41)};
  const Tensor block = notes_adapt(tape, random_tensor({768}, 42), p, 16);
  EXPECT_EQ(block.shape(), (Shape{16, 8}));
  for (std::size_t r = 1; r < 16; ++r)
    for (std::size_t c = 0; c < 8; ++c) EXPECT_EQ(block[r * 8 + c], block[c]);
  const Tensor zero = notes_adapt(tape, Tensor::zeros({768}), Linear{p.weight, Tensor::zeros({8})}, 16);
  for (double v : zero.data()) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(notes_adapt(tape, Tensor::zeros({767}), p, 16), ShapeError);
}

TEST(Decoder, LaterStagesReadPreviousOutputPlusNotes) {
  Rng rng(50);
  ParamFactory f(rng);
  std::vector<DecoderLayerParams> layers{f.decoder_layer("a", 8, 16), f.decoder_layer("b", 8, 16)};
  Tape tape(false);
  const Context ctx{tape};
  const Tensor enc = random_tensor({6, 8}, 51), notes = random_tensor({6, 8}, 52);
  DecoderWeights weights;
  const Tensor both = decoder_forward(ctx, enc, notes, layers, 2, 1e-5, &weights);
  const Tensor first = decoder_forward(ctx, enc, notes, {layers[0]}, 2, 1e-5);
  const Tensor second = decoder_forward(ctx, enc, ad::add(tape, first, notes), {layers[1]}, 2, 1e-5);
  EXPECT_LT(mvmt::testing::max_abs_diff(both.data(), second.data()), 1e-13);
  ASSERT_EQ(weights.cross_attention.size(), 2u);
  for (const auto& layer : weights.cross_attention)
    for (const auto& w : layer) expect_row_stochastic(w);
}

TEST(ResidualMerge, ZeroDecoderGivesNormalizedTransform) {
  Tape tape(false);
  const Linear merge{random_tensor({12, 8}, 60), random_tensor({8}, 61)};
  const Norm n{Tensor::full({8}, 1.0), Tensor::zeros({8})};
  const Tensor raw = random_tensor({12, 16}, 62);
  const Tensor y = residual_merge(tape, raw, Tensor::zeros({16, 8}), merge, n, 1e-5);
  const Tensor expect = norm(tape, linear(tape, ad::transpose(tape, raw), merge), n, 1e-5);
  EXPECT_EQ(std::vector<double>(y.data().begin(), y.data().end()),
            std::vector<double>(expect.data().begin(), expect.data().end()));
  for (std::size_t r = 0; r < 16; ++r) {
    double m = 0.0;
    for (std::size_t c = 0; c < 8; ++c) m += y[r * 8 + c];
    EXPECT_NEAR(m / 8.0, 0.0, 1e-12);
  }
  EXPECT_THROW(residual_merge(tape, raw, Tensor::zeros({15, 8}), merge, n, 1e-5), ShapeError);
}

TEST(Mvmtnet, ReferenceConfigShapes) {
  const ModelConfig c;
  const Mvmtnet net(c, 1);
  ForwardTrace trace;
  const auto probs = net.predict(ecg_for(c, 2), notes_for(c, 3), &trace);
  const std::vector<std::pair<std::string, Shape>> expected{
      {"input", {12, 250}},        {"tokens", {250, 120}},          {"positional", {250, 120}},
      {"encoder", {250, 120}},     {"notes_block", {250, 120}},     {"decoder", {250, 120}},
      {"merged", {250, 120}},      {"classifier.conv0", {4, 125, 60}}, {"classifier.conv1", {8, 62, 30}},
      {"classifier.conv2", {8, 31, 15}}, {"classifier.dense0", {1, 256}}, {"classifier.dense1", {1, 64}},
      {"classifier.dense2", {1, 5}}, {"logits", {1, 5}},             {"probabilities", {5}}};
  for (const auto& [name, shape] : expected) {
    const Shape* got = trace.shape_of(name);
    ASSERT_NE(got, nullptr) << name;
    EXPECT_EQ(*got, shape) << name;
  }
  ASSERT_EQ(trace.encoder_attention.size(), 6u);
  for (const auto& layer : trace.encoder_attention) {
    ASSERT_EQ(layer.size(), 12u);
    for (const auto& w : layer) expect_row_stochastic(w);
  }
  ASSERT_EQ(trace.decoder_attention.cross_attention.size(), 6u);
  EXPECT_EQ(trace.decoder_attention.cross_attention[5][11].shape(), (Shape{250, 250}));
  ASSERT_EQ(probs.size(), 5u);
  for (double p : probs) {
    EXPECT_GT(p, 0.0);
    EXPECT_LT(p, 1.0);
  }
}

TEST(Mvmtnet, EvalIsPureAndTrainUsesDropout) {
  const ModelConfig c = tiny_config();
  const Mvmtnet net(c, 4);
  const Tensor ecg = ecg_for(c, 5), notes = notes_for(c, 6);
  EXPECT_EQ(net.predict(ecg, notes), net.predict(ecg, notes));
  Tape tape(false);
  Rng r1(1), r2(2);
  const Tensor a = net.forward(tape, ecg, notes, true, &r1);
  const Tensor b = net.forward(tape, ecg, notes, true, &r2);
  EXPECT_NE(std::vector<double>(a.data().begin(), a.data().end()), std::vector<double>(b.data().begin(), b.data().end()));
  EXPECT_THROW(net.forward(tape, ecg, notes, true, nullptr), ContractError);
}

TEST(Mvmtnet, SameSeedSameParameters) {
  const Mvmtnet a(tiny_config(), 9), b(tiny_config(), 9), c(tiny_config(), 10);
  ASSERT_EQ(a.parameters().size(), b.parameters().size());
  bool differs = false;
  for (std::size_t i = 0; i < a.parameters().size(); ++i) {
    EXPECT_EQ(a.parameters()[i].name, b.parameters()[i].name);
    EXPECT_TRUE(std::equal(a.parameters()[i].tensor.data().begin(), a.parameters()[i].tensor.data().end(),
                           b.parameters()[i].tensor.data().begin()));
    differs |= !std::equal(a.parameters()[i].tensor.data().begin(), a.parameters()[i].tensor.data().end(),
                           c.parameters()[i].tensor.data().begin());
  }
  EXPECT_TRUE(differs);
  const Mvmtnet copy = a.clone();
  EXPECT_FALSE(copy.parameters()[0].tensor.same_storage(a.parameters()[0].tensor));
  EXPECT_EQ(copy.predict(ecg_for(a.config(), 1), notes_for(a.config(), 1)),
            a.predict(ecg_for(a.config(), 1), notes_for(a.config(), 1)));
}

TEST(Mvmtnet, FusionModes) {
  for (auto mode : {FusionMode::cross_attention, FusionMode::early_concat, FusionMode::early_sum,
                    FusionMode::waveform_only}) {
    ModelConfig c = tiny_config();
    c.fusion_mode = mode;
    const Mvmtnet net(c, 11);
    const Tensor ecg = ecg_for(c, 12);
    const auto p1 = net.predict(ecg, notes_for(c, 13));
    const auto p2 = net.predict(ecg, notes_for(c, 14));
    EXPECT_EQ(p1.size(), 5u) << to_string(mode);
    bool has_notes = false, has_decoder = false;
    for (const auto& p : net.parameters()) {
      has_notes |= p.name.starts_with("notes.");
      has_decoder |= p.name.starts_with("decoder");
    }
    EXPECT_EQ(has_notes, mode != FusionMode::waveform_only);
    EXPECT_EQ(has_decoder, mode == FusionMode::cross_attention || mode == FusionMode::waveform_only);
    if (mode == FusionMode::waveform_only) {
      EXPECT_EQ(p1, p2);
      EXPECT_EQ(net.predict(ecg, Tensor()), p1);
    } else {
      EXPECT_NE(p1, p2) << to_string(mode);
      EXPECT_THROW(net.predict(ecg, Tensor()), ShapeError);
    }
  }
}

TEST(Mvmtnet, ClassPermutationPermutesOutputs) {
  const ModelConfig c = tiny_config();
  Mvmtnet net(c, 15);
  const Tensor ecg = ecg_for(c, 16), notes = notes_for(c, 17);
  const auto before = net.predict(ecg, notes);
  const std::array<std::size_t, 5> perm{3, 0, 4, 1, 2};
  auto& dense = net.params().classifier.dense[2];
  const std::size_t in = dense.weight.dim(0);
  const auto w = dense.weight.clone(), b = dense.bias.clone();
  for (std::size_t k = 0; k < 5; ++k) {
    for (std::size_t i = 0; i < in; ++i) dense.weight.mutable_data()[i * 5 + k] = w[i * 5 + perm[k]];
    dense.bias.mutable_data()[k] = b[perm[k]];
  }
  const auto after = net.predict(ecg, notes);
  for (std::size_t k = 0; k < 5; ++k) EXPECT_EQ(after[k], before[perm[k]]);
}

TEST(Mvmtnet, RaisingClassBiasRaisesOnlyThatProbability) {
  const ModelConfig c = tiny_config();
  Mvmtnet net(c, 18);
  const Tensor ecg = ecg_for(c, 19), notes = notes_for(c, 20);
  const auto before = net.predict(ecg, notes);
  net.params().classifier.dense[2].bias.mutable_data()[2] += 0.5;
  const auto after = net.predict(ecg, notes);
  for (std::size_t k = 0; k < 5; ++k) {
    if (k == 2) EXPECT_GT(after[k], before[k]);
    else EXPECT_EQ(after[k], before[k]);
  }
}

TEST(PerLead, ShapesAndErrors) {
  const ModelConfig c = per_lead_config();
  const Mvmtnet net(c, 21);
  Tape tape(false);
  ForwardTrace trace;
  const Tensor p = net.forward_per_lead(tape, ecg_for(c, 22), notes_for(c, 23), false, nullptr, &trace);
  EXPECT_EQ(p.shape(), (Shape{5}));
  EXPECT_EQ(trace.lead_attention.size(), 12u);
  EXPECT_EQ(trace.multivariate_attention.size(), 12u);
  EXPECT_EQ(trace.head_outputs.front().shape(), (Shape{16, 2}));
  EXPECT_EQ(trace.head_vectors.size(), 12u);
  for (const auto& w : trace.multivariate_attention) expect_row_stochastic(w);
  for (std::size_t c2 = 0; c2 < c.d_model; ++c2) {
    double s = 0.0;
    for (const auto& v : trace.head_vectors) s += v[c2];
    EXPECT_NEAR(trace.pooled_vector[c2], s, 1e-12);
  }
  const Mvmtnet fused(tiny_config(), 1);
  EXPECT_THROW(fused.forward_per_lead(tape, ecg_for(tiny_config(), 1), notes_for(tiny_config(), 1)), ConfigError);
}

TEST(PerLead, ZeroingOneLeadChangesOnlyItsHead) {
  const ModelConfig c = per_lead_config();
  const Mvmtnet net(c, 24);
  Tensor ecg = ecg_for(c, 25);
  const Tensor notes = notes_for(c, 26);
  ForwardTrace before, after;
  net.predict(ecg, notes, &before);
  Tensor zeroed = ecg.clone();
  const std::size_t k = 5;
  for (std::size_t t = 0; t < c.seq_len; ++t) zeroed.mutable_data()[k * c.seq_len + t] = 0.0;
  net.predict(zeroed, notes, &after);
  for (std::size_t h = 0; h < c.n_leads; ++h) {
    if (h == k) EXPECT_NE(before.head_vectors[h], after.head_vectors[h]);
    else EXPECT_EQ(before.head_vectors[h], after.head_vectors[h]) << h;
  }
}

TEST(Mvmtnet, EndToEndGradientCheck) {
  const ModelConfig c = tiny_config();
  const Mvmtnet net(c, 27);
  const std::vector<Tensor> ecgs{ecg_for(c, 28), ecg_for(c, 29)};
  const std::vector<Tensor> notes{notes_for(c, 30), notes_for(c, 31)};
  const std::vector<Tensor> targets{Tensor({1, 5}, {1, 0, 0, 1, 0}), Tensor({1, 5}, {0, 0, 1, 0, 0})};
  const auto report = ad::finite_diff_check(
      [&](Tape& tape) {
        Tensor total;
        for (std::size_t i = 0; i < 2; ++i) {
          const Tensor l = train::bce_with_logits(tape, net.logits(tape, ecgs[i], notes[i]), targets[i]);
          total = total.defined() ? ad::add(tape, total, l) : l;
        }
        return total;
      },
      net.parameters());
  ASSERT_EQ(report.size(), net.parameters().size());
  for (const auto& r : report) EXPECT_LT(r.max_relative_error, 1e-4) << r.name << " analytic " << r.analytic << " numeric " << r.numeric;
}
