// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <vector>

#include "mvmt/autodiff/ops.hpp"
#include "mvmt/model/mvmtnet.hpp"
#include "mvmt/random.hpp"
#include "mvmt/training/loss.hpp"

using namespace mvmt;

namespace {

ad::Tensor uniform(ad::Shape shape, std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  std::vector<double> v(ad::shape_size(shape));
  for (auto& x : v) x = rng.uniform(-scale, scale);
  return ad::Tensor(std::move(shape), std::move(v));
}

// args: d_model, heads, layers (encoder and decoder each)
model::ModelConfig config_from(const benchmark::State& state, bool per_lead = false) {
  model::ModelConfig c;
  c.d_model = static_cast<std::size_t>(state.range(0));
  c.n_heads = static_cast<std::size_t>(state.range(1));
  c.n_encoder_layers = c.n_decoder_layers = static_cast<std::size_t>(state.range(2));
  c.feedforward_dim = 4 * c.d_model;
  c.per_lead_encoders = per_lead;
  return c;
}

void BM_Forward(benchmark::State& state) {
  const model::Mvmtnet net(config_from(state), 1);
  const auto ecg = uniform({12, 250}, 2), notes = uniform({768}, 3, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(net.predict(ecg, notes));
  state.counters["params"] = static_cast<double>(net.parameter_count());
}

void BM_ForwardBackward(benchmark::State& state) {
  const model::Mvmtnet net(config_from(state), 1);
  const auto ecg = uniform({12, 250}, 2), notes = uniform({768}, 3, 0.1);
  const ad::Tensor target({1, 5}, {0.0, 1.0, 0.0, 0.0, 0.0});
  Rng rng(4);
  for (auto _ : state) {
    ad::Tape tape;
    tape.backward(train::bce_with_logits(tape, net.logits(tape, ecg, notes, true, &rng), target));
  }
}

// Twelve single-head lead encoders plus the multivariate layer, against the
// fused encoder of the same total width.
void BM_ForwardPerLead(benchmark::State& state) {
  const model::Mvmtnet net(config_from(state, true), 1);
  const auto ecg = uniform({12, 250}, 2), notes = uniform({768}, 3, 0.1);
  for (auto _ : state) {
    ad::Tape tape(false);
    benchmark::DoNotOptimize(net.forward_per_lead(tape, ecg, notes));
  }
}

void BM_Attention(benchmark::State& state) {
  const auto L = static_cast<std::size_t>(state.range(0));
  const auto q = uniform({L, 120}, 5), k = uniform({L, 120}, 6);
  for (auto _ : state) {
    ad::Tape tape(false);
    benchmark::DoNotOptimize(ad::softmax_rows(tape, ad::matmul_bt(tape, q, k, 0.1)));
  }
}

void BM_Conv2d(benchmark::State& state) {
  const auto in = uniform({1, 250, 120}, 7), kernels = uniform({4, 1, 3, 3}, 8), bias = uniform({4}, 9);
  for (auto _ : state) {
    ad::Tape tape(false);
    benchmark::DoNotOptimize(ad::conv2d(tape, in, kernels, bias, 1, 1));
  }
}

}  // namespace

BENCHMARK(BM_Forward)->Args({120, 12, 6})->Args({32, 4, 2})->Args({16, 2, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForwardBackward)->Args({120, 12, 6})->Args({32, 4, 2})->Args({16, 2, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForwardPerLead)->Args({120, 12, 6})->Args({48, 12, 2})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Attention)->Arg(64)->Arg(250)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Conv2d)->Unit(benchmark::kMicrosecond);
