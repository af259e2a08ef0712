// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "mvmt/random.hpp"
#include "mvmt/sigproc/preprocess.hpp"
#include "mvmt/sigproc/wavelet.hpp"

using namespace mvmt;

namespace {

std::vector<double> noisy_lead(std::size_t n) {
  Rng rng(1);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(0.06 * static_cast<double>(i)) + rng.normal(0.0, 0.3);
  return x;
}

void BM_DwtRoundTrip(benchmark::State& state) {
  const auto x = noisy_lead(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sigproc::idwt_db4(sigproc::dwt_db4(x, 4)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Denoise(benchmark::State& state) {
  const auto x = noisy_lead(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sigproc::denoise(x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

// Whole record: truncate, denoise and standardize all twelve leads.
void BM_PreprocessRecord(benchmark::State& state) {
  Rng rng(2);
  std::vector<double> samples(sigproc::kLeads * sigproc::kRawSamples);
  for (auto& v : samples) v = rng.normal();
  const sigproc::RawEcg raw("bench", std::move(samples));
  for (auto _ : state) benchmark::DoNotOptimize(sigproc::preprocess(raw));
}

}  // namespace

BENCHMARK(BM_DwtRoundTrip)->Arg(250)->Arg(1000);
BENCHMARK(BM_Denoise)->Arg(250)->Arg(1000);
BENCHMARK(BM_PreprocessRecord)->Unit(benchmark::kMicrosecond);
