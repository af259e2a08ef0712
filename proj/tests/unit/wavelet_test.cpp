// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>

#include "mvmt/error.hpp"
#include "mvmt/random.hpp"
#include "mvmt/sigproc/wavelet.hpp"

using namespace mvmt;
using namespace mvmt::sigproc;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed, double sigma = 1.0) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = rng.normal(0.0, sigma);
  return out;
}

// Extends the signal by 7 samples on each side with half-sample symmetric
// reflection, takes the full convolution with the filter and keeps the odd
// samples.
std::vector<double> filter_and_decimate(const std::vector<double>& x, const std::array<double, 8>& f) {
  const long n = static_cast<long>(x.size());
  std::vector<double> ext;
  for (long i = -7; i < n + 7; ++i) {
    long j = i;
    while (j < 0 || j >= n) j = j < 0 ? -j - 1 : 2 * n - j - 1;
    ext.push_back(x[static_cast<std::size_t>(j)]);
  }
  std::vector<double> full(ext.size() + 7, 0.0);
  for (std::size_t i = 0; i < ext.size(); ++i)
    for (std::size_t k = 0; k < 8; ++k) full[i + k] += f[k] * ext[i];
  // full[p] corresponds to output position p - 7 of the unextended signal.
  std::vector<double> out;
  for (long p = 1; p < n + 7; p += 2) out.push_back(full[static_cast<std::size_t>(p + 7)]);
  return out;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double snr_db(std::span<const double> clean, std::span<const double> observed) {
  double ps = 0.0, pn = 0.0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    ps += clean[i] * clean[i];
    pn += (observed[i] - clean[i]) * (observed[i] - clean[i]);
  }
  return 10.0 * std::log10(ps / pn);
}

}  // namespace

TEST(Db4Filters, OrthonormalWithFourVanishingMoments) {
  const auto& h = db4_lowpass();
  const auto& g = db4_highpass();
  EXPECT_NEAR(std::accumulate(h.begin(), h.end(), 0.0), std::numbers::sqrt2, 1e-12);
  for (int shift = 0; shift < 4; ++shift) {
    double hh = 0.0;
    for (int k = 0; k + 2 * shift < 8; ++k) hh += h[k] * h[k + 2 * shift];
    EXPECT_NEAR(hh, shift == 0 ? 1.0 : 0.0, 1e-12) << shift;
  }
  for (int p = 0; p < 4; ++p) {
    double moment = 0.0;
    for (int k = 0; k < 8; ++k) moment += std::pow(k, p) * g[k];
    EXPECT_NEAR(moment, 0.0, 1e-9) << "moment " << p;
  }
}

TEST(Dwt, StepMatchesExplicitExtensionOracle) {
  for (std::size_t n : {9u, 16u, 31u, 250u}) {
    const auto x = noise(n, n);
    const auto step = dwt_step(x);
    const auto a = filter_and_decimate(x, db4_lowpass());
    const auto d = filter_and_decimate(x, db4_highpass());
    ASSERT_EQ(step.approx.size(), (n + 7) / 2);
    ASSERT_EQ(a.size(), step.approx.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_NEAR(step.approx[i], a[i], 1e-13);
      EXPECT_NEAR(step.detail[i], d[i], 1e-13);
    }
  }
}

TEST(Dwt, StepMatchesReferenceImplementation) {
  // Single-level db4 of sin(0.37 i) + i²/320 with symmetric extension as
  // produced by PyWavelets 1.8.
  std::vector<double> x(16);
  for (std::size_t i = 0; i < 16; ++i) x[i] = std::sin(0.37 * i) + 0.05 * i * i / 16.0;
  const std::vector<double> a{1.4786183036116243, 0.9579268107957648,  -0.0027631872605175245,
                              0.5273196496634742, 1.3120281353317147,  1.4666983104000355,
                              0.9474639469021642, 0.08144633293318312, -0.605249254590059,
                              -0.6547175606011515, 0.04884975978734839};
  const std::vector<double> d{0.017303677915054536,  0.02688709216815999,   -0.029498064686348396,
                              -0.009192830116577875, -0.006745945684910325, -0.0007705074578295834,
                              0.00560795462116284,   0.009053103790851384,  -0.011770164629900997,
                              -0.021414343775064043, 0.035315238220401994};
  const auto step = dwt_step(x);
  ASSERT_EQ(step.approx.size(), a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(step.approx[i], a[i], 1e-12);
    EXPECT_NEAR(step.detail[i], d[i], 1e-12);
  }
}

class PerfectReconstruction : public ::testing::TestWithParam<std::size_t> {};

TEST_P(PerfectReconstruction, RandomSignal) {
  const std::size_t n = GetParam();
  for (int levels : {1, 2, 4}) {
    const auto x = noise(n, 100 + n);
    const auto coeffs = dwt_db4(x, levels);
    ASSERT_EQ(coeffs.approx.size(), band_length(n, levels));
    const auto y = idwt_db4(coeffs);
    ASSERT_EQ(y.size(), n);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(x[i] - y[i]));
    EXPECT_LT(worst, 1e-8) << "levels " << levels;
  }
}

INSTANTIATE_TEST_SUITE_P(Lengths, PerfectReconstruction, ::testing::Values(64, 128, 250, 256, 17));

TEST(Dwt, ConstantSignalHasNoDetail) {
  const std::vector<double> x(250, 3.7);
  const auto coeffs = dwt_db4(x, 4);
  for (const auto& band : coeffs.details) EXPECT_LT(max_abs(band), 1e-10);
}

TEST(Dwt, PolynomialsUpToCubicHaveNoDetailAwayFromBoundary) {
  for (int degree = 1; degree <= 3; ++degree) {
    std::vector<double> x(128);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::pow(0.01 * static_cast<double>(i) - 0.5, degree);
    const auto step = dwt_step(x);
    // Output i touches samples 2i+1-7 .. 2i+1; interior outputs need no reflection.
    for (std::size_t i = 3; 2 * i + 1 < x.size(); ++i) EXPECT_LT(std::abs(step.detail[i]), 1e-10) << degree << " " << i;
  }
}

TEST(Dwt, RampHasNoDetail) {
  std::vector<double> x(250);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.02 * static_cast<double>(i) - 1.0;
  const auto step = dwt_step(x);
  // Symmetric reflection of a ramp is not linear across the edge, so only the
  // boundary coefficients may be non-zero.
  for (std::size_t i = 3; 2 * i + 1 < x.size(); ++i) EXPECT_LT(std::abs(step.detail[i]), 1e-10);
}

TEST(Dwt, Linearity) {
  const auto x = noise(250, 5);
  auto coeffs = dwt_db4(x, 4);
  for (auto& v : coeffs.approx) v *= 2.0;
  for (auto& band : coeffs.details)
    for (auto& v : band) v *= 2.0;
  const auto y = idwt_db4(coeffs);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(y[i], 2.0 * x[i], 1e-8);
}

TEST(Dwt, RejectsBadArguments) {
  const std::vector<double> x(16, 1.0);
  EXPECT_THROW(dwt_db4(x, 0), ContractError);
  EXPECT_THROW(dwt_db4(x, 5), ContractError);
  EXPECT_THROW(dwt_db4(std::vector<double>(7, 1.0), 1), ContractError);
  auto coeffs = dwt_db4(x, 2);
  coeffs.details.pop_back();
  EXPECT_THROW(idwt_db4(coeffs), ContractError);
}

TEST(SoftThreshold, ShrinksTowardZero) {
  const std::vector<double> c{-3.0, -0.5, 0.0, 0.5, 2.0};
  const auto y = soft_threshold(c, 1.0);
  EXPECT_EQ(y, (std::vector<double>{-2.0, 0.0, 0.0, 0.0, 1.0}));
  EXPECT_EQ(soft_threshold(c, 0.0), c);
  EXPECT_THROW(soft_threshold(c, -1.0), ContractError);
}

TEST(Threshold, FormulaOnHandValues) {
  // |d| sorted: 1 2 3 4 → median 2.5
  const std::vector<double> d{-4.0, 1.0, 3.0, -2.0};
  EXPECT_NEAR(compute_threshold(d, 100), 2.5 / 0.6745 * std::sqrt(2.0 * std::log(100.0)), 1e-12);
  EXPECT_EQ(compute_threshold(std::vector<double>(10, 0.0), 250), 0.0);
}

TEST(Threshold, EstimatesGaussianNoiseLevel) {
  // Over many draws the MAD estimate of white noise in the finest band tracks
  // the true standard deviation.
  for (double sigma : {0.1, 1.0}) {
    double mean_t = 0.0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
      const auto x = noise(250, 1000 + t, sigma);
      mean_t += compute_threshold(dwt_db4(x, 1).details.front(), 250);
    }
    mean_t /= trials;
    const double expected = sigma * std::sqrt(2.0 * std::log(250.0));
    EXPECT_NEAR(mean_t / expected, 1.0, 0.08) << sigma;
  }
}

TEST(Threshold, LargerNoiseNeverIncreasesKeptDetailEnergy) {
  const auto base = noise(250, 77);
  double previous_t = -1.0;
  for (double scale : {0.5, 1.0, 2.0, 4.0}) {
    std::vector<double> finest(base.begin(), base.begin() + 125);
    for (auto& v : finest) v *= scale;
    const double t = compute_threshold(finest, 250);
    EXPECT_GT(t, previous_t);
    previous_t = t;
  }
  const auto coeffs = dwt_db4(base, 4);
  double prev_energy = std::numeric_limits<double>::infinity();
  for (double t : {0.0, 0.5, 1.0, 2.0}) {
    double energy = 0.0;
    for (const auto& band : coeffs.details)
      for (double v : soft_threshold(band, t)) energy += v * v;
    EXPECT_LE(energy, prev_energy);
    prev_energy = energy;
  }
}

TEST(Denoise, PreservesLength) {
  EXPECT_EQ(denoise(noise(250, 3)).size(), 250u);
  EXPECT_EQ(denoise(noise(1000, 3)).size(), 1000u);
}

TEST(Denoise, ImprovesSnrOfNoisySine) {
  const double fs = 100.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::vector<double> clean(250);
    for (std::size_t i = 0; i < clean.size(); ++i) clean[i] = std::sin(2.0 * std::numbers::pi * 1.5 * i / fs);
    // signal power 0.5, 5 dB SNR
    const double sigma = std::sqrt(0.5 / std::pow(10.0, 0.5));
    auto observed = clean;
    const auto n = noise(250, 500 + seed, sigma);
    for (std::size_t i = 0; i < observed.size(); ++i) observed[i] += n[i];
    const double before = snr_db(clean, observed);
    const double after = snr_db(clean, denoise(observed));
    EXPECT_GT(after, before) << "seed " << seed;
  }
}

TEST(Denoise, SecondPassMovesLessThanFirst) {
  std::vector<double> x(250);
  const auto n = noise(250, 9, 0.3);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.2 * i) + n[i];
  const auto once = denoise(x);
  const auto twice = denoise(once);
  double first = 0.0, second = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    first = std::max(first, std::abs(once[i] - x[i]));
    second = std::max(second, std::abs(twice[i] - once[i]));
  }
  EXPECT_LT(second, first);
}
