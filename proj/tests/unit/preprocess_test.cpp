// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "mvmt/error.hpp"
#include "mvmt/random.hpp"
#include "mvmt/sigproc/preprocess.hpp"
#include "mvmt/sigproc/wavelet.hpp"

using namespace mvmt;
using namespace mvmt::sigproc;

namespace {

std::vector<double> raw_samples(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> s(kLeads * kRawSamples);
  for (std::size_t l = 0; l < kLeads; ++l)
    for (std::size_t i = 0; i < kRawSamples; ++i)
      s[l * kRawSamples + i] = std::sin(0.1 * (l + 1) * i) + 0.3 * rng.normal() + 0.5 * l;
  return s;
}

}  // namespace

TEST(RawEcg, ValidatesShapeAndFiniteness) {
  EXPECT_NO_THROW(RawEcg("a", raw_samples(1)));
  EXPECT_THROW(RawEcg("a", std::vector<double>(11999, 0.0)), FormatError);
  auto bad = raw_samples(1);
  bad[4321] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(RawEcg("a", bad), DomainError);
}

TEST(Preprocess, TruncatesToFirstQuarterOfEachLead) {
  const auto s = raw_samples(2);
  const RawEcg raw("r", s);
  const auto t = truncate_quarter(raw);
  ASSERT_EQ(t.size(), kLeads * kCleanSamples);
  for (std::size_t l = 0; l < kLeads; ++l)
    for (std::size_t i = 0; i < kCleanSamples; ++i) EXPECT_EQ(t[l * kCleanSamples + i], s[l * kRawSamples + i]);
}

TEST(Preprocess, StandardizeGivesZeroMeanUnitVariance) {
  std::vector<double> x{1.0, 2.0, 4.0, 9.0};
  const auto y = standardize(x);
  double m = 0.0, v = 0.0;
  for (double e : y) m += e;
  m /= 4.0;
  for (double e : y) v += (e - m) * (e - m);
  EXPECT_NEAR(m, 0.0, 1e-15);
  EXPECT_NEAR(v / 4.0, 1.0, 1e-14);
  // mean 4, population sd sqrt(9.5)
  EXPECT_NEAR(y[0], -3.0 / std::sqrt(9.5), 1e-14);
}

TEST(Preprocess, FlatLeadMapsToZeros) {
  const auto y = standardize(std::vector<double>(250, 7.5));
  for (double v : y) EXPECT_EQ(v, 0.0);
}

TEST(Preprocess, PipelineIsTruncateDenoiseStandardize) {
  const RawEcg raw("rec", raw_samples(3));
  const auto clean = preprocess(raw);
  EXPECT_EQ(clean.record_id, "rec");
  ASSERT_EQ(clean.samples.size(), kLeads * kCleanSamples);
  const auto t = truncate_quarter(raw);
  for (std::size_t l = 0; l < kLeads; ++l) {
    const auto expect = standardize(denoise(std::span<const double>(t).subspan(l * kCleanSamples, kCleanSamples)));
    const auto lead = clean.lead(l);
    double mean = 0.0;
    for (std::size_t i = 0; i < kCleanSamples; ++i) {
      EXPECT_EQ(lead[i], expect[i]);
      EXPECT_TRUE(std::isfinite(lead[i]));
      mean += lead[i];
    }
    EXPECT_NEAR(mean / kCleanSamples, 0.0, 1e-9);
  }
}
