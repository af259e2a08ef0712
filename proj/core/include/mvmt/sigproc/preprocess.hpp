// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mvmt::sigproc {

inline constexpr std::size_t kLeads = 12;
inline constexpr std::size_t kRawSamples = 1000;
inline constexpr std::size_t kCleanSamples = 250;
inline constexpr double kSampleRateHz = 100.0;

/// Raw 12-lead record, 1000 samples per lead at 100 Hz, millivolts,
/// lead-major.
class RawEcg {
 public:
  /// Throws FormatError on wrong size, DomainError on non-finite samples.
  RawEcg(std::string record_id, std::vector<double> samples);

  const std::string& record_id() const { return record_id_; }
  std::span<const double> samples() const { return samples_; }
  std::span<const double> lead(std::size_t i) const;

 private:
  std::string record_id_;
  std::vector<double> samples_;
};

/// Denoised, truncated, standardized record: 12 × 250, lead-major.
struct CleanEcg {
  std::string record_id;
  std::vector<double> samples;

  std::span<const double> lead(std::size_t i) const {
    return std::span<const double>(samples).subspan(i * kCleanSamples, kCleanSamples);
  }
};

/// First 250 samples of each lead (12 × 250, lead-major).
std::vector<double> truncate_quarter(const RawEcg& raw);

/// Zero mean, unit (population) variance; variance floored at 1e-8 so flat
/// leads map to zeros.
std::vector<double> standardize(std::span<const double> lead);

/// truncate_quarter → per-lead denoise → per-lead standardize.
CleanEcg preprocess(const RawEcg& raw);

}  // namespace mvmt::sigproc
