// SPDX-License-Identifier: Apache-2.0
#include "mvmt/sigproc/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mvmt/error.hpp"
#include "mvmt/sigproc/wavelet.hpp"

namespace mvmt::sigproc {

RawEcg::RawEcg(std::string record_id, std::vector<double> samples)
    : record_id_(std::move(record_id)), samples_(std::move(samples)) {
  if (samples_.size() != kLeads * kRawSamples) {
    throw FormatError("record " + record_id_ + ": expected " + std::to_string(kLeads * kRawSamples) +
                      " samples (12 x 1000), got " + std::to_string(samples_.size()));
  }
  if (!std::all_of(samples_.begin(), samples_.end(), [](double v) { return std::isfinite(v); })) {
    throw DomainError("record " + record_id_ + ": non-finite sample");
  }
}

std::span<const double> RawEcg::lead(std::size_t i) const {
  return std::span<const double>(samples_).subspan(i * kRawSamples, kRawSamples);
}

std::vector<double> truncate_quarter(const RawEcg& raw) {
  std::vector<double> out;
  out.reserve(kLeads * kCleanSamples);
  for (std::size_t l = 0; l < kLeads; ++l) {
    const auto lead = raw.lead(l);
    out.insert(out.end(), lead.begin(), lead.begin() + kCleanSamples);
  }
  return out;
}

std::vector<double> standardize(std::span<const double> lead) {
  if (lead.empty()) return {};
  const double n = static_cast<double>(lead.size());
  const double mu = std::accumulate(lead.begin(), lead.end(), 0.0) / n;
  double var = 0.0;
  for (double v : lead) var += (v - mu) * (v - mu);
  var /= n;
  const double inv = 1.0 / std::sqrt(std::max(var, 1e-8));
  std::vector<double> out(lead.size());
  std::transform(lead.begin(), lead.end(), out.begin(), [&](double v) { return (v - mu) * inv; });
  return out;
}

CleanEcg preprocess(const RawEcg& raw) {
  const auto truncated = truncate_quarter(raw);
  CleanEcg out{raw.record_id(), {}};
  out.samples.reserve(truncated.size());
  for (std::size_t l = 0; l < kLeads; ++l) {
    const std::span<const double> lead(truncated.data() + l * kCleanSamples, kCleanSamples);
    const auto clean = standardize(denoise(lead));
    out.samples.insert(out.samples.end(), clean.begin(), clean.end());
  }
  return out;
}

}  // namespace mvmt::sigproc
