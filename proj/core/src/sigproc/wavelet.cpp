// SPDX-License-Identifier: Apache-2.0
#include "mvmt/sigproc/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mvmt/error.hpp"

namespace mvmt::sigproc {
namespace {

constexpr std::size_t kTaps = 8;

// Index into a signal of length n extended by half-sample symmetric
// reflection (x[-1] = x[0], x[n] = x[n-1]); reflects repeatedly for very
// short signals.
std::size_t mirror(long i, std::size_t n) {
  const long len = static_cast<long>(n);
  while (i < 0 || i >= len) {
    if (i < 0) i = -i - 1;
    if (i >= len) i = 2 * len - i - 1;
  }
  return static_cast<std::size_t>(i);
}

}  // namespace

const std::array<double, 8>& db4_lowpass() {
  static const std::array<double, 8> h{
      -0.010597401785069032, 0.0328830116668852,  0.030841381835560764, -0.18703481171909309,
      -0.027983769416859854, 0.6308807679298589, 0.7148465705529157,   0.2303778133088965};
  return h;
}

const std::array<double, 8>& db4_highpass() {
  static const std::array<double, 8> g = [] {
    std::array<double, 8> out{};
    const auto& h = db4_lowpass();
    // g[k] = (-1)^(k+1) h[7-k]
    for (std::size_t k = 0; k < kTaps; ++k) out[k] = (k % 2 == 0 ? -1.0 : 1.0) * h[kTaps - 1 - k];
    return out;
  }();
  return g;
}

std::size_t band_length(std::size_t n, int level) {
  for (int i = 0; i < level; ++i) n = (n + kTaps - 1) / 2;
  return n;
}

DwtStep dwt_step(std::span<const double> signal) {
  const std::size_t n = signal.size();
  if (n == 0) throw ContractError("dwt_step: empty signal");
  const std::size_t m = (n + kTaps - 1) / 2;
  const auto& lo = db4_lowpass();
  const auto& hi = db4_highpass();
  DwtStep out{std::vector<double>(m), std::vector<double>(m)};
  for (std::size_t i = 0; i < m; ++i) {
    const long centre = static_cast<long>(2 * i + 1);
    double a = 0.0;
    double d = 0.0;
    for (std::size_t j = 0; j < kTaps; ++j) {
      const double x = signal[mirror(centre - static_cast<long>(j), n)];
      a += lo[j] * x;
      d += hi[j] * x;
    }
    out.approx[i] = a;
    out.detail[i] = d;
  }
  return out;
}

std::vector<double> idwt_step(std::span<const double> approx, std::span<const double> detail) {
  if (approx.size() != detail.size()) {
    throw ContractError("idwt_step: approximation (" + std::to_string(approx.size()) + ") and detail (" +
                        std::to_string(detail.size()) + ") lengths differ");
  }
  const std::size_t m = approx.size();
  if (2 * m < kTaps) throw ContractError("idwt_step: too few coefficients");
  const auto& lo = db4_lowpass();
  const auto& hi = db4_highpass();
  // Upsample (coefficient k at position 2k), convolve with the reversed
  // analysis filters, keep the valid window starting at kTaps - 2.
  const std::size_t out_len = 2 * m - kTaps + 2;
  std::vector<double> out(out_len, 0.0);
  for (std::size_t o = 0; o < out_len; ++o) {
    const std::size_t pos = o + kTaps - 2;
    double acc = 0.0;
    for (std::size_t j = 0; j < kTaps; ++j) {
      if (pos < j) break;
      const std::size_t up = pos - j;
      if (up % 2 != 0) continue;
      const std::size_t k = up / 2;
      if (k >= m) continue;
      // synthesis filter = reversed analysis filter
      acc += lo[kTaps - 1 - j] * approx[k] + hi[kTaps - 1 - j] * detail[k];
    }
    out[o] = acc;
  }
  return out;
}

WaveletCoeffs dwt_db4(std::span<const double> signal, int levels) {
  const std::size_t n = signal.size();
  if (levels < 1) throw ContractError("dwt_db4: levels must be at least 1");
  if (n < kTaps || levels >= 63 || (std::size_t{1} << levels) > n) {
    throw ContractError("dwt_db4: signal of length " + std::to_string(n) + " too short for " +
                        std::to_string(levels) + " levels");
  }
  WaveletCoeffs out;
  out.levels = levels;
  out.original_length = n;
  std::vector<double> current(signal.begin(), signal.end());
  for (int level = 0; level < levels; ++level) {
    auto step = dwt_step(current);
    out.details.push_back(std::move(step.detail));
    current = std::move(step.approx);
  }
  out.approx = std::move(current);
  return out;
}

std::vector<double> idwt_db4(const WaveletCoeffs& coeffs) {
  if (coeffs.levels < 1 || coeffs.details.size() != static_cast<std::size_t>(coeffs.levels)) {
    throw ContractError("idwt_db4: detail band count does not match levels");
  }
  if (coeffs.approx.size() != band_length(coeffs.original_length, coeffs.levels)) {
    throw ContractError("idwt_db4: approximation length inconsistent with original length " +
                        std::to_string(coeffs.original_length));
  }
  for (int level = 0; level < coeffs.levels; ++level) {
    if (coeffs.details[level].size() != band_length(coeffs.original_length, level + 1)) {
      throw ContractError("idwt_db4: detail band " + std::to_string(level) +
                          " length inconsistent with original length");
    }
  }
  std::vector<double> current = coeffs.approx;
  for (int level = coeffs.levels; level-- > 0;) {
    current = idwt_step(current, coeffs.details[level]);
    current.resize(band_length(coeffs.original_length, level));
  }
  return current;
}

std::vector<double> soft_threshold(std::span<const double> coeffs, double t) {
  if (!(t >= 0.0)) throw ContractError("soft_threshold: threshold must be non-negative");
  std::vector<double> out(coeffs.size());
  std::transform(coeffs.begin(), coeffs.end(), out.begin(), [t](double x) {
    const double mag = std::abs(x) - t;
    return mag > 0.0 ? std::copysign(mag, x) : 0.0;
  });
  return out;
}

double compute_threshold(std::span<const double> finest_details, std::size_t n) {
  if (finest_details.empty()) throw ContractError("compute_threshold: empty detail band");
  if (n < 2) throw ContractError("compute_threshold: signal length must be at least 2");
  std::vector<double> mags(finest_details.size());
  std::transform(finest_details.begin(), finest_details.end(), mags.begin(), [](double d) { return std::abs(d); });
  const std::size_t mid = mags.size() / 2;
  std::nth_element(mags.begin(), mags.begin() + static_cast<long>(mid), mags.end());
  double median = mags[mid];
  if (mags.size() % 2 == 0) {
    const double lower = *std::max_element(mags.begin(), mags.begin() + static_cast<long>(mid));
    median = 0.5 * (median + lower);
  }
  const double sigma = median / 0.6745;
  return sigma * std::sqrt(2.0 * std::log(static_cast<double>(n)));
}

std::vector<double> denoise(std::span<const double> lead, int levels) {
  auto coeffs = dwt_db4(lead, levels);
  const double t = compute_threshold(coeffs.details.front(), lead.size());
  for (auto& band : coeffs.details) band = soft_threshold(band, t);
  return idwt_db4(coeffs);
}

}  // namespace mvmt::sigproc
