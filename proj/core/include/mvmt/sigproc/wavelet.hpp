// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace mvmt::sigproc {

/// Daubechies wavelet with four vanishing moments (8 taps): analysis
/// low-pass and high-pass filters. Synthesis filters are their reversals.
const std::array<double, 8>& db4_lowpass();
const std::array<double, 8>& db4_highpass();

/// Multi-level decomposition. `details` is ordered finest first.
struct WaveletCoeffs {
  std::vector<double> approx;
  std::vector<std::vector<double>> details;
  int levels = 0;
  std::size_t original_length = 0;
};

struct DwtStep {
  std::vector<double> approx;
  std::vector<double> detail;
};

/// One analysis step: filter with symmetric (half-sample mirror) boundary
/// extension and keep every second output. Output length is
/// floor((n + 7) / 2).
DwtStep dwt_step(std::span<const double> signal);

/// One synthesis step. Returns 2·m − 6 samples for m coefficients; callers
/// trim to the length of the signal that produced them.
std::vector<double> idwt_step(std::span<const double> approx, std::span<const double> detail);

/// Length of the approximation band after `level` analysis steps.
std::size_t band_length(std::size_t n, int level);

/// Requires n ≥ 8, levels ≥ 1 and 2^levels ≤ n.
WaveletCoeffs dwt_db4(std::span<const double> signal, int levels);
std::vector<double> idwt_db4(const WaveletCoeffs& coeffs);

/// sign(x)·max(|x| − t, 0) applied elementwise; t must be non-negative.
std::vector<double> soft_threshold(std::span<const double> coeffs, double t);

/// Universal threshold with a median-absolute-deviation noise estimate:
/// (median|d| / 0.6745) · sqrt(2 ln n).
double compute_threshold(std::span<const double> finest_details, std::size_t n);

/// Wavelet shrinkage: decompose, soft-threshold every detail band with the
/// threshold estimated on the finest band, reconstruct. Approximation band is
/// left untouched.
std::vector<double> denoise(std::span<const double> lead, int levels = 4);

}  // namespace mvmt::sigproc
