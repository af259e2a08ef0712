// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "mvmt/dataset/records.hpp"
#include "mvmt/sigproc/preprocess.hpp"

namespace mvmt::data {

/// Dominant frequency of each class signature, Hz, in slot order.
inline constexpr std::array<double, kNumClasses> kClassFrequencyHz{1.0, 2.0, 3.0, 4.0, 5.0};

struct SynthOptions {
  std::size_t n_per_class = 8;
  std::uint64_t seed = 0;
  bool notes_informative = true;
  double snr_db = 10.0;
};

struct SynthRecord {
  RecordMeta meta;
  sigproc::RawEcg waveform;
  std::vector<double> embedding;
};

/// Desk-scale stand-in for a curated ECG corpus.
///
/// Each class contributes `n_per_class` single-label records; another 10 %
/// (rounded half up) are two-label records whose waveforms superpose both
/// signatures. A class signature is a unit sinusoid at the class frequency
/// with an independent random phase per lead, plus white noise at `snr_db`.
/// With informative notes the embedding is the normalized sum of fixed class
/// centroids plus small noise; otherwise it is a random unit vector.
std::vector<SynthRecord> synth_dataset(const SynthOptions& options);

std::size_t dual_label_count(std::size_t n_per_class);

/// Writes `manifest.csv`, `waveforms/<id>.f32` and `embeddings.bin` into dir.
void write_synth_dataset(const std::vector<SynthRecord>& records, const std::filesystem::path& dir);

}  // namespace mvmt::data
