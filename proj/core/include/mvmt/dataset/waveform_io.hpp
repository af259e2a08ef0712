// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mvmt/sigproc/preprocess.hpp"

namespace mvmt::data {

// Waveform files are headerless little-endian f32, lead-major: 12×1000
// (48 000 bytes) for raw records and 12×250 (12 000 bytes) for clean ones.

std::vector<double> read_f32_file(const std::filesystem::path& path);
void write_f32_file(const std::filesystem::path& path, std::span<const double> values);

sigproc::RawEcg read_raw_waveform(const std::filesystem::path& path, std::string record_id);
sigproc::CleanEcg read_clean_waveform(const std::filesystem::path& path, std::string record_id);
void write_raw_waveform(const std::filesystem::path& path, const sigproc::RawEcg& ecg);
void write_clean_waveform(const std::filesystem::path& path, const sigproc::CleanEcg& ecg);

}  // namespace mvmt::data
