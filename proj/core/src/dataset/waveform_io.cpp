// SPDX-License-Identifier: Apache-2.0
#include "mvmt/dataset/waveform_io.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <iterator>

#include "mvmt/error.hpp"

namespace mvmt::data {

std::vector<double> read_f32_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open waveform file " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() % 4 != 0) {
    throw FormatError(path.string() + ": size " + std::to_string(bytes.size()) + " is not a multiple of 4");
  }
  std::vector<double> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint32_t word = 0;
    for (int b = 3; b >= 0; --b) word = (word << 8) | static_cast<unsigned char>(bytes[4 * i + static_cast<std::size_t>(b)]);
    out[i] = static_cast<double>(std::bit_cast<float>(word));
  }
  return out;
}

void write_f32_file(const std::filesystem::path& path, std::span<const double> values) {
  std::string bytes;
  bytes.reserve(values.size() * 4);
  for (double v : values) {
    const auto word = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    for (int b = 0; b < 4; ++b) bytes.push_back(static_cast<char>((word >> (8 * b)) & 0xFF));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
    throw IoError("cannot write waveform file " + path.string());
  }
}

sigproc::RawEcg read_raw_waveform(const std::filesystem::path& path, std::string record_id) {
  auto values = read_f32_file(path);
  if (values.size() != sigproc::kLeads * sigproc::kRawSamples) {
    throw FormatError(path.string() + ": expected 12x1000 f32 samples (48000 bytes), got " +
                      std::to_string(values.size() * 4) + " bytes");
  }
  return sigproc::RawEcg(std::move(record_id), std::move(values));
}

sigproc::CleanEcg read_clean_waveform(const std::filesystem::path& path, std::string record_id) {
  auto values = read_f32_file(path);
  if (values.size() != sigproc::kLeads * sigproc::kCleanSamples) {
    throw FormatError(path.string() + ": expected 12x250 f32 samples (12000 bytes), got " +
                      std::to_string(values.size() * 4) + " bytes");
  }
  return sigproc::CleanEcg{std::move(record_id), std::move(values)};
}

void write_raw_waveform(const std::filesystem::path& path, const sigproc::RawEcg& ecg) {
  write_f32_file(path, ecg.samples());
}

void write_clean_waveform(const std::filesystem::path& path, const sigproc::CleanEcg& ecg) {
  write_f32_file(path, ecg.samples);
}

}  // namespace mvmt::data
