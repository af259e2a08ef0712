// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mvmt/dataset/records.hpp"

namespace mvmt::data {

/// Manifest CSV: header `record_id,labels,note,waveform_path`, RFC 4180
/// quoting. Malformed rows raise ParseError with the line number.
std::vector<RecordMeta> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const std::vector<RecordMeta>& records);

/// Resolves a manifest waveform path against the manifest's directory.
std::filesystem::path resolve_waveform(const std::filesystem::path& manifest, const std::string& waveform_path);

/// Splits one CSV record into fields; exposed for the other CSV readers.
std::vector<std::string> split_csv_line(const std::string& line);
std::string quote_csv(const std::string& field);
/// Quotes only when the field holds a comma, quote or line break.
std::string csv_field(const std::string& field);

}  // namespace mvmt::data
