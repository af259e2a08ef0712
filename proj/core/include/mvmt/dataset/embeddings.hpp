// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mvmt/error.hpp"

namespace mvmt::data {

inline constexpr std::size_t kEmbeddingDim = 768;

struct NotesEmbedding {
  std::string record_id;
  std::vector<double> vector;
};

using EmbeddingTable = std::map<std::string, std::vector<double>>;

struct EmbeddingDimensionError : FormatError {
  using FormatError::FormatError;
};
struct NonFiniteEmbeddingError : FormatError {
  using FormatError::FormatError;
};
struct DuplicateRecordError : FormatError {
  using FormatError::FormatError;
};

/// Reads the binary format (magic `MVEMB1\n`; per record a big-endian u16 id
/// length, the UTF-8 id, 768 little-endian f32) or, when the magic is absent,
/// CSV rows of `record_id` followed by 768 numbers (optional header row
/// starting with `record_id`).
EmbeddingTable load_embeddings(const std::filesystem::path& path);
void save_embeddings(const std::filesystem::path& path, const std::vector<NotesEmbedding>& records);
void save_embeddings_csv(const std::filesystem::path& path, const std::vector<NotesEmbedding>& records);

/// Deterministic stand-in for a sentence encoder: signed feature hashing of
/// lowercased alphanumeric tokens into 768 slots, L2-normalized.
std::vector<double> toy_embed(std::string_view note_text);

}  // namespace mvmt::data
