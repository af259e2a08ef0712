// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include "mvmt/model/mvmtnet.hpp"

namespace mvmt::model {

/// Binary checkpoint: magic "MVCKPT1\n", u32 config length, key=value config
/// text, u32 tensor count, then per tensor u32 name length, name, u32 rank,
/// u32 dims and little-endian f64 values.
void save_checkpoint(const std::filesystem::path& path, const Mvmtnet& model);

/// Rebuilds the model from a checkpoint. IoError if unreadable, FormatError if
/// truncated, malformed or inconsistent with its own config.
Mvmtnet load_checkpoint(const std::filesystem::path& path);

/// Parses newline-separated key=value model config text.
ModelConfig parse_model_config(std::string_view text);

}  // namespace mvmt::model
