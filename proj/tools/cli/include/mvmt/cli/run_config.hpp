// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "mvmt/dataset/curation.hpp"
#include "mvmt/model/config.hpp"
#include "mvmt/training/train_config.hpp"

namespace mvmt::cli {

/// Everything a command needs: model and optimizer settings, paths and the
/// curation knobs. Filled from defaults, then a config file, then flags.
struct RunConfig {
  model::ModelConfig model;
  train::TrainConfig train;
  std::uint64_t seed = 0;
  std::filesystem::path manifest;
  std::filesystem::path embeddings;
  std::filesystem::path checkpoint;
  std::filesystem::path out = "mvmt_out";
  std::size_t per_class_cap = 2500;
  double split_train = 0.8;
  double split_val = 0.1;
  double split_test = 0.1;

  data::SplitSpec split_spec() const { return {split_train, split_val, split_test, seed}; }
  /// Propagates the run seed into the training config.
  train::TrainConfig train_config() const;

  /// Sets one key; ConfigError for unknown keys or bad values.
  void set(std::string_view key, std::string_view value);
  void validate() const;
  std::string to_text() const;
};

/// Applies a flat `key = value` file (blank lines and `#` comments ignored).
/// Errors name the file and line.
void apply_config_file(RunConfig& config, const std::filesystem::path& path);
void apply_config_text(RunConfig& config, std::string_view text, const std::string& origin);

}  // namespace mvmt::cli
