// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mvmt::train {

/// Optimization hyperparameters. Defaults: lr 1e-4, batch 4, Adam (0.9, 0.999, 1e-8).
struct TrainConfig {
  double learning_rate = 1e-4;
  std::size_t batch_size = 4;
  std::size_t max_epochs = 40;
  std::size_t early_stop_patience = 5;
  std::uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  /// Re-evaluate the training split in eval mode after each epoch so the
  /// recorded train statistics describe the parameters at that epoch's end.
  /// When off, running averages from the training pass are recorded instead.
  bool eval_train_split = true;

  void validate() const;
  bool set(std::string_view key, std::string_view value);
  std::vector<std::pair<std::string, std::string>> to_kv() const;
};

}  // namespace mvmt::train
