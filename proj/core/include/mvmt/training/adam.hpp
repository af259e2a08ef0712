// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mvmt/autodiff/tensor.hpp"
#include "mvmt/training/train_config.hpp"

namespace mvmt::train {

struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::uint64_t t = 0;

  static AdamState for_params(std::span<const ad::NamedTensor> params);
};

/// One bias-corrected Adam update using each parameter's accumulated
/// gradient (absent gradients count as zero). Every gradient is checked
/// before anything is written; a non-finite entry raises NumericalError
/// naming the parameter and leaves parameters and state untouched.
void adam_step(std::span<const ad::NamedTensor> params, AdamState& state, const TrainConfig& config);

}  // namespace mvmt::train
