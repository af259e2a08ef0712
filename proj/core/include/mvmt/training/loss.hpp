// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "mvmt/autodiff/tape.hpp"
#include "mvmt/autodiff/tensor.hpp"

namespace mvmt::train {

/// Mean over all entries of max(z,0) − z·y + ln(1 + e^{−|z|}). Targets must
/// be exactly 0 or 1 (ContractError otherwise).
ad::Tensor bce_with_logits(ad::Tape& tape, const ad::Tensor& logits, const ad::Tensor& targets);

/// Same value without a tape.
double bce_with_logits(std::span<const double> logits, std::span<const double> targets);

}  // namespace mvmt::train
