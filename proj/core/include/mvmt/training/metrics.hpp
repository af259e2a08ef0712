// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mvmt/autodiff/tensor.hpp"
#include "mvmt/dataset/labels.hpp"

namespace mvmt::train {

/// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> row);

/// 1 when the most probable class is one of the true labels.
bool top1_hit(std::span<const double> probs, const data::LabelVector& labels);

/// Fraction of rows whose argmax is a true label. ContractError on an empty
/// batch or a row without labels, ShapeError on mismatched counts.
double accuracy(std::span<const std::vector<double>> probs, std::span<const data::LabelVector> labels);

/// Tensor form over probs[B×C] and multi-hot labels[B×C].
double accuracy(const ad::Tensor& probs, const ad::Tensor& labels);

}  // namespace mvmt::train
