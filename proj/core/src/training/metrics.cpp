// SPDX-License-Identifier: Apache-2.0
#include "mvmt/training/metrics.hpp"

#include "mvmt/error.hpp"

namespace mvmt::train {

std::size_t argmax(std::span<const double> row) {
  if (row.empty()) throw ContractError("argmax of an empty row");
  std::size_t best = 0;
  for (std::size_t i = 1; i < row.size(); ++i) {
    if (row[i] > row[best]) best = i;
  }
  return best;
}

bool top1_hit(std::span<const double> probs, const data::LabelVector& labels) {
  if (!labels.any()) throw ContractError("accuracy: record has no labels");
  if (probs.size() != data::kNumClasses) {
    throw ShapeError("accuracy: expected " + std::to_string(data::kNumClasses) + " probabilities, got " +
                     std::to_string(probs.size()));
  }
  return labels.test(argmax(probs));
}

double accuracy(std::span<const std::vector<double>> probs, std::span<const data::LabelVector> labels) {
  if (probs.size() != labels.size()) {
    throw ShapeError("accuracy: " + std::to_string(probs.size()) + " predictions vs " +
                     std::to_string(labels.size()) + " label rows");
  }
  if (probs.empty()) throw ContractError("accuracy of an empty batch");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) hits += top1_hit(probs[i], labels[i]) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(probs.size());
}

double accuracy(const ad::Tensor& probs, const ad::Tensor& labels) {
  if (probs.rank() != 2 || probs.shape() != labels.shape()) {
    throw ShapeError("accuracy: probabilities " + ad::shape_str(probs.shape()) + " vs labels " +
                     ad::shape_str(labels.shape()));
  }
  const std::size_t rows = probs.dim(0);
  const std::size_t cols = probs.dim(1);
  std::size_t hits = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    const auto p = probs.data().subspan(r * cols, cols);
    const auto y = labels.data().subspan(r * cols, cols);
    bool any = false;
    for (double v : y) {
      if (v != 0.0 && v != 1.0) throw ContractError("accuracy: labels must be 0 or 1");
      any = any || v == 1.0;
    }
    if (!any) throw ContractError("accuracy: row " + std::to_string(r) + " has no labels");
    hits += y[argmax(p)] == 1.0 ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(rows);
}

}  // namespace mvmt::train
