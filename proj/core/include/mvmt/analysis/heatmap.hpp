// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "mvmt/model/mvmtnet.hpp"

namespace mvmt::analysis {

struct HeatmapMatrix {
  std::string record_id;
  std::size_t layer_index = 0;
  std::size_t rows = 0;  // leads
  std::size_t cols = 0;  // tokens
  std::vector<double> values;  // row-major

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

/// Mean of the per-head attention matrices.
ad::Tensor pool_heads(const std::vector<ad::Tensor>& heads);

/// values = X · P̄ᵀ for X[leads×L] and pooled attention P̄[L×L]: each token of
/// each lead becomes the attention-weighted average of that lead's samples.
HeatmapMatrix heatmap_from_attention(const ad::Tensor& ecg, const ad::Tensor& pooled);

/// Runs the model in eval mode and builds the heatmap from encoder layer
/// `layer_index`. For the per-lead variant the multi-variate attention layer
/// is used and `layer_index` must be 0. ContractError on a bad index.
HeatmapMatrix attention_heatmap(const model::Mvmtnet& model, const ad::Tensor& ecg, const ad::Tensor& notes,
                                std::size_t layer_index = 0, std::string record_id = {});

/// Writes `<stem>.csv` (rows × cols, 6 decimals) and `<stem>.pgm` (binary P5,
/// per-row min-max scaled, flat rows at 128).
void export_heatmap(const HeatmapMatrix& h, const std::filesystem::path& stem);

std::string heatmap_csv(const HeatmapMatrix& h);
std::string heatmap_pgm(const HeatmapMatrix& h);

}  // namespace mvmt::analysis
