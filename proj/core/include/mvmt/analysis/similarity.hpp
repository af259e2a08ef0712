// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "mvmt/training/trainer.hpp"

namespace mvmt::analysis {

struct Similarity {
  double value = 0.0;
  bool degenerate = false;  // a zero-norm operand; value forced to 0
};

/// Cosine similarity clamped to [−1, 1].
Similarity cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Cosine similarity of every head vector against the pooled vector.
std::vector<Similarity> head_pool_similarity(const std::vector<std::vector<double>>& heads,
                                             std::span<const double> pooled);

/// Writes `<stem>.csv` and one two-column `<stem>_<curve>.dat` per curve
/// (train_loss, val_loss, train_error, val_error).
void export_history(const std::vector<train::EpochStats>& history, const std::filesystem::path& stem);

}  // namespace mvmt::analysis
