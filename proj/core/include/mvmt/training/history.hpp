// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mvmt/training/trainer.hpp"

namespace mvmt::train {

inline constexpr const char* kHistoryHeader = "epoch,train_loss,val_loss,train_error,val_error";

/// One row per epoch, values in 6-decimal fixed point.
std::string format_history(const std::vector<EpochStats>& history);
void write_history_csv(const std::filesystem::path& path, const std::vector<EpochStats>& history);
std::vector<EpochStats> read_history_csv(const std::filesystem::path& path);

}  // namespace mvmt::train
