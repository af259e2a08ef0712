// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mvmt/dataset/labels.hpp"
#include "mvmt/model/mvmtnet.hpp"
#include "mvmt/training/adam.hpp"
#include "mvmt/training/train_config.hpp"

namespace mvmt::train {

/// One model-ready record.
struct Example {
  std::string record_id;
  ad::Tensor ecg;    // n_leads×seq_len
  ad::Tensor notes;  // notes_dim, or undefined
  data::LabelVector labels;
  ad::Tensor targets;  // 1×n_classes

  static Example make(std::string record_id, ad::Tensor ecg, ad::Tensor notes, const data::LabelVector& labels);
};

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double train_error = 0.0;
  double val_error = 0.0;
};

struct EvalResult {
  double loss = 0.0;
  double accuracy = 0.0;
  std::vector<std::vector<double>> logits;
  std::vector<std::vector<double>> probabilities;
};

struct EpochResult {
  double loss = 0.0;
  double accuracy = 0.0;
};

/// Eval-mode pass over `split`.
EvalResult evaluate(const model::Mvmtnet& model, std::span<const Example> split);

/// One shuffled pass with an Adam step per batch; the last partial batch is
/// kept. `rng` drives both the shuffle and dropout. `epoch` only labels
/// error messages.
EpochResult train_epoch(model::Mvmtnet& model, std::span<const Example> split, AdamState& state,
                        const TrainConfig& config, Rng& rng, std::size_t epoch = 0);

struct EarlyStopOutcome {
  std::size_t best_epoch = 0;  // 1-based
  double best_error = 0.0;
  std::size_t epochs_run = 0;
  bool stopped_early = false;
};

/// Drives the stopping rule. `run_epoch(e)` trains epoch e (1-based) and
/// returns its validation error; `on_best(e)` fires whenever e strictly
/// improves on every earlier error. Stops once `patience` consecutive epochs
/// fail to improve or after `max_epochs`.
EarlyStopOutcome run_early_stopping(const std::function<double(std::size_t)>& run_epoch,
                                    const std::function<void(std::size_t)>& on_best, std::size_t patience,
                                    std::size_t max_epochs);

struct FitResult {
  std::vector<EpochStats> history;
  std::size_t best_epoch = 0;
  double best_val_error = 0.0;
  bool stopped_early = false;
};

using EpochCallback = std::function<void(const EpochStats&)>;

/// Trains with early stopping on validation error and leaves the model
/// holding the parameters of the best epoch.
FitResult fit_with_early_stop(model::Mvmtnet& model, std::span<const Example> train_split,
                              std::span<const Example> val_split, const TrainConfig& config,
                              const EpochCallback& on_epoch = {});

}  // namespace mvmt::train
