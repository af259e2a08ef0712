// SPDX-License-Identifier: Apache-2.0
#include "mvmt/training/trainer.hpp"

#include <cmath>
#include <numeric>

#include "mvmt/error.hpp"
#include "mvmt/training/loss.hpp"
#include "mvmt/training/metrics.hpp"

namespace mvmt::train {

Example Example::make(std::string record_id, ad::Tensor ecg, ad::Tensor notes, const data::LabelVector& labels) {
  if (!labels.any()) throw CurationError("record " + record_id + " has no labels");
  const auto y = labels.as_doubles();
  Example e{std::move(record_id), std::move(ecg), std::move(notes), labels,
            ad::Tensor({1, y.size()}, std::vector<double>(y.begin(), y.end()))};
  return e;
}

EvalResult evaluate(const model::Mvmtnet& model, std::span<const Example> split) {
  if (split.empty()) throw ContractError("evaluate: empty split");
  EvalResult r;
  double loss = 0.0;
  std::size_t hits = 0;
  for (const auto& ex : split) {
    ad::Tape tape(false);
    const ad::Tensor z = model.logits(tape, ex.ecg, ex.notes, false);
    loss += bce_with_logits(z.data(), ex.targets.data());
    std::vector<double> p(z.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double zi = z[i];
      p[i] = zi >= 0.0 ? 1.0 / (1.0 + std::exp(-zi)) : std::exp(zi) / (1.0 + std::exp(zi));
    }
    hits += top1_hit(p, ex.labels) ? 1 : 0;
    r.logits.emplace_back(z.data().begin(), z.data().end());
    r.probabilities.push_back(std::move(p));
  }
  const double n = static_cast<double>(split.size());
  r.loss = loss / n;
  r.accuracy = static_cast<double>(hits) / n;
  return r;
}

EpochResult train_epoch(model::Mvmtnet& model, std::span<const Example> split, AdamState& state,
                        const TrainConfig& config, Rng& rng, std::size_t epoch) {
  config.validate();
  if (split.empty()) throw ContractError("train_epoch: empty split");
  const auto& params = model.parameters();
  std::vector<std::size_t> order(split.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order.begin(), order.end());

  double loss_total = 0.0;
  std::size_t hits = 0;
  for (std::size_t start = 0, batch = 0; start < order.size(); start += config.batch_size, ++batch) {
    const std::size_t end = std::min(order.size(), start + config.batch_size);
    const double weight = 1.0 / static_cast<double>(end - start);
    for (const auto& p : params) {
      ad::Tensor t = p.tensor;
      t.zero_grad();
    }
    for (std::size_t i = start; i < end; ++i) {
      const Example& ex = split[order[i]];
      ad::Tape tape;
      const ad::Tensor z = model.logits(tape, ex.ecg, ex.notes, true, &rng);
      const ad::Tensor loss = bce_with_logits(tape, z, ex.targets);
      if (!std::isfinite(loss.item())) {
        throw NumericalError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                             std::to_string(batch) + " (record " + ex.record_id + ")");
      }
      tape.backward(ad::scale(tape, loss, weight));
      loss_total += loss.item();
      hits += ex.labels.test(argmax(z.data())) ? 1 : 0;
    }
    try {
      adam_step(params, state, config);
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch));
    }
  }
  const double n = static_cast<double>(split.size());
  return {loss_total / n, static_cast<double>(hits) / n};
}

EarlyStopOutcome run_early_stopping(const std::function<double(std::size_t)>& run_epoch,
                                    const std::function<void(std::size_t)>& on_best, std::size_t patience,
                                    std::size_t max_epochs) {
  if (patience == 0) throw ContractError("early stopping needs patience of at least 1");
  EarlyStopOutcome out;
  std::size_t since_best = 0;
  for (std::size_t epoch = 1; epoch <= max_epochs; ++epoch) {
    const double error = run_epoch(epoch);
    out.epochs_run = epoch;
    if (out.best_epoch == 0 || error < out.best_error) {
      out.best_epoch = epoch;
      out.best_error = error;
      since_best = 0;
      if (on_best) on_best(epoch);
    } else if (++since_best >= patience) {
      out.stopped_early = epoch < max_epochs;
      break;
    }
  }
  return out;
}

FitResult fit_with_early_stop(model::Mvmtnet& model, std::span<const Example> train_split,
                              std::span<const Example> val_split, const TrainConfig& config,
                              const EpochCallback& on_epoch) {
  config.validate();
  if (train_split.empty() || val_split.empty()) throw ContractError("fit_with_early_stop: empty split");
  Rng rng(config.seed);
  AdamState state = AdamState::for_params(model.parameters());
  model::Mvmtnet best = model.clone();
  FitResult result;

  const auto outcome = run_early_stopping(
      [&](std::size_t epoch) {
        const EpochResult pass = train_epoch(model, train_split, state, config, rng, epoch);
        EpochStats stats{epoch, pass.loss, 0.0, 1.0 - pass.accuracy, 0.0};
        if (config.eval_train_split) {
          const EvalResult tr = evaluate(model, train_split);
          stats.train_loss = tr.loss;
          stats.train_error = 1.0 - tr.accuracy;
        }
        const EvalResult val = evaluate(model, val_split);
        stats.val_loss = val.loss;
        stats.val_error = 1.0 - val.accuracy;
        result.history.push_back(stats);
        if (on_epoch) on_epoch(stats);
        return stats.val_error;
      },
      [&](std::size_t) { best.copy_parameters_from(model); }, config.early_stop_patience, config.max_epochs);

  model.copy_parameters_from(best);
  result.best_epoch = outcome.best_epoch;
  result.best_val_error = outcome.best_error;
  result.stopped_early = outcome.stopped_early;
  return result;
}

}  // namespace mvmt::train
