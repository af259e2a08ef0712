// SPDX-License-Identifier: Apache-2.0
#include "mvmt/training/loss.hpp"

#include <cmath>

#include "mvmt/error.hpp"

namespace mvmt::train {
namespace {

void check(std::span<const double> z, std::span<const double> y) {
  if (z.size() != y.size() || z.empty()) {
    throw ShapeError("bce_with_logits: " + std::to_string(z.size()) + " logits vs " + std::to_string(y.size()) +
                     " targets");
  }
  for (double t : y) {
    if (t != 0.0 && t != 1.0) throw ContractError("bce_with_logits: targets must be 0 or 1");
  }
}

double term(double z, double y) { return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z))); }

double stable_sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

double bce_with_logits(std::span<const double> logits, std::span<const double> targets) {
  check(logits, targets);
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) total += term(logits[i], targets[i]);
  return total / static_cast<double>(logits.size());
}

ad::Tensor bce_with_logits(ad::Tape& tape, const ad::Tensor& logits, const ad::Tensor& targets) {
  if (logits.shape() != targets.shape()) {
    throw ShapeError("bce_with_logits: logits " + ad::shape_str(logits.shape()) + " vs targets " +
                     ad::shape_str(targets.shape()));
  }
  ad::Tensor out = ad::Tensor::scalar(bce_with_logits(logits.data(), targets.data()));
  if (tape.wants_grad({&logits})) {
    tape.record(out, [out, logits, targets]() mutable {
      const double g = out.grad()[0] / static_cast<double>(logits.size());
      std::vector<double> delta(logits.size());
      for (std::size_t i = 0; i < delta.size(); ++i) delta[i] = g * (stable_sigmoid(logits[i]) - targets[i]);
      logits.accumulate_grad(delta);
    });
  }
  return out;
}

}  // namespace mvmt::train
