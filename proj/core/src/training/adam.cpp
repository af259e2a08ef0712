// SPDX-License-Identifier: Apache-2.0
#include "mvmt/training/adam.hpp"

#include <cmath>

#include "mvmt/error.hpp"

namespace mvmt::train {

AdamState AdamState::for_params(std::span<const ad::NamedTensor> params) {
  AdamState s;
  for (const auto& p : params) {
    s.m.emplace_back(p.tensor.size(), 0.0);
    s.v.emplace_back(p.tensor.size(), 0.0);
  }
  return s;
}

void adam_step(std::span<const ad::NamedTensor> params, AdamState& state, const TrainConfig& config) {
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw ContractError("adam_step: optimizer state does not match the parameter list");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& t = params[i].tensor;
    if (state.m[i].size() != t.size() || state.v[i].size() != t.size()) {
      throw ContractError("adam_step: moment size mismatch for " + params[i].name);
    }
    if (!t.has_grad()) continue;
    for (double g : t.grad()) {
      if (!std::isfinite(g)) throw NumericalError("non-finite gradient in parameter " + params[i].name);
    }
  }
  state.t += 1;
  const double b1 = config.adam_beta1;
  const double b2 = config.adam_beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    ad::Tensor t = params[i].tensor;
    const bool has = t.has_grad();
    const auto g = t.grad();
    auto x = t.mutable_data();
    auto& m = state.m[i];
    auto& v = state.v[i];
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double gj = has ? g[j] : 0.0;
      m[j] = b1 * m[j] + (1.0 - b1) * gj;
      v[j] = b2 * v[j] + (1.0 - b2) * gj * gj;
      const double mhat = m[j] / c1;
      const double vhat = v[j] / c2;
      x[j] -= config.learning_rate * mhat / (std::sqrt(vhat) + config.adam_eps);
    }
  }
}

}  // namespace mvmt::train
