// SPDX-License-Identifier: Apache-2.0
#include "mvmt/autodiff/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "mvmt/error.hpp"

namespace mvmt::ad {
namespace {

void check_step(double h) {
  if (!(h >= 1e-6 && h <= 1e-4)) throw ContractError("finite_diff_check: step h must lie in [1e-6, 1e-4]");
}

double evaluate(const std::function<Tensor(Tape&)>& loss) {
  Tape tape(false);
  return loss(tape).item();
}

}  // namespace

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-12});
  return std::abs(analytic - numeric) / denom;
}

double finite_diff_check(const std::function<Tensor(Tape&, const Tensor&)>& f, const Tensor& x, double h) {
  Tensor leaf = x.clone(true);
  const auto results = finite_diff_check([&](Tape& tape) { return f(tape, leaf); },
                                         std::vector<NamedTensor>{{"x", leaf}}, h);
  return results.front().max_relative_error;
}

std::vector<ParameterGradCheck> finite_diff_check(const std::function<Tensor(Tape&)>& loss,
                                                  std::span<const NamedTensor> params, double h) {
  check_step(h);
  std::vector<Tensor> saved;
  for (const auto& p : params) {
    Tensor t = p.tensor;
    if (!t.requires_grad()) throw ContractError("finite_diff_check: parameter " + p.name + " does not require gradients");
    saved.push_back(t.clone());
    t.zero_grad();
  }
  {
    Tape tape;
    const Tensor value = loss(tape);
    tape.backward(value);
  }

  std::vector<ParameterGradCheck> report;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Tensor t = params[pi].tensor;
    ParameterGradCheck entry{params[pi].name};
    std::vector<double> analytic(t.size(), 0.0);
    if (t.has_grad()) std::copy(t.grad().begin(), t.grad().end(), analytic.begin());
    auto data = t.mutable_data();
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double original = data[i];
      data[i] = original + h;
      const double up = evaluate(loss);
      data[i] = original - h;
      const double down = evaluate(loss);
      data[i] = original;
      const double numeric = (up - down) / (2.0 * h);
      const double err = relative_error(analytic[i], numeric);
      if (i == 0 || err > entry.max_relative_error) {
        entry.max_relative_error = err;
        entry.worst_index = i;
        entry.analytic = analytic[i];
        entry.numeric = numeric;
      }
    }
    std::copy(saved[pi].data().begin(), saved[pi].data().end(), data.begin());
    report.push_back(entry);
  }
  return report;
}

}  // namespace mvmt::ad
