// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mvmt/autodiff/tape.hpp"
#include "mvmt/autodiff/tensor.hpp"

namespace mvmt::ad {

/// Relative error used by the gradient checks:
/// |analytic − numeric| / max(|analytic|, |numeric|, 1e-12).
double relative_error(double analytic, double numeric);

/// Compares the tape gradient of scalar f at x with central differences of
/// step h (h in [1e-6, 1e-4]); returns the maximum relative error over all
/// coordinates of x.
double finite_diff_check(const std::function<Tensor(Tape&, const Tensor&)>& f, const Tensor& x,
                         double h = 1e-5);

struct ParameterGradCheck {
  std::string name;
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

/// Same check against a set of leaf parameters that `loss` closes over. Each
/// parameter is perturbed in place and restored afterwards.
std::vector<ParameterGradCheck> finite_diff_check(const std::function<Tensor(Tape&)>& loss,
                                                  std::span<const NamedTensor> params,
                                                  double h = 1e-5);

}  // namespace mvmt::ad
