// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>

#include "csta/tape.hpp"
#include "csta/tensor.hpp"

namespace csta {

/// Builds a scalar-valued computation from one input on a fresh tape.
using ScalarBuilder = std::function<Var(Tape&, Var)>;

/// Compares the analytic gradient of `f` at `point` against central finite
/// differences with step `eps`. Returns the max over coordinates of
/// |analytic - numeric| / max(1, |numeric|).
///
/// `f` must be scalar-valued and differentiable at `point` (keep clear of
/// relu kinks). Throws ContractError if f is not scalar.
double grad_check(const ScalarBuilder& f, const Tensor& point, double eps = 1e-5);

/// Evaluates `f` at `point` without tracking gradients.
double eval_scalar(const ScalarBuilder& f, const Tensor& point);

} // namespace csta
