// SPDX-License-Identifier: Apache-2.0
#include "csta/grad_check.hpp"

#include <cmath>
#include <vector>

#include "csta/errors.hpp"

namespace csta {

double eval_scalar(const ScalarBuilder& f, const Tensor& point) {
    Tensor local = point;
    local.set_requires_grad(false);
    Tape tape;
    Var out = f(tape, tape.leaf(local));
    if (tape.value(out).size() != 1) {
        throw ContractError("grad_check requires a scalar-valued function, got shape " +
                            shape_to_string(tape.value(out).shape()));
    }
    return tape.value(out)[0];
}

double grad_check(const ScalarBuilder& f, const Tensor& point, double eps) {
    Tensor local = point;
    local.set_requires_grad(true);
    local.zero_grad();
    {
        Tape tape;
        Var out = f(tape, tape.leaf(local));
        if (tape.value(out).size() != 1) {
            throw ContractError("grad_check requires a scalar-valued function, got shape " +
                                shape_to_string(tape.value(out).shape()));
        }
        tape.backward(out);
    }
    std::vector<double> analytic(local.grad().begin(), local.grad().end());

    Tensor probe = point;
    probe.set_requires_grad(false);
    double worst = 0.0;
    for (std::size_t i = 0; i < probe.size(); ++i) {
        const double saved = probe[i];
        probe[i] = saved + eps;
        const double up = eval_scalar(f, probe);
        probe[i] = saved - eps;
        const double down = eval_scalar(f, probe);
        probe[i] = saved;
        const double numeric = (up - down) / (2.0 * eps);
        const double err = std::abs(analytic[i] - numeric) / std::max(1.0, std::abs(numeric));
        worst = std::max(worst, err);
    }
    return worst;
}

} // namespace csta
