// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <vector>

#include "csta/rng.hpp"
#include "csta/tensor.hpp"

namespace csta::test {

inline Tensor random_tensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
    Tensor t(std::move(shape));
    for (double& v : t.data()) v = rng.uniform_real(lo, hi);
    return t;
}

/// Random values bounded away from zero, for relu-adjacent gradient checks.
inline Tensor random_tensor_off_zero(Shape shape, Rng& rng, double margin = 0.1) {
    Tensor t(std::move(shape));
    for (double& v : t.data()) {
        const double magnitude = margin + rng.uniform_real(0.0, 1.0);
        v = rng.uniform_real(0.0, 1.0) < 0.5 ? -magnitude : magnitude;
    }
    return t;
}

inline bool bit_identical(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return false;
    }
    return true;
}

inline double max_abs_diff(const Tensor& a, const Tensor& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    return worst;
}

} // namespace csta::test
