// SPDX-License-Identifier: Apache-2.0
#include "csta/rng.hpp"

#include <cmath>
#include <numbers>

#include "csta/errors.hpp"

namespace csta {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::size_t Rng::uniform_index(std::size_t n) {
    if (n == 0) throw ContractError("uniform_index requires n > 0");
    // Rejection sampling over the largest multiple of n that fits in 64 bits.
    std::uint64_t range = n;
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t draw;
    do {
        draw = next_u64();
    } while (draw >= limit);
    return static_cast<std::size_t>(draw % range);
}

double Rng::uniform_real() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal(double mean, double stddev) {
    if (has_spare_) {
        has_spare_ = false;
        return mean + stddev * spare_;
    }
    double u1;
    do {
        u1 = uniform_real();
    } while (u1 <= 0.0);
    double u2 = uniform_real();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return mean + stddev * radius * std::cos(angle);
}

Rng Rng::child(std::uint64_t stream) const {
    return Rng(splitmix64(base_seed_ ^ splitmix64(stream + 1)));
}

} // namespace csta
