// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace csta {

/// Seedable 64-bit random generator with portable distributions.
///
/// The core generator is std::mt19937_64, whose output sequence is fixed by
/// the C++ standard. The distribution functions below are implemented here
/// rather than with std::uniform_*_distribution, whose algorithms vary
/// between standard libraries; this keeps seeded runs reproducible across
/// platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : base_seed_(seed), engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Unbiased draw from [0, n) by rejection sampling. n must be > 0.
    std::size_t uniform_index(std::size_t n);

    /// Uniform real in [0, 1) with 53 bits of precision.
    double uniform_real();

    /// Uniform real in [lo, hi).
    double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform_real(); }

    /// Standard normal via Box-Muller; pairs are consumed deterministically.
    double normal(double mean, double stddev);

    /// Independent stream derived from (base seed, stream index).
    Rng child(std::uint64_t stream) const;

    /// Fisher-Yates shuffle driven by this generator.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = uniform_index(i);
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::uint64_t base_seed_;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// SplitMix64 mixing step, used for deriving child stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

} // namespace csta
