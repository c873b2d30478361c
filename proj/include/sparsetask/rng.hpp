#pragma once

#include <cstdint>
#include <random>

namespace sparsetask {

/// Seedable generator with portable output.
///
/// The engine is std::mt19937_64, whose sequence is fixed by the standard;
/// distributions come from Boost.Random so that draws match across standard
/// library implementations. child(i) derives an independent stream by
/// mixing the parent seed with i through splitmix64, so per-task streams can
/// be generated in any order or in parallel.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] Rng child(std::uint64_t stream) const;

    double normal(double mean = 0.0, double stddev = 1.0);
    double uniform();  ///< in [0, 1)
    std::uint64_t index(std::uint64_t n);  ///< uniform in [0, n)

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Derived seed for a numbered sub-experiment of `base`.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

}  // namespace sparsetask
