#pragma once

#include <cstdint>
#include <random>

namespace dpocs {

/// Seedable random stream with bitwise-reproducible output.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Distributions are implemented here rather than taken from
/// <random>, whose algorithms are implementation-defined:
///   - uniform01: top 53 bits of one engine draw, times 2^-53
///   - normal:    Box-Muller on (1 - uniform01, uniform01), second value cached
///   - uniform_int: rejection sampling on one engine draw per attempt
/// Independent streams are derived from (seed, stream) with splitmix64.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream);

    double uniform01();
    double uniform(double lo, double hi);
    double normal();
    /// Uniform on the closed range [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace dpocs
