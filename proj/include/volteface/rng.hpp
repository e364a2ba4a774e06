#pragma once

#include <cstdint>
#include <cmath>

namespace volteface {

/// SplitMix64 finalizer; full-avalanche 64-bit mix.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Per-path generator keyed by (master seed, path index). The stream depends
/// only on the key, never on scheduling, so batches are reproducible for any
/// worker count. Internally a SplitMix64 walk from a mixed starting point.
class PathRng {
  public:
    PathRng(std::uint64_t master_seed, std::uint64_t path_index)
        : state_(mix64(master_seed ^ mix64(path_index ^ 0x5851F42D4C957F2DULL))) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform on (0, 1]; never returns 0, safe under log.
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    double next_exponential(double rate) { return -std::log(next_unit()) / rate; }

    bool next_bernoulli(double p) { return next_unit() <= p; }

  private:
    std::uint64_t state_ = 0;
};

}  // namespace volteface
