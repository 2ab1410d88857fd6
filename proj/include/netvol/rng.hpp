#pragma once

#include <cmath>
#include <cstdint>

// Counter-based random streams: stream k of seed s is a pure function of
// (s, k), so points can be drawn in parallel and reproduced independently of
// worker scheduling. Each stream is a SplitMix64 sequence whose initial state
// is a double-mixed hash of (seed, stream).

namespace netvol {

class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream) {
        state_ = mix(mix(seed + 0x9e3779b97f4a7c15ull * (stream + 1)) ^ stream);
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    /// Uniform double in [0, 1).
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [-1, 1].
    double next_symmetric() { return 2.0 * next_unit() - 1.0; }

    /// Standard exponential via inversion (never returns +inf).
    double next_exponential() { return -std::log1p(-next_unit()); }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
};

}  // namespace netvol
