#pragma once

#include <array>
#include <cstdint>

namespace awd3 {

/// Explicitly seeded xoshiro256++ stream. All randomness in the project flows
/// through instances of this class so that runs replay bit-identically from a
/// single seed, and so that generator state can be checkpointed as four words.
class Rng {
  public:
    Rng() : Rng(0) {}
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform01();

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi);

    /// Uniform index in [0, n). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n);

    /// Standard normal via the Marsaglia polar method (no hidden cache, so
    /// the state below is the entire generator state).
    double normal();
    double normal(double mean, double stddev);

    /// Two independent standard normals from one polar acceptance.
    std::array<double, 2> normal_pair();

    std::array<std::uint64_t, 4> state() const { return state_; }
    void set_state(const std::array<std::uint64_t, 4>& s) { state_ = s; }

    /// Derive an independent stream for a named purpose. Streams produced
    /// from the same (seed, id) pair are identical across runs.
    static Rng stream(std::uint64_t seed, std::uint64_t stream_id);

  private:
    std::array<std::uint64_t, 4> state_{};
};

/// SplitMix64 step; used for seed expansion and stream derivation.
std::uint64_t splitmix64(std::uint64_t& x);

} // namespace awd3
