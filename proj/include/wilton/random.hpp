#pragma once

#include <cstdint>

namespace wilton {

/// Counter-based SplitMix64 stream.
///
/// Every (seed, stream) pair names an independent sequence. The i-th output
/// is mix64(key + (i + 1) * kGolden), where key = mix64(seed ^ mix64(stream +
/// kStreamSalt)) and mix64 is the SplitMix64 finalizer (Stafford variant 13:
/// shifts 30/27/31, multipliers 0xbf58476d1ce4e5b9 and 0x94d049bb133111eb).
/// Sample index i of a Monte Carlo run always uses stream i, so results do
/// not depend on how indices are split across workers.
class CounterRng {
public:
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
    static constexpr std::uint64_t kStreamSalt = 0xd1b54a32d192ed03ULL;

    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

    std::uint64_t next() noexcept;

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform() noexcept;

    static std::uint64_t mix64(std::uint64_t z) noexcept;

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace wilton
