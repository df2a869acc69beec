#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace amb {

inline constexpr std::uint64_t kFnvOffsetBasis = 14695981039346656037ULL;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

/// 64-bit FNV-1a.
constexpr std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
    std::uint64_t h = kFnvOffsetBasis;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= kFnvPrime;
    }
    return h;
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = kFnvOffsetBasis;
    for (char ch : s) {
        h ^= static_cast<std::uint8_t>(ch);
        h *= kFnvPrime;
    }
    return h;
}

/// 64-bit LCG with Knuth's MMIX multiplier and increment.
class MmixLcg {
public:
    static constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;
    static constexpr std::uint64_t kIncrement = 1442695040888963407ULL;

    explicit constexpr MmixLcg(std::uint64_t seed) : state_(seed) {}

    constexpr std::uint64_t next() {
        state_ = state_ * kMultiplier + kIncrement;
        return state_;
    }

    /// Index in [0, n) from the high 32 bits of the next state; n must be > 0.
    constexpr std::uint64_t next_below(std::uint64_t n) { return (next() >> 32) % n; }

private:
    std::uint64_t state_;
};

}  // namespace amb
