#pragma once

#include <cstdint>
#include <random>

namespace loclim {

using Engine = std::mt19937_64;

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t z) noexcept;

// Sub-stream id for (master seed, component or purpose, replicate).
// stream = mix64(mix64(mix64(seed) ^ (a + 1) * K1) ^ (b + 1) * K2)
// with K1 = 0x9E3779B97F4A7C15 and K2 = 0xD1B54A32D192ED03.
std::uint64_t stream_id(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept;

Engine make_engine(std::uint64_t stream) noexcept;

// Purpose tags used as the middle argument of stream_id for non-path draws.
// Path components use their index (0..d-1), so tags start high.
namespace stream_tag {
inline constexpr std::uint64_t kReplicate = 1ULL << 32;
inline constexpr std::uint64_t kBootstrap = (1ULL << 32) + 1;
inline constexpr std::uint64_t kMomentChunk = (1ULL << 32) + 2;
inline constexpr std::uint64_t kBrownianClock = (1ULL << 32) + 3;
inline constexpr std::uint64_t kInequality = (1ULL << 32) + 4;
inline constexpr std::uint64_t kProbe = (1ULL << 32) + 5;
}  // namespace stream_tag

}  // namespace loclim
