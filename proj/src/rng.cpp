#include "loclim/rng.hpp"

namespace loclim {

std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t stream_id(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
  constexpr std::uint64_t k1 = 0x9E3779B97F4A7C15ULL;
  constexpr std::uint64_t k2 = 0xD1B54A32D192ED03ULL;
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ ((a + 1) * k1));
  return mix64(h ^ ((b + 1) * k2));
}

Engine make_engine(std::uint64_t stream) noexcept {
  std::seed_seq seq{static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Engine(seq);
}

}  // namespace loclim
