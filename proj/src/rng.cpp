#include "spinner/rng.hpp"

namespace spinner {

namespace {

__extension__ using Uint128 = unsigned __int128;

std::uint32_t lo(std::uint64_t x) { return static_cast<std::uint32_t>(x); }
std::uint32_t hi(std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::seed_seq seq{lo(seed), hi(seed)};
  engine_.seed(seq);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t step) {
  std::seed_seq seq{lo(seed), hi(seed), lo(stream), hi(stream), lo(step), hi(step), 0x5350u};
  engine_.seed(seq);
}

// Lemire's nearly-divisionless bounded integer method.
std::uint64_t Rng::uniform_index(std::uint64_t n) {
  Uint128 product = static_cast<Uint128>(engine_()) * n;
  auto low = static_cast<std::uint64_t>(product);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      product = static_cast<Uint128>(engine_()) * n;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::uint64_t>(product >> 64);
}

}  // namespace spinner
