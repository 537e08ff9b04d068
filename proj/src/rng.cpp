#include "matchlab/rng.hpp"

namespace matchlab {

namespace {
__extension__ typedef unsigned __int128 u128;
}

// Lemire's multiply-shift with rejection.
std::uint64_t Rng::below(std::uint64_t bound) noexcept {
  u128 product = static_cast<u128>(next()) * bound;
  auto low = static_cast<std::uint64_t>(product);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      product = static_cast<u128>(next()) * bound;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::uint64_t>(product >> 64);
}

}  // namespace matchlab
