#pragma once

#include <cstdint>
#include <limits>

namespace matchlab {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: the i-th output of a stream is
/// mix64(key + i * 0x9E3779B97F4A7C15), i = 1, 2, ...
///
/// The key fully identifies the stream, so child streams can be derived from
/// (parent key, stream id) without touching the parent's counter. Every draw
/// is defined in terms of next() with no libstdc++ distribution in between,
/// so sequences are bit-identical across platforms.
///
/// A stream is owned by one thread; never share an instance.
class Rng {
 public:
  using result_type = std::uint64_t;

  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  explicit Rng(std::uint64_t seed) noexcept : key_(mix64(seed ^ 0x6A09E667F3BCC909ULL)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return next(); }

  result_type next() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
  }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Unbiased integer in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept;

  /// Independent child stream. Does not advance this stream.
  [[nodiscard]] Rng split(std::uint64_t stream) const noexcept {
    Rng child(0);
    child.key_ = mix64(key_ ^ mix64((stream + 1) * kGolden));
    return child;
  }

  [[nodiscard]] std::uint64_t key() const noexcept { return key_; }
  [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace matchlab
