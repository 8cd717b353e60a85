#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace delegate {

/// SplitMix64 output function; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// FNV-1a over the bytes of a label.
constexpr std::uint64_t hash_label(std::string_view label) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Address of one random stream: base seed, experiment label, trial index.
struct SeedPath {
  std::uint64_t base = 0;
  std::string_view label;
  std::uint64_t trial = 0;

  std::uint64_t key() const noexcept {
    return mix64(mix64(base ^ hash_label(label)) ^ mix64(trial + 0x632BE59BD9B4E019ULL));
  }
};

/// Counter-based generator: the i-th output is mix64(key + i * golden).
///
/// A stream is fully determined by its key, so every trial of an experiment
/// owns an independent stream derived from (seed, label, trial) and results do
/// not depend on how trials are scheduled across workers. Satisfies
/// UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t key) noexcept : state_(key) {}
  explicit RngStream(const SeedPath& path) noexcept : state_(path.key()) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on the open interval (0, 1); never returns 0 or 1.
  double uniform01() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

}  // namespace delegate
