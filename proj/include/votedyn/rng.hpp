#pragma once

// Random number generation for votedyn.
//
// Everything is built on SplitMix64 (Steele, Lea & Flood 2014). The generator
// state advances by a fixed odd gamma and each output is a bijective mix of
// the state, so the i-th output of a stream seeded with `key` is
// mix64(key + (i + 1) * gamma). That closed form gives us a counter-based
// generator for free: a vertex can draw its k-th variate of step t without
// touching any shared state, which is what makes a step bit-reproducible
// regardless of evaluation order.
//
// Only integer arithmetic is used, so streams are identical on every
// platform. Floating-point conversion is done by hand instead of through
// <random> distributions, whose output is implementation defined.

#include <cstdint>
#include <string_view>

namespace votedyn {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Output number `counter` (0-based) of a SplitMix64 stream seeded with `key`.
constexpr std::uint64_t counter_draw(std::uint64_t key, std::uint64_t counter) noexcept {
  return mix64(key + (counter + 1) * kGoldenGamma);
}

/// Derives an independent child key from a parent key and a tag.
constexpr std::uint64_t derive_key(std::uint64_t parent, std::uint64_t tag) noexcept {
  return mix64(mix64(parent ^ 0x6a09e667f3bcc909ULL) + (tag + 1) * 0xd1b54a32d192ed03ULL);
}

/// FNV-1a, used to turn experiment ids into key tags.
constexpr std::uint64_t hash_tag(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t x) noexcept {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

/// Maps x onto {0, ..., bound-1} by the multiply-high method. The bias is at
/// most bound / 2^64, far below anything a simulation can resolve.
constexpr std::uint64_t to_bounded(std::uint64_t x, std::uint64_t bound) noexcept {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(x) * bound) >> 64);
}

/// Sequential SplitMix64 stream.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t operator()() noexcept {
    state_ += kGoldenGamma;
    return mix64(state_);
  }

  static constexpr std::uint64_t min() noexcept { return 0; }
  static constexpr std::uint64_t max() noexcept { return ~std::uint64_t{0}; }

  constexpr double uniform() noexcept { return to_unit((*this)()); }
  constexpr std::uint64_t below(std::uint64_t bound) noexcept {
    return to_bounded((*this)(), bound);
  }

 private:
  std::uint64_t state_;
};

}  // namespace votedyn
