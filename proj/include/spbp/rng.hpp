#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace spbp {

// Stateless 64-bit finalizer (splitmix64). Used to derive independent
// stream seeds from structured keys such as (seed, slot, link).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::initializer_list<std::uint64_t> key) noexcept {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (auto k : key) h = mix64(h ^ mix64(k));
  return h;
}

// Small counter-based engine satisfying UniformRandomBitGenerator. Cheap to
// construct, so every keyed draw gets its own stream.
class KeyedRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr KeyedRng(std::uint64_t seed) noexcept : state_(seed) {}
  KeyedRng(std::initializer_list<std::uint64_t> key) noexcept : state_(derive_seed(key)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

}  // namespace spbp
