#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace hyperbc {

using Engine = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// FNV-1a, used to turn check names into stream tags.
inline constexpr std::uint64_t hash_tag(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// A splittable stream key. Every independent consumer of randomness gets
/// its own child key, and every chunk of a Monte Carlo run draws from
/// engine(chunk). Results therefore depend only on (seed, split path), not
/// on thread count or scheduling.
class RandomStream {
 public:
  constexpr explicit RandomStream(std::uint64_t seed) : key_(splitmix64(seed)) {}

  [[nodiscard]] constexpr RandomStream split(std::uint64_t tag) const {
    return RandomStream(FromKey{}, splitmix64(key_ ^ splitmix64(tag + 0x5851f42d4c957f2dULL)));
  }
  [[nodiscard]] constexpr RandomStream split(std::string_view name) const {
    return split(hash_tag(name));
  }

  [[nodiscard]] Engine engine(std::uint64_t index = 0) const {
    return Engine(splitmix64(key_ + splitmix64(index)));
  }

  [[nodiscard]] constexpr std::uint64_t key() const { return key_; }

 private:
  struct FromKey {};
  constexpr RandomStream(FromKey, std::uint64_t key) : key_(key) {}
  std::uint64_t key_;
};

}  // namespace hyperbc
