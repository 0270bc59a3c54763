#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace wellclust {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_label(std::string_view label) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seed of the labeled substream `label`/`index` derived from a top-level seed.
/// Every random consumer in the library draws from its own substream so that
/// results do not depend on call order or thread scheduling.
constexpr std::uint64_t substream_seed(std::uint64_t seed, std::string_view label,
                                       std::uint64_t index = 0) noexcept {
  return mix64(mix64(seed ^ hash_label(label)) + mix64(index + 0x632be59bd9b4e019ULL));
}

inline Rng make_rng(std::uint64_t seed, std::string_view label, std::uint64_t index = 0) {
  return Rng(substream_seed(seed, label, index));
}

}  // namespace wellclust
