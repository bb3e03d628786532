#pragma once

#include <cstdint>
#include <initializer_list>

namespace nfloc {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a parent seed and a path of
/// integer labels (trial index, subcarrier index, purpose tag, ...).
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = mix64(parent);
  for (std::uint64_t label : path) s = mix64(s ^ mix64(label + 0x632be59bd9b4e019ULL));
  return s;
}

// Stream tags.
inline constexpr std::uint64_t kTagSymbols = 1;
inline constexpr std::uint64_t kTagNoise = 2;
inline constexpr std::uint64_t kTagScene = 3;

}  // namespace nfloc
