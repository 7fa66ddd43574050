#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace vulngraph {

/// 64-bit FNV-1a with a configurable offset basis so independent hash
/// families can be derived from one function.
constexpr std::uint64_t fnv1a64(std::string_view s,
                                std::uint64_t basis = 0xcbf29ce484222325ULL) {
  std::uint64_t h = basis;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Mix for deriving seeded hash families (splitmix64 finalizer).
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stable 128-bit content hash rendered as 32 lowercase hex chars.
/// Used as the sample_id of a source file; deterministic across runs
/// and platforms.
std::string content_hash(std::string_view text);

}  // namespace vulngraph
