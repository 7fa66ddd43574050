#include "vulngraph/common/hash.hpp"

#include <array>
#include <cstdio>

namespace vulngraph {

std::string content_hash(std::string_view text) {
  // Two independent FNV-1a streams; the second runs over the reversed
  // bytes so the halves do not collide in lockstep.
  std::uint64_t lo = fnv1a64(text);
  std::uint64_t hi = 0x84222325cbf29ce4ULL;
  for (auto it = text.rbegin(); it != text.rend(); ++it) {
    hi ^= static_cast<unsigned char>(*it);
    hi *= 0x100000001b3ULL;
  }
  hi = mix64(hi ^ text.size());
  char buf[33];
  std::snprintf(buf, sizeof(buf), "%016llx%016llx",
                static_cast<unsigned long long>(hi),
                static_cast<unsigned long long>(lo));
  return std::string(buf, 32);
}

}  // namespace vulngraph
