#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace urbannet::util {

/// splitmix64 step; used to derive per-repeat / per-tree seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic seed for sub-task `index` of a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 1));
}

/// FNV-1a 64-bit string hash. std::hash is implementation-defined; this one is
/// pinned so fold assignments and seeds are stable across builds.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Shortest round-trip decimal form of a double (std::to_chars).
std::string format_double(double v);

/// Locale-independent double parse; throws std::invalid_argument on bad input.
double parse_double(std::string_view s);

/// Locale-independent integer parse; throws std::invalid_argument on bad input.
long long parse_int(std::string_view s);

}  // namespace urbannet::util
