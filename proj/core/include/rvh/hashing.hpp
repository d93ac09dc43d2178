#ifndef RVH_HASHING_HPP
#define RVH_HASHING_HPP

#include <cstdint>
#include <cstring>
#include <span>

namespace rvh {

inline constexpr std::uint64_t kDefaultHashSeed = 0x52564831u;

/// 64-bit finalizer with full avalanche (murmur3 fmix64).
constexpr std::uint64_t mix64(std::uint64_t k) {
  k ^= k >> 33;
  k *= 0xff51afd7ed558ccdULL;
  k ^= k >> 33;
  k *= 0xc4ceb9fe1a85ec53ULL;
  k ^= k >> 33;
  return k;
}

/// Seeded hash of a packed bit string. The bit length is folded in after the
/// payload so keys like "0" and "00" (identical bytes) hash differently.
inline std::uint64_t hash_bits(std::span<const std::uint8_t> bytes,
                               std::uint32_t bit_count, std::uint64_t seed) {
  std::uint64_t h = seed;
  std::size_t n = bytes.size();
  const std::uint8_t* p = bytes.data();
  while (n >= 8) {
    std::uint64_t lane;
    std::memcpy(&lane, p, 8);
    h = mix64(h ^ lane);
    p += 8;
    n -= 8;
  }
  if (n > 0) {
    std::uint64_t tail = 0;
    std::memcpy(&tail, p, n);
    h = mix64(h ^ tail);
  }
  return mix64(h ^ (std::uint64_t{bit_count} + 0x9e3779b97f4a7c15ULL));
}

}  // namespace rvh

#endif  // RVH_HASHING_HPP
