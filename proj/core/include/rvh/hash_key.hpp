#ifndef RVH_HASH_KEY_HPP
#define RVH_HASH_KEY_HPP

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>

#include "rvh/hashing.hpp"
#include "rvh/range_vector.hpp"
#include "rvh/rule.hpp"

namespace rvh {

/// Packed MSB-first bit string plus its 64-bit hash. Fixed inline storage;
/// total key length (sum of base-vector components) is capped at kMaxBits.
/// A zero-length key is legal and hashes like any other.
class HashKey {
 public:
  static constexpr std::size_t kMaxBytes = 16;
  static constexpr std::uint32_t kMaxBits = kMaxBytes * 8;

  /// Appends the low `count` bits of `bits`, most significant first.
  void append_bits(std::uint64_t bits, unsigned count) {
    while (count > 0) {
      const unsigned offset = bit_count_ % 8;
      const unsigned room = 8 - offset;
      const unsigned take = count < room ? count : room;
      const std::uint8_t chunk =
          static_cast<std::uint8_t>((bits >> (count - take)) & low_mask(take));
      bytes_[bit_count_ / 8] |= static_cast<std::uint8_t>(chunk << (room - take));
      bit_count_ += take;
      count -= take;
    }
  }

  void finalize(std::uint64_t seed) { hash_ = hash_bits(bytes(), bit_count_, seed); }

  std::uint32_t bit_count() const { return bit_count_; }
  std::uint64_t hash() const { return hash_; }

  std::span<const std::uint8_t> bytes() const {
    return {bytes_.data(), (bit_count_ + 7) / 8};
  }

  /// Bit-exact equality; padding bits are always zero so byte compare suffices.
  bool same_key(const HashKey& other) const {
    return bit_count_ == other.bit_count_ &&
           std::memcmp(bytes_.data(), other.bytes_.data(), (bit_count_ + 7) / 8) == 0;
  }

 private:
  std::array<std::uint8_t, kMaxBytes> bytes_{};
  std::uint32_t bit_count_ = 0;
  std::uint64_t hash_ = 0;
};

/// Key for a stored rule: the top base[k] bits of each field, concatenated.
/// Requires fields[k].length >= base[k], which holds for any rule mapped to
/// the table owning `base`.
inline HashKey build_rule_key(const BaseVector& base, const Rule& rule,
                              const Widths& widths, std::uint64_t seed) {
  if (base.size() != rule.fields.size()) {
    throw std::invalid_argument("rule/base dimension mismatch");
  }
  HashKey key;
  for (std::size_t k = 0; k < base.size(); ++k) {
    key.append_bits(top_bits(rule.fields[k].value, base[k], widths[k]), base[k]);
  }
  key.finalize(seed);
  return key;
}

/// Same concatenation applied to full packet headers.
inline HashKey build_packet_key(const BaseVector& base, const Packet& packet,
                                const Widths& widths, std::uint64_t seed) {
  HashKey key;
  for (std::size_t k = 0; k < base.size(); ++k) {
    key.append_bits(top_bits(packet.headers[k], base[k], widths[k]), base[k]);
  }
  key.finalize(seed);
  return key;
}

}  // namespace rvh

#endif  // RVH_HASH_KEY_HPP
