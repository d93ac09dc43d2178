#ifndef RVH_RULE_HPP
#define RVH_RULE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rvh {

using RuleId = std::uint32_t;
using Widths = std::vector<std::uint8_t>;

/// Returns a mask with the low `bits` bits set (bits may be 0..64).
constexpr std::uint64_t low_mask(unsigned bits) {
  return bits >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << bits) - 1);
}

/// A prefix over a `width`-bit field. `value` occupies the low `width` bits
/// with the significant prefix in the top `length` bits of that window;
/// everything below bit (width - length) is zero (canonical form).
struct Prefix {
  std::uint64_t value = 0;
  std::uint8_t length = 0;

  bool operator==(const Prefix&) const = default;
};

/// Zeroes the non-prefix bits of `value` so the invariant holds.
constexpr Prefix make_prefix(std::uint64_t value, unsigned length, unsigned width) {
  const std::uint64_t mask =
      length == 0 ? 0 : (low_mask(length) << (width - length));
  return Prefix{value & mask, static_cast<std::uint8_t>(length)};
}

/// True when the top `length` bits of `header` equal the prefix.
constexpr bool prefix_matches(const Prefix& p, std::uint64_t header, unsigned width) {
  if (p.length == 0) return true;
  return ((header ^ p.value) >> (width - p.length)) == 0;
}

/// Top `count` bits of the prefix window, right-aligned. count <= width.
constexpr std::uint64_t top_bits(std::uint64_t value, unsigned count, unsigned width) {
  if (count == 0) return 0;
  return (value >> (width - count)) & low_mask(count);
}

struct Rule {
  RuleId id = 0;
  std::vector<Prefix> fields;  // one per dimension
  std::uint32_t priority = 0;
  std::string action;
};

/// Analytic size of one stored rule record, including an allowance for the
/// id-index node that owns it. Used by the deterministic footprint accounting.
inline std::size_t rule_record_bytes(const Rule& rule) {
  constexpr std::size_t kIndexNodeOverhead = 32;
  return sizeof(Rule) + rule.fields.size() * sizeof(Prefix) +
         rule.action.size() + kIndexNodeOverhead;
}

struct Packet {
  std::vector<std::uint64_t> headers;  // full-width, one per dimension
};

/// Per-rule vector of field prefix lengths; the unit the partition carves up.
using LengthVector = std::vector<std::uint8_t>;

inline LengthVector rule_length_vector(const Rule& rule) {
  LengthVector lv;
  lv.reserve(rule.fields.size());
  for (const Prefix& p : rule.fields) lv.push_back(p.length);
  return lv;
}

inline bool rule_matches(const Rule& rule, const Packet& packet, const Widths& widths) {
  for (std::size_t k = 0; k < rule.fields.size(); ++k) {
    if (!prefix_matches(rule.fields[k], packet.headers[k], widths[k])) return false;
  }
  return true;
}

/// Total order used by every engine: priority descending, id ascending.
/// True when (pa, ia) ranks strictly ahead of (pb, ib).
constexpr bool ranks_before(std::uint32_t pa, RuleId ia, std::uint32_t pb, RuleId ib) {
  if (pa != pb) return pa > pb;
  return ia < ib;
}

/// Outcome of a classification. Priority 0 doubles as the no-match sentinel;
/// rule_id disambiguates a genuine priority-0 match from "nothing matched".
struct MatchResult {
  std::optional<RuleId> rule_id;
  std::uint32_t priority = 0;

  bool matched() const { return rule_id.has_value(); }
  bool operator==(const MatchResult&) const = default;
};

}  // namespace rvh

#endif  // RVH_RULE_HPP
