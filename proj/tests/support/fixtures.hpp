#ifndef RVH_TESTS_FIXTURES_HPP
#define RVH_TESTS_FIXTURES_HPP

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rvh/range_vector.hpp"
#include "rvh/rule.hpp"
#include "rvh/ruleset.hpp"

namespace rvh::test {

inline Prefix bits_prefix(const std::string& bits, unsigned width) {
  std::uint64_t value = 0;
  for (char c : bits) value = (value << 1) | static_cast<std::uint64_t>(c - '0');
  return make_prefix(value << (width - bits.size()),
                     static_cast<unsigned>(bits.size()), width);
}

inline Rule make_rule(RuleId id, const std::string& sa, const std::string& da,
                      std::uint32_t priority, std::string action, unsigned width = 5) {
  Rule r;
  r.id = id;
  r.fields = {bits_prefix(sa, width), bits_prefix(da, width)};
  r.priority = priority;
  r.action = std::move(action);
  return r;
}

inline Packet pkt(std::uint64_t sa, std::uint64_t da) { return Packet{{sa, da}}; }

/// Ten-rule, two-field sample classifier over 5-bit fields. Small enough to
/// sweep its whole 1024-packet header space, rich enough to exercise
/// overlaps, wildcards, and every priority tier.
inline Ruleset toy_ruleset() {
  Ruleset rs;
  rs.widths = {5, 5};
  rs.rules = {
      make_rule(0, "100", "11010", 2, "fwd 0"),
      make_rule(1, "101", "1001", 2, "fwd 1"),
      make_rule(2, "11111", "10000", 4, "drop"),
      make_rule(3, "111", "1000", 2, "fwd 4"),
      make_rule(4, "0100", "0110", 3, "fwd 0"),
      make_rule(5, "001", "01001", 3, "fwd 2"),
      make_rule(6, "00", "01001", 3, "drop"),
      make_rule(7, "01110", "", 2, "drop"),
      make_rule(8, "110", "1", 1, "fwd 1"),
      make_rule(9, "", "", 0, "fwd 3"),
  };
  return rs;
}

/// The four-table partition the toy classifier is usually run under:
///   #0 ([3,6),[4,6))   #1 ([3,6),[0,4))   #2 ([0,3),[4,6))   #3 ([0,3),[0,4))
inline RangeVectorSet toy_partition() {
  std::vector<RangeVector> vectors;
  vectors.push_back({{{3, 6}, {4, 6}}});
  vectors.push_back({{{3, 6}, {0, 4}}});
  vectors.push_back({{{0, 3}, {4, 6}}});
  vectors.push_back({{{0, 3}, {0, 4}}});
  return RangeVectorSet(std::move(vectors), {5, 5});
}

inline const std::vector<std::uint8_t>& cluster_lengths() {
  static const std::vector<std::uint8_t> lengths = {0,  14, 15, 16, 17, 22, 23,
                                                    24, 25, 26, 30, 31, 32};
  return lengths;
}

/// Draw table for lengths: the same bands, weighted the way address rulesets
/// lean on them, with the /14-/16 spike carrying real mass.
inline const std::vector<std::uint8_t>& weighted_cluster_lengths() {
  static const std::vector<std::uint8_t> weighted = {
      0,  0,  0,  14, 14, 14, 14, 14, 14, 14, 15, 15, 15, 15, 15, 15, 15,
      16, 16, 17, 22, 23, 24, 25, 26, 30, 30, 31, 31, 32, 32, 32, 32};
  return weighted;
}

/// Two-field 32-bit ruleset with the shape real address rulesets show:
/// prefix lengths sit in a few dense bands, and values come from a limited
/// pool of address blocks, so rules share leading bits the way policies
/// written against assigned blocks do. The first |bands|^2 rules enumerate
/// every length combination so the tuple count is known and large; the rest
/// draw lengths uniformly from the bands. Priorities stay >= 1.
inline Ruleset clustered_ruleset(std::size_t count, std::uint64_t seed) {
  const auto& lengths = cluster_lengths();
  std::mt19937_64 rng(seed);

  constexpr unsigned kBlockBits = 12;
  std::array<std::uint64_t, 48> blocks;
  for (auto& b : blocks) b = rng() & low_mask(kBlockBits);

  const auto blocky_value = [&]() {
    const std::uint64_t block = blocks[rng() % blocks.size()];
    return (block << (32 - kBlockBits)) | (rng() & low_mask(32 - kBlockBits));
  };

  Ruleset rs;
  rs.widths = {32, 32};
  rs.rules.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    unsigned len_sa, len_da;
    if (i < lengths.size() * lengths.size()) {
      len_sa = lengths[i / lengths.size()];
      len_da = lengths[i % lengths.size()];
    } else {
      const auto& weighted = weighted_cluster_lengths();
      len_sa = weighted[rng() % weighted.size()];
      len_da = weighted[rng() % weighted.size()];
    }
    Rule r;
    r.id = static_cast<RuleId>(i);
    r.fields = {make_prefix(blocky_value(), len_sa, 32),
                make_prefix(blocky_value(), len_da, 32)};
    r.priority = 1 + static_cast<std::uint32_t>(rng() % 10000);
    r.action = "fwd";
    rs.rules.push_back(std::move(r));
  }
  return rs;
}

/// Fully random ruleset over small widths, for structural property tests.
inline Ruleset random_ruleset(std::size_t count, unsigned width, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Ruleset rs;
  rs.widths = {static_cast<std::uint8_t>(width), static_cast<std::uint8_t>(width)};
  rs.rules.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rule r;
    r.id = static_cast<RuleId>(i);
    for (int k = 0; k < 2; ++k) {
      const unsigned len = rng() % (width + 1);
      r.fields.push_back(make_prefix(rng() & low_mask(width), len, width));
    }
    r.priority = static_cast<std::uint32_t>(rng() % 100);
    rs.rules.push_back(std::move(r));
  }
  return rs;
}

inline std::vector<Packet> random_packets(const Widths& widths, std::size_t count,
                                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Packet> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Packet p;
    for (std::uint8_t w : widths) p.headers.push_back(rng() & low_mask(w));
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace rvh::test

#endif  // RVH_TESTS_FIXTURES_HPP
