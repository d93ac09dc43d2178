#ifndef RVH_RANGE_VECTOR_HPP
#define RVH_RANGE_VECTOR_HPP

#include <cstdint>
#include <vector>

#include "rvh/rule.hpp"

namespace rvh {

/// Half-open prefix-length interval [lo, hi).
struct LengthRange {
  std::uint8_t lo = 0;
  std::uint8_t hi = 0;

  bool contains(std::uint8_t len) const { return len >= lo && len < hi; }
  bool operator==(const LengthRange&) const = default;
};

/// One length interval per dimension; a rule belongs to the range-vector that
/// contains its length-vector.
struct RangeVector {
  std::vector<LengthRange> ranges;

  std::size_t dims() const { return ranges.size(); }

  bool contains(const LengthVector& lv) const {
    for (std::size_t k = 0; k < ranges.size(); ++k) {
      if (!ranges[k].contains(lv[k])) return false;
    }
    return true;
  }

  bool operator==(const RangeVector&) const = default;
};

/// Lower bounds of a range-vector; element k is how many leading bits of
/// field k enter the hash key.
using BaseVector = std::vector<std::uint8_t>;

inline BaseVector base_vector_of(const RangeVector& rv) {
  BaseVector base;
  base.reserve(rv.dims());
  for (const LengthRange& r : rv.ranges) base.push_back(r.lo);
  return base;
}

/// Sum of squared components; monotone in the Euclidean modulus and
/// integer-exact, used as the table-order tie-break.
inline std::uint64_t base_squared_modulus(const BaseVector& base) {
  std::uint64_t s = 0;
  for (std::uint8_t b : base) s += std::uint64_t{b} * b;
  return s;
}

/// A disjoint partition of the whole length-vector space: every length-vector
/// in the product of [0, W_k] lies in exactly one member. Validated on
/// construction (exhaustively when the product space is small, sampled
/// otherwise).
class RangeVectorSet {
 public:
  RangeVectorSet(std::vector<RangeVector> vectors, Widths widths);

  std::size_t size() const { return vectors_.size(); }
  const RangeVector& operator[](std::size_t i) const { return vectors_[i]; }
  const std::vector<RangeVector>& vectors() const { return vectors_; }
  const Widths& widths() const { return widths_; }
  std::size_t dims() const { return widths_.size(); }

  /// Index of the unique member containing lv. Total on valid sets.
  std::size_t map_length_vector(const LengthVector& lv) const;

 private:
  void validate() const;

  std::vector<RangeVector> vectors_;
  Widths widths_;
};

inline std::size_t map_rule(const RangeVectorSet& partition, const Rule& rule) {
  return partition.map_length_vector(rule_length_vector(rule));
}

}  // namespace rvh

#endif  // RVH_RANGE_VECTOR_HPP
