#include "rvh/range_vector.hpp"

#include <random>
#include <stdexcept>

namespace rvh {

namespace {

// Enumerating the whole length-vector space is cheap for the usual two
// 32-bit dimensions (33 * 33 points); fall back to sampling when the product
// space is large.
constexpr std::uint64_t kExhaustiveLimit = 1u << 20;
constexpr std::size_t kSampleCount = 1u << 16;

std::uint64_t space_size(const Widths& widths) {
  std::uint64_t n = 1;
  for (std::uint8_t w : widths) {
    n *= (static_cast<std::uint64_t>(w) + 1);
    if (n > kExhaustiveLimit) return n;
  }
  return n;
}

}  // namespace

RangeVectorSet::RangeVectorSet(std::vector<RangeVector> vectors, Widths widths)
    : vectors_(std::move(vectors)), widths_(std::move(widths)) {
  if (widths_.empty()) throw std::invalid_argument("range-vector set needs >= 1 dimension");
  if (vectors_.empty()) throw std::invalid_argument("range-vector set is empty");
  for (const RangeVector& rv : vectors_) {
    if (rv.dims() != widths_.size()) {
      throw std::invalid_argument("range-vector dimension mismatch");
    }
    for (std::size_t k = 0; k < widths_.size(); ++k) {
      const LengthRange& r = rv.ranges[k];
      if (r.lo >= r.hi || r.hi > widths_[k] + 1) {
        throw std::invalid_argument("range-vector bounds out of range");
      }
    }
  }
  validate();
}

void RangeVectorSet::validate() const {
  const std::size_t d = widths_.size();
  LengthVector lv(d, 0);

  auto check_point = [&](const LengthVector& point) {
    std::size_t homes = 0;
    for (const RangeVector& rv : vectors_) homes += rv.contains(point) ? 1 : 0;
    if (homes != 1) {
      throw std::invalid_argument(
          homes == 0 ? "range-vector set does not cover the length space"
                     : "range-vector set members overlap");
    }
  };

  if (space_size(widths_) <= kExhaustiveLimit) {
    // Odometer walk over the full product space.
    while (true) {
      check_point(lv);
      std::size_t k = 0;
      while (k < d && lv[k] == widths_[k]) {
        lv[k] = 0;
        ++k;
      }
      if (k == d) break;
      ++lv[k];
    }
  } else {
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    for (std::size_t i = 0; i < kSampleCount; ++i) {
      for (std::size_t k = 0; k < d; ++k) {
        lv[k] = static_cast<std::uint8_t>(rng() % (widths_[k] + 1u));
      }
      check_point(lv);
    }
  }
}

std::size_t RangeVectorSet::map_length_vector(const LengthVector& lv) const {
  for (std::size_t i = 0; i < vectors_.size(); ++i) {
    if (vectors_[i].contains(lv)) return i;
  }
  throw std::logic_error("length-vector has no home in a validated partition");
}

}  // namespace rvh
