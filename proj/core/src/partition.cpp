#include "rvh/partition.hpp"

#include <stdexcept>

namespace rvh {

std::vector<std::uint8_t> locate_points(const std::vector<double>& hist, unsigned width) {
  if (width == 0) throw std::invalid_argument("cannot locate points on a 0-bit field");
  if (hist.size() != width + 1) throw std::invalid_argument("histogram size != W + 1");
  const double mean_slope = 1.0 / static_cast<double>(width);
  std::vector<std::uint8_t> points;
  for (unsigned len = 0; len <= width; ++len) {
    if (hist[len] > mean_slope) points.push_back(static_cast<std::uint8_t>(len));
  }
  return points;
}

std::vector<ClosedRange> combine_lengths(const std::vector<std::uint8_t>& points) {
  std::vector<ClosedRange> ranges;
  for (std::uint8_t len : points) {
    if (!ranges.empty() && ranges.back().hi + 1 == len) {
      ranges.back().hi = len;
    } else {
      ranges.push_back({len, len});
    }
  }
  if (ranges.empty() || ranges.front().lo != 0) {
    ranges.insert(ranges.begin(), {0, 0});
  }
  return ranges;
}

std::vector<ClosedRange> merge_ranges(std::vector<ClosedRange> ranges,
                                      const PartitionParams& params) {
  if (ranges.empty()) return ranges;
  std::vector<ClosedRange> out;
  ClosedRange current = ranges.front();
  for (std::size_t i = 1; i < ranges.size(); ++i) {
    const ClosedRange& next = ranges[i];
    const unsigned gap = static_cast<unsigned>(next.lo) - current.hi;
    const unsigned merged_size = static_cast<unsigned>(next.hi) - current.lo + 1;
    if (gap <= params.max_gap && merged_size < params.max_merged_size) {
      current.hi = next.hi;  // keep testing the grown range against the next one
    } else {
      out.push_back(current);
      current = next;
    }
  }
  out.push_back(current);
  return out;
}

std::vector<ClosedRange> align_ranges(std::vector<ClosedRange> ranges, unsigned width) {
  if (ranges.empty()) return ranges;
  ranges.front().lo = 0;
  for (std::size_t i = 0; i + 1 < ranges.size(); ++i) {
    ranges[i].hi = static_cast<std::uint8_t>(ranges[i + 1].lo - 1);
  }
  ranges.back().hi = static_cast<std::uint8_t>(width);
  return ranges;
}

std::vector<ClosedRange> partition_dimension(const Ruleset& ruleset, std::size_t dim,
                                             const PartitionParams& params) {
  const auto hist = prefix_length_histogram(ruleset, dim);
  const unsigned width = ruleset.widths[dim];
  return align_ranges(
      merge_ranges(combine_lengths(locate_points(hist, width)), params), width);
}

RangeVectorSet build_range_vector_set(const std::vector<std::vector<ClosedRange>>& per_dim,
                                      const Widths& widths) {
  if (per_dim.size() != widths.size()) {
    throw std::invalid_argument("per-dimension range lists do not match widths");
  }
  for (std::size_t k = 0; k < per_dim.size(); ++k) {
    const auto& ranges = per_dim[k];
    if (ranges.empty() || ranges.front().lo != 0 || ranges.back().hi != widths[k]) {
      throw std::invalid_argument("dimension ranges do not cover [0, W]");
    }
    for (std::size_t i = 0; i + 1 < ranges.size(); ++i) {
      if (ranges[i + 1].lo != ranges[i].hi + 1) {
        throw std::invalid_argument("dimension ranges leave a gap or overlap");
      }
    }
  }

  std::size_t count = 1;
  for (const auto& ranges : per_dim) count *= ranges.size();

  std::vector<RangeVector> vectors;
  vectors.reserve(count);
  std::vector<std::size_t> pick(per_dim.size(), 0);
  for (std::size_t v = 0; v < count; ++v) {
    RangeVector rv;
    rv.ranges.reserve(per_dim.size());
    for (std::size_t k = 0; k < per_dim.size(); ++k) {
      const ClosedRange& r = per_dim[k][pick[k]];
      rv.ranges.push_back({r.lo, static_cast<std::uint8_t>(r.hi + 1)});
    }
    vectors.push_back(std::move(rv));
    // lexicographic odometer, last dimension fastest
    for (std::size_t k = per_dim.size(); k-- > 0;) {
      if (++pick[k] < per_dim[k].size()) break;
      pick[k] = 0;
    }
  }
  return RangeVectorSet(std::move(vectors), widths);
}

RangeVectorSet partition_ruleset(const Ruleset& ruleset, const PartitionParams& params) {
  if (ruleset.empty()) {
    throw std::invalid_argument("cannot derive a partition from an empty ruleset");
  }
  std::vector<std::vector<ClosedRange>> per_dim;
  per_dim.reserve(ruleset.dims());
  for (std::size_t k = 0; k < ruleset.dims(); ++k) {
    per_dim.push_back(partition_dimension(ruleset, k, params));
  }
  return build_range_vector_set(per_dim, ruleset.widths);
}

std::vector<ClosedRange> even_split(unsigned width, unsigned segments) {
  if (segments == 0 || segments > width + 1) {
    throw std::invalid_argument("segment count out of range");
  }
  std::vector<ClosedRange> ranges;
  ranges.reserve(segments);
  const unsigned points = width + 1;
  for (unsigned i = 0; i < segments; ++i) {
    const unsigned lo = i * points / segments;
    const unsigned hi = (i + 1) * points / segments - 1;
    ranges.push_back({static_cast<std::uint8_t>(lo), static_cast<std::uint8_t>(hi)});
  }
  return ranges;
}

}  // namespace rvh
