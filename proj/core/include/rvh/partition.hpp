#ifndef RVH_PARTITION_HPP
#define RVH_PARTITION_HPP

#include <cstdint>
#include <vector>

#include "rvh/range_vector.hpp"
#include "rvh/ruleset.hpp"

namespace rvh {

/// Inclusive prefix-length interval, the intermediate currency of the
/// partition pipeline. Converted to half-open form only at the end.
struct ClosedRange {
  std::uint8_t lo = 0;
  std::uint8_t hi = 0;

  unsigned size() const { return static_cast<unsigned>(hi) - lo + 1; }
  bool operator==(const ClosedRange&) const = default;
};

struct PartitionParams {
  unsigned max_gap = 2;          // largest gap two ranges may bridge when merging
  unsigned max_merged_size = 8;  // merged range must stay strictly below this
};

/// Step 1: prefix lengths whose histogram mass strictly exceeds the mean CDF
/// slope 1/W (the line from (0,0) to (W,1)). Ascending.
std::vector<std::uint8_t> locate_points(const std::vector<double>& hist, unsigned width);

/// Step 2: maximal runs of consecutive lengths become one closed range; a
/// [0,0] range is prepended when no range starts at zero.
std::vector<ClosedRange> combine_lengths(const std::vector<std::uint8_t>& points);

/// Step 3: single left-to-right pass; adjacent ranges merge while the gap is
/// at most max_gap and the merged size stays below max_merged_size.
std::vector<ClosedRange> merge_ranges(std::vector<ClosedRange> ranges,
                                      const PartitionParams& params);

/// Step 4: stretch each range up to its successor so the output exactly
/// covers [0, W].
std::vector<ClosedRange> align_ranges(std::vector<ClosedRange> ranges, unsigned width);

/// The four steps composed over the dimension's length histogram.
std::vector<ClosedRange> partition_dimension(const Ruleset& ruleset, std::size_t dim,
                                             const PartitionParams& params = {});

/// Cartesian product of the per-dimension coverings, in lexicographic order
/// (dimension 0 major). Closed ranges become half-open. Throws when any
/// dimension's list fails to cover [0, W_k] disjointly.
RangeVectorSet build_range_vector_set(const std::vector<std::vector<ClosedRange>>& per_dim,
                                      const Widths& widths);

/// Whole pipeline: per-dimension partition, then the product.
RangeVectorSet partition_ruleset(const Ruleset& ruleset,
                                 const PartitionParams& params = {});

/// Even covering of [0, W] by `segments` closed ranges with sizes differing
/// by at most one. Diagnostic device for granularity sweeps.
std::vector<ClosedRange> even_split(unsigned width, unsigned segments);

}  // namespace rvh

#endif  // RVH_PARTITION_HPP
