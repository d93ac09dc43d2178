#ifndef RVH_FORMATS_HPP
#define RVH_FORMATS_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rvh/partition.hpp"

namespace rvh {

/// On-disk form of a derived partition: per-dimension closed ranges plus the
/// widths and parameters that produced them. Versioned header, plain text.
struct PartitionDocument {
  Widths widths;
  PartitionParams params;
  std::vector<std::vector<ClosedRange>> per_dim;

  std::size_t range_vector_count() const {
    std::size_t n = 1;
    for (const auto& ranges : per_dim) n *= ranges.size();
    return n;
  }

  RangeVectorSet to_range_vector_set() const {
    return build_range_vector_set(per_dim, widths);
  }

  static PartitionDocument from_ruleset(const Ruleset& ruleset,
                                        const PartitionParams& params);
};

void write_partition(std::ostream& out, const PartitionDocument& doc);
PartitionDocument read_partition(std::istream& in);
PartitionDocument read_partition_file(const std::string& path);
void write_partition_file(const std::string& path, const PartitionDocument& doc);

/// Injected estimator inputs: either the aggregate (m, saturation) pair or
/// explicit per-table (rules, capacity) rows.
struct StatsDocument {
  std::optional<std::size_t> table_count;  // m
  std::optional<double> saturation;
  std::vector<std::pair<std::size_t, std::size_t>> tables;  // (n_i, s_i)

  bool aggregate() const { return table_count.has_value(); }
};

void write_stats(std::ostream& out, const StatsDocument& doc);
StatsDocument read_stats(std::istream& in);
StatsDocument read_stats_file(const std::string& path);

}  // namespace rvh

#endif  // RVH_FORMATS_HPP
