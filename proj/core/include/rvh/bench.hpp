#ifndef RVH_BENCH_HPP
#define RVH_BENCH_HPP

#include <array>
#include <span>
#include <string>
#include <vector>

#include "rvh/engine.hpp"
#include "rvh/perf_model.hpp"
#include "rvh/ruleset.hpp"

namespace rvh {

/// A benchmark detected a wrong answer; timing results are meaningless.
class BenchError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One benchmark outcome with enough metadata to rerun it. `value` is the
/// headline number for the metric (Mups, Mlps, bytes, ...).
struct BenchReport {
  std::string engine;
  std::string metric;
  std::string ruleset;
  std::size_t rules = 0;
  double value = 0;
  std::uint64_t seed = 0;
  std::size_t reps = 1;

  std::size_t trace_len = 0;
  double update_rate = 0;
  double value_min = 0;
  double value_max = 0;
  double insert_mups = 0;  // update benchmark phases
  double delete_mups = 0;
  bool oracle_checked = false;

  static std::string csv_header();
  std::string csv_row() const;
  std::string json_line() const;
};

struct BenchOptions {
  std::uint64_t seed = 1;
  std::size_t reps = 5;
  double mixed_duration_s = 0.8;
  std::size_t verify_samples = 10000;  // post-run oracle sweep size
  std::string ruleset_name = "ruleset";
};

/// Stable pseudo-random five-way split; bucket sizes differ by at most one.
/// Depends only on rule order and the seed, never on priorities.
std::array<std::vector<std::size_t>, 5> split_five_ways(const Ruleset& ruleset,
                                                        std::uint64_t seed);

/// Loads four fifths, then times inserting and deleting the held-out fifth.
/// Mups counts both phases; the median over reps wins. Ends with an oracle
/// equivalence sweep of the final classifier.
BenchReport bench_update(const Ruleset& ruleset, EngineKind kind,
                         const BenchOptions& opts = {});

/// Lookup throughput over a fixed trace with no updates. Trace expectations
/// are verified before timing; a mismatch throws BenchError.
BenchReport bench_lookup(const Ruleset& ruleset, EngineKind kind,
                         std::span<const TraceRecord> trace,
                         const BenchOptions& opts = {});

/// Lookup throughput while a token-bucket-paced update stream (alternating
/// insert/delete of held-out rules) runs at `update_rate` per second.
BenchReport bench_mixed(const Ruleset& ruleset, EngineKind kind,
                        std::span<const TraceRecord> trace, double update_rate,
                        const BenchOptions& opts = {});

/// Analytic footprint of a fully loaded engine.
BenchReport bench_memory(const Ruleset& ruleset, EngineKind kind,
                         const BenchOptions& opts = {});

/// One row of the partition-granularity sweep: every dimension split into
/// `segments` even ranges, all rules loaded, cost split per the estimator.
struct SweepRow {
  unsigned segments = 0;
  std::size_t range_vectors = 0;  // segments^d, the m the hash term prices
  std::size_t live_tables = 0;
  double hash_ns = 0;
  double verify_ns = 0;
  double total_ns = 0;
};

std::vector<SweepRow> sweep_even_partition(const Ruleset& ruleset, unsigned max_segments,
                                           const CalibrationConstants& k,
                                           std::uint64_t hash_seed = kDefaultHashSeed);

/// Mean rules per occupied entry ("overlap") across all live tables, plus
/// the mean count of extra rules beyond the first in each entry.
struct OverlapStat {
  double rules_per_entry = 0;   // sum n_i / sum e_i
  double extra_per_entry = 0;   // sum (n_i - e_i) / sum e_i
};
OverlapStat overlap_statistic(const ClassifierStats& stats);

/// Compares the engine against a linear-scan oracle holding the same rules.
/// Exhaustive over the full header space when it is small, otherwise sampled
/// with `samples` seeded packets biased toward rule matches. Throws
/// BenchError on the first disagreement.
void verify_against_oracle(const Engine& engine, const Ruleset& live_rules,
                           std::size_t samples, std::uint64_t seed);

}  // namespace rvh

#endif  // RVH_BENCH_HPP
