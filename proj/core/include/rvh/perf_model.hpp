#ifndef RVH_PERF_MODEL_HPP
#define RVH_PERF_MODEL_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>

#include "rvh/keyed_table.hpp"
#include "rvh/rule.hpp"

namespace rvh {

/// Machine constants for the three lookup primitives, in nanoseconds:
/// hashing a packet key, verifying one candidate rule, one priority compare.
struct CalibrationConstants {
  double hash_ns = 0;      // h
  double verify_ns = 0;    // c
  double priority_ns = 0;  // q
};

/// Reference constants measured in the original study; useful for
/// reproducing its estimator arithmetic without local calibration.
inline constexpr CalibrationConstants kReferenceConstants{61.0, 4.7, 0.9};

/// Mean rules-per-slot across live tables: (1/m) * sum(n_i / s_i).
double saturation(std::span<const TableStats> tables);

/// Estimated one-packet classification cost in nanoseconds:
///   T = m * hash_ns + verify_ns * sum(n_i / s_i) + priority_ns
/// with sum(n_i / s_i) = m * saturation in the aggregate form.
/// Throws when table_count is zero (no classifier to price).
double estimate_classify_ns(std::size_t table_count, double saturation,
                            const CalibrationConstants& k);
double estimate_classify_ns(std::span<const TableStats> tables,
                            const CalibrationConstants& k);

/// Per-table utilization (e/s) and overlap (n/e) ratios. Their product
/// collapses to n/s, which is why the estimator never needs e. Overlap is 0
/// for an empty table; a table with rules but no entries is corrupt.
struct TableRatios {
  double utilization = 0;  // r_i
  double overlap = 0;      // o_i
};
TableRatios intermediate_ratios(const TableStats& stats);

/// Measures the three primitives with seeded representative inputs and
/// returns mean nanoseconds per operation. Batched timing against a
/// monotonic clock; throws when `iterations` is too small to time reliably.
CalibrationConstants calibrate(std::uint64_t iterations, std::uint64_t seed);

struct ValidationReport {
  double estimated_ns = 0;
  double measured_ns = 0;       // full-table-scan lookup, what the model prices
  double relative_error = 0;    // |estimated - measured| / measured
  double guarded_ns = 0;        // lookup with early termination, for context
  std::size_t table_count = 0;  // m
  double saturation = 0;
  std::size_t packets = 0;
};

namespace detail {
template <class T>
inline void do_not_optimize(const T& value) {
  asm volatile("" : : "r,m"(value) : "memory");
}
}  // namespace detail

/// Estimator versus wall clock on a live classifier. The measured leg scans
/// every table when the engine supports it, matching what the estimator
/// prices; the guarded time is reported alongside.
template <class Classifier>
ValidationReport validate(const Classifier& classifier, std::span<const Packet> trace,
                          const CalibrationConstants& k) {
  if (trace.empty()) throw std::invalid_argument("validation needs a non-empty trace");
  const ClassifierStats stats = classifier.stats();
  if (stats.table_count() == 0) {
    throw std::invalid_argument("validation needs a non-empty classifier");
  }

  ValidationReport report;
  report.table_count = stats.table_count();
  report.saturation = saturation(stats.tables);
  report.estimated_ns = estimate_classify_ns(stats.tables, k);
  report.packets = trace.size();

  using clock = std::chrono::steady_clock;
  const auto measure = [&](auto&& lookup) {
    const auto start = clock::now();
    std::uint64_t sink = 0;
    for (const Packet& p : trace) sink += lookup(p).priority;
    const auto stop = clock::now();
    detail::do_not_optimize(sink);
    return std::chrono::duration<double, std::nano>(stop - start).count() /
           static_cast<double>(trace.size());
  };

  report.guarded_ns = measure([&](const Packet& p) { return classifier.classify(p); });
  if constexpr (requires(const Packet& p) { classifier.classify_all_tables(p); }) {
    report.measured_ns =
        measure([&](const Packet& p) { return classifier.classify_all_tables(p); });
  } else {
    report.measured_ns = report.guarded_ns;
  }
  report.relative_error =
      std::abs(report.estimated_ns - report.measured_ns) / report.measured_ns;
  return report;
}

}  // namespace rvh

#endif  // RVH_PERF_MODEL_HPP
