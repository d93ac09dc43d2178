// Acceptance suite: end-to-end checks of the classifier, the partition
// pipeline, the baseline, the cost model, and the benchmark protocols.
// Prints one PASS/FAIL line per criterion and exits nonzero if any hard
// criterion fails. WARN lines flag soft observations that do not gate.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "rvh/bench.hpp"
#include "rvh/hash_key.hpp"
#include "rvh/partition.hpp"
#include "rvh/perf_model.hpp"
#include "rvh/rvh_classifier.hpp"
#include "rvh/tss_classifier.hpp"
#include "support/fixtures.hpp"

using namespace rvh;
using namespace rvh::test;

namespace {

int failures = 0;

void report(int index, bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s %2d. %-38s %s\n", ok ? "PASS" : "FAIL", index, name.c_str(),
              detail.c_str());
  if (!ok) ++failures;
}

void warn(int index, const std::string& name, const std::string& detail) {
  std::printf("WARN %2d. %-38s %s\n", index, name.c_str(), detail.c_str());
}

std::string fmt(const char* pattern, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, args...);
  return buf;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v.size() % 2 ? v[v.size() / 2]
                      : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

// Instantaneous clock-state yardstick; timing cells get rescaled onto the
// first observed state so the host flipping its effective clock mid-suite
// cannot masquerade as a protocol difference. The fastest of eight short
// slices is immune to an interrupt landing inside one of them.
double clock_state_rate() {
  double best_ns = 1e30;
  std::uint64_t x = 0x9e3779b9;
  for (int slice = 0; slice < 8; ++slice) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < 8192; ++i) x = mix64(x);
    const auto t1 = std::chrono::steady_clock::now();
    best_ns = std::min(best_ns,
                       std::chrono::duration<double, std::nano>(t1 - t0).count());
  }
  detail::do_not_optimize(x);
  return 8192.0 / best_ns;
}


// ---- 1. estimator reference arithmetic ------------------------------------

void criterion_model_arithmetic() {
  const CalibrationConstants k{61.0, 4.7, 0.9};
  struct Row {
    const char* name;
    std::size_t m;
    double saturation;
    double expected_us;
  };
  const Row rows[] = {
      {"acl1", 703, 0.71, 45.23}, {"acl2", 702, 0.71, 45.16},
      {"fw1", 181, 0.73, 11.66},  {"fw2", 179, 0.74, 11.54},
      {"ipc1", 71, 0.80, 4.59},   {"ipc2", 71, 0.82, 4.60},
      {"cloud1", 226, 0.72, 14.55}, {"cloud2", 251, 0.77, 16.22},
  };
  bool ok = true;
  double worst = 0;
  for (const Row& row : rows) {
    const double got_us = estimate_classify_ns(row.m, row.saturation, k) / 1e3;
    const double err = std::abs(got_us - row.expected_us);
    worst = std::max(worst, err);
    if (err > 0.02) ok = false;
  }
  report(1, ok, "estimator reference arithmetic",
         fmt("8 rows, worst |error| %.4f us (bound 0.02)", worst));
}

// ---- 2. worked example fidelity --------------------------------------------

void criterion_worked_example() {
  bool ok = true;
  std::string detail = "mapping, keys, lookup, insert, delete all exact";
  const Ruleset rules = toy_ruleset();
  const RangeVectorSet partition = toy_partition();

  const std::vector<std::size_t> expected_map = {0, 0, 0, 0, 0, 0, 2, 1, 1, 3};
  for (std::size_t i = 0; i < rules.size(); ++i) {
    if (map_rule(partition, rules.rules[i]) != expected_map[i]) {
      ok = false;
      detail = fmt("rule %zu mapped to the wrong table", i);
    }
  }

  RvhClassifier c(partition);
  for (const Rule& r : rules.rules) c.insert(r);

  // Hash keys of the highest-priority table: five distinct, one shared.
  const BaseVector base{3, 4};
  const std::uint8_t expected_keys[6] = {0b10011010, 0b10110010, 0b11110000,
                                         0b11110000, 0b01001100, 0b00101000};
  for (std::size_t i = 0; i < 6; ++i) {
    const HashKey key = build_rule_key(base, rules.rules[i], rules.widths,
                                       c.hash_seed());
    if (key.bit_count() != 7 || key.bytes()[0] != expected_keys[i]) {
      ok = false;
      detail = fmt("rule %zu produced an unexpected hash key", i);
    }
  }
  const auto t0 = c.stats_for_partition(0);
  if (!t0 || t0->rules != 6 || t0->entries != 5) {
    ok = false;
    detail = "table 0 should hold 6 rules in 5 entries";
  }

  ClassifyTrace trace;
  const MatchResult hit = c.classify(pkt(0b11111, 0b10000), trace);
  if (!hit.rule_id || *hit.rule_id != 2 || trace.tables_probed != 1) {
    ok = false;
    detail = "decisive lookup should return rule 2 after one table";
  }

  const Rule extra = make_rule(10, "011", "011", 3, "fwd 5");
  if (map_rule(partition, extra) != 1) {
    ok = false;
    detail = "inserted rule should land in table 1";
  }
  c.insert(extra);
  ClassifyTrace overlap_trace;
  const MatchResult overlap = c.classify(pkt(0b01110, 0b01100), overlap_trace);
  if (!overlap.rule_id || *overlap.rule_id != 10 || overlap_trace.rules_verified != 1) {
    ok = false;
    detail = "overlapped insert must be verified ahead of its neighbor";
  }
  c.erase(10);

  if (!c.erase(9) || c.table_count() != 3 || c.stats_for_partition(3).has_value()) {
    ok = false;
    detail = "deleting the catch-all should drop its table";
  }
  report(2, ok, "worked example fidelity", detail);
}

// ---- 3. exhaustive oracle equivalence --------------------------------------

bool exhaustive_agreement(const RvhClassifier& rvh_c, const TssClassifier& tss_c,
                          const Ruleset& live, std::size_t& disagreements) {
  for (std::uint64_t sa = 0; sa < 32; ++sa) {
    for (std::uint64_t da = 0; da < 32; ++da) {
      const Packet p = pkt(sa, da);
      const MatchResult want = oracle_classify(live, p);
      if (rvh_c.classify(p) != want || tss_c.classify(p) != want) {
        ++disagreements;
        return false;
      }
    }
  }
  return true;
}

void criterion_exhaustive_equivalence() {
  RvhClassifier rvh_c(toy_partition());
  TssClassifier tss_c({5, 5});
  Ruleset live;
  live.widths = {5, 5};
  for (const Rule& r : toy_ruleset().rules) {
    rvh_c.insert(r);
    tss_c.insert(r);
    live.rules.push_back(r);
  }

  std::size_t disagreements = 0;
  bool ok = exhaustive_agreement(rvh_c, tss_c, live, disagreements);

  std::mt19937_64 rng(1234);
  RuleId next_id = 100;
  for (int op = 0; op < 200 && ok; ++op) {
    const bool do_insert = live.rules.empty() || (rng() % 100) < 55;
    if (do_insert) {
      Rule r;
      r.id = next_id++;
      for (int k = 0; k < 2; ++k) {
        r.fields.push_back(make_prefix(rng() & low_mask(5), rng() % 6, 5));
      }
      r.priority = static_cast<std::uint32_t>(rng() % 8);
      rvh_c.insert(r);
      tss_c.insert(r);
      live.rules.push_back(r);
    } else {
      const std::size_t victim = rng() % live.rules.size();
      const RuleId id = live.rules[victim].id;
      rvh_c.erase(id);
      tss_c.erase(id);
      live.rules.erase(live.rules.begin() + victim);
    }
  }
  ok = ok && exhaustive_agreement(rvh_c, tss_c, live, disagreements);
  report(3, ok, "exhaustive oracle equivalence (5-bit)",
         ok ? fmt("1024 packets x 2 sweeps, 200 ops, %zu rules live", live.size())
            : "engines disagree with the oracle");
}

// ---- 4. sampled oracle equivalence ------------------------------------------

void criterion_sampled_equivalence() {
  const Ruleset rs = clustered_ruleset(10000, 2026);
  RvhClassifier rvh_c(partition_ruleset(rs));
  TssClassifier tss_c(rs.widths);
  for (const Rule& r : rs.rules) {
    rvh_c.insert(r);
    tss_c.insert(r);
  }

  std::size_t checked = 0;
  bool ok = true;
  for (const Packet& p : generate_trace(rs, 10000, 77)) {
    const MatchResult want = oracle_classify(rs, p);
    if (rvh_c.classify(p) != want || tss_c.classify(p) != want) {
      ok = false;
      break;
    }
    ++checked;
  }
  for (const Packet& p : random_packets(rs.widths, 2000, 78)) {
    if (!ok) break;
    const MatchResult want = oracle_classify(rs, p);
    if (rvh_c.classify(p) != want || tss_c.classify(p) != want) ok = false;
    ++checked;
  }
  report(4, ok, "sampled oracle equivalence (32-bit)",
         fmt("%zu rules, %zu packets, 3 engines", rs.size(), checked));
}

// ---- 5. partition pipeline worked trace -------------------------------------

void criterion_partition_pipeline() {
  const std::vector<std::uint8_t> points = {12, 14, 15, 16, 17, 23,
                                            24, 25, 26, 30, 31, 32};
  const auto combined = combine_lengths(points);
  const auto merged = merge_ranges(combined, {2, 8});
  const auto aligned = align_ranges(merged, 32);

  const bool ok =
      combined == std::vector<ClosedRange>{{0, 0}, {12, 12}, {14, 17}, {23, 26}, {30, 32}} &&
      merged == std::vector<ClosedRange>{{0, 0}, {12, 17}, {23, 26}, {30, 32}} &&
      aligned == std::vector<ClosedRange>{{0, 11}, {12, 22}, {23, 29}, {30, 32}};
  report(5, ok, "partition pipeline worked trace",
         ok ? "combine/merge/align exact at D=2 S=8 W=32" : "stage output diverged");
}

// ---- 6. partition structural properties -------------------------------------

void criterion_partition_structure() {
  bool ok = true;
  std::string detail = "100 seeded rulesets, all 81 length vectors covered once";
  for (std::uint64_t seed = 0; seed < 100 && ok; ++seed) {
    const Ruleset rs = random_ruleset(30 + seed % 80, 8, seed * 31 + 1);
    const RangeVectorSet set = partition_ruleset(rs);
    for (unsigned a = 0; a <= 8 && ok; ++a) {
      for (unsigned b = 0; b <= 8 && ok; ++b) {
        const LengthVector lv{static_cast<std::uint8_t>(a),
                              static_cast<std::uint8_t>(b)};
        std::size_t homes = 0;
        for (std::size_t i = 0; i < set.size(); ++i) {
          homes += set[i].contains(lv) ? 1 : 0;
        }
        if (homes != 1) {
          ok = false;
          detail = fmt("seed %llu: length vector (%u,%u) has %zu homes",
                       static_cast<unsigned long long>(seed), a, b, homes);
        } else if (set.map_length_vector(lv) >= set.size()) {
          ok = false;
          detail = "mapping returned an out-of-range index";
        }
      }
    }
  }
  report(6, ok, "partition structural properties", detail);
}

// ---- 7. table-count dominance and lookup direction ---------------------------

void criterion_table_dominance() {
  const Ruleset rs = clustered_ruleset(5000, 31);

  std::set<LengthVector> tuples;
  for (const Rule& r : rs.rules) tuples.insert(rule_length_vector(r));

  RvhClassifier rvh_c(partition_ruleset(rs));
  TssClassifier tss_c(rs.widths);
  for (const Rule& r : rs.rules) {
    rvh_c.insert(r);
    tss_c.insert(r);
  }

  std::vector<TraceRecord> trace;
  for (const Packet& p : generate_trace(rs, 20000, 32)) {
    trace.push_back({p, std::nullopt});
  }

  BenchOptions opts;
  opts.seed = 32;
  opts.reps = 3;
  opts.verify_samples = 3000;
  opts.ruleset_name = "clustered5k";
  const BenchReport rvh_lookup = bench_lookup(rs, EngineKind::rvh, trace, opts);
  const BenchReport tss_lookup = bench_lookup(rs, EngineKind::tss, trace, opts);

  const bool ok = tuples.size() >= 100 && tss_c.table_count() >= 100 &&
                  rvh_c.table_count() <= 25 && rvh_lookup.value > tss_lookup.value;
  report(7, ok, "table-count dominance, lookup direction",
         fmt("tuples=%zu tables rvh=%zu tss=%zu, %.2f vs %.2f Mlps (%.1fx)",
             tuples.size(), rvh_c.table_count(), tss_c.table_count(),
             rvh_lookup.value, tss_lookup.value, rvh_lookup.value / tss_lookup.value));
}

// ---- 8. model validation report ----------------------------------------------

void criterion_model_validation() {
  const Ruleset rs = clustered_ruleset(10000, 41);
  RvhClassifier classifier(partition_ruleset(rs));
  for (const Rule& r : rs.rules) classifier.insert(r);
  const auto trace = generate_trace(rs, 120000, 42);

  const CalibrationConstants k = calibrate(1000000, 43);
  const ValidationReport report_data = validate(classifier, trace, k);

  const bool produced = report_data.estimated_ns > 0 && report_data.measured_ns > 0 &&
                        report_data.packets == trace.size();
  report(8, produced, "model validation report",
         fmt("m=%zu sat=%.2f est=%.2fus meas=%.2fus err=%.1f%% guarded=%.2fus",
             report_data.table_count, report_data.saturation,
             report_data.estimated_ns / 1e3, report_data.measured_ns / 1e3,
             100.0 * report_data.relative_error, report_data.guarded_ns / 1e3));
  if (report_data.estimated_ns > report_data.measured_ns) {
    warn(8, "model validation report",
         "estimate exceeds the measurement; unmodeled effects usually push the "
         "other way");
  }
}

// ---- 9. mixed-load trend -------------------------------------------------------

void criterion_mixed_trend() {
  const Ruleset rs = clustered_ruleset(5000, 51);
  std::vector<TraceRecord> trace;
  for (const Packet& p : generate_trace(rs, 50000, 52)) {
    trace.push_back({p, std::nullopt});
  }

  // The mixed protocol initializes its classifier from four fifths of the
  // rules; the no-update baseline must run on that same initial content.
  const auto buckets = split_five_ways(rs, 52);
  Ruleset initial;
  initial.widths = rs.widths;
  for (std::size_t b = 1; b < 5; ++b) {
    for (std::size_t i : buckets[b]) initial.rules.push_back(rs.rules[i]);
  }

  BenchOptions opts;
  opts.seed = 52;
  opts.reps = 3;
  opts.verify_samples = 1000;
  opts.mixed_duration_s = 0.12;
  opts.ruleset_name = "clustered5k";

  // Cells are short, measured back-to-back inside each round, rescaled to
  // one clock state, and compared as per-round ratios. A cell whose
  // before/after yardsticks disagree ran across a clock-state flip; the
  // whole round is discarded as disturbed, independent of its values.
  const double canonical = clock_state_rate();
  const auto cell = [&](auto&& fn) -> std::optional<double> {
    const double pre = clock_state_rate();
    const double raw = fn();
    const double post = clock_state_rate();
    if (std::abs(pre - post) / pre > 0.05) return std::nullopt;
    return raw * (canonical / (0.5 * (pre + post)));
  };

  std::vector<double> zero_ratio, fast_ratio;
  std::vector<double> lookup_v, zero_v, slow_v, fast_v;
  for (int attempt = 0; attempt < 18 && zero_ratio.size() < 7; ++attempt) {
    const auto lookup =
        cell([&] { return bench_lookup(initial, EngineKind::rvh, trace, opts).value; });
    const auto zero =
        cell([&] { return bench_mixed(rs, EngineKind::rvh, trace, 0.0, opts).value; });
    const auto slow =
        cell([&] { return bench_mixed(rs, EngineKind::rvh, trace, 1e3, opts).value; });
    const auto fast =
        cell([&] { return bench_mixed(rs, EngineKind::rvh, trace, 1e6, opts).value; });
    if (!lookup || !zero || !slow || !fast) continue;
    lookup_v.push_back(*lookup);
    zero_v.push_back(*zero);
    slow_v.push_back(*slow);
    fast_v.push_back(*fast);
    zero_ratio.push_back(*zero / *lookup);
    fast_ratio.push_back(*fast / *slow);
  }
  if (zero_ratio.empty()) {
    report(9, false, "mixed-load trend", "no undisturbed measurement round");
    return;
  }

  // Full-size closing sweep on top of the per-cell ones.
  const auto engine = make_engine(EngineKind::rvh, rs);
  verify_against_oracle(*engine, rs, 10000, opts.seed);

  const double zero_gap = std::abs(median_of(zero_ratio) - 1.0);
  const bool zero_ok = zero_gap <= 0.05;
  const bool trend_ok = median_of(fast_ratio) < 1.10;
  report(9, zero_ok && trend_ok, "mixed-load trend",
         fmt("lookup=%.2f idle=%.2f (gap %.1f%%), 1e3ups=%.2f 1e6ups=%.2f Mlps",
             median_of(lookup_v), median_of(zero_v), 100.0 * zero_gap,
             median_of(slow_v), median_of(fast_v)));
}

// ---- 10. overlap statistic -------------------------------------------------------

void criterion_overlap_statistic() {
  const Ruleset rs = clustered_ruleset(5000, 61);

  // Partition every dimension into 5 even ranges; each piece spans at most 7
  // lengths, keeping truncation mild.
  std::vector<std::vector<ClosedRange>> per_dim;
  for (std::size_t d = 0; d < rs.dims(); ++d) {
    per_dim.push_back(even_split(rs.widths[d], 5));
  }
  unsigned widest = 0;
  for (const auto& ranges : per_dim) {
    for (const ClosedRange& r : ranges) widest = std::max(widest, r.size());
  }

  RvhClassifier classifier(build_range_vector_set(per_dim, rs.widths));
  for (const Rule& r : rs.rules) classifier.insert(r);
  const OverlapStat stat = overlap_statistic(classifier.stats());

  const bool ok = widest < 8 && stat.rules_per_entry > 0;
  report(10, ok, "overlap statistic (range size < 8)",
         fmt("%.3f rules/entry, %.3f extra/entry across %zu tables", stat.rules_per_entry,
             stat.extra_per_entry, classifier.table_count()));
  if (stat.extra_per_entry >= 1.0) {
    warn(10, "overlap statistic", "extra rules per entry reached 1.0 on this fixture");
  }
}

}  // namespace

int main() {
  criterion_model_arithmetic();
  criterion_worked_example();
  criterion_exhaustive_equivalence();
  criterion_sampled_equivalence();
  criterion_partition_pipeline();
  criterion_partition_structure();
  criterion_table_dominance();
  criterion_model_validation();
  criterion_mixed_trend();
  criterion_overlap_statistic();

  if (failures == 0) {
    std::printf("acceptance: all 10 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) failed\n", failures);
  return 1;
}
