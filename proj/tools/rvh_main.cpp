// rvh: batch front end for the range-vector hash packet classifier.
//
// Subcommands: partition, classify, bench (update|lookup|mixed|memory|sweep),
// estimate, stats. Exit codes: 0 success, 1 correctness failure, 2 usage or
// I/O error. File formats are documented in docs/FORMATS.md.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rvh/bench.hpp"
#include "rvh/engine.hpp"
#include "rvh/formats.hpp"
#include "rvh/partition.hpp"
#include "rvh/perf_model.hpp"
#include "rvh/ruleset.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCorrectness = 1;
constexpr int kExitUsage = 2;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("RVH_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return 1;
}

std::string stem_of(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

rvh::CalibrationConstants parse_constants(const std::string& csv) {
  rvh::CalibrationConstants k;
  if (std::sscanf(csv.c_str(), "%lf,%lf,%lf", &k.hash_ns, &k.verify_ns,
                  &k.priority_ns) != 3 ||
      k.hash_ns <= 0 || k.verify_ns <= 0 || k.priority_ns <= 0) {
    throw std::invalid_argument("--constants wants 'hash,verify,priority' in ns");
  }
  return k;
}

// "N" or "A..B", inclusive
std::pair<unsigned, unsigned> parse_segment_range(const std::string& arg) {
  unsigned lo = 0, hi = 0;
  if (std::sscanf(arg.c_str(), "%u..%u", &lo, &hi) == 2 && lo >= 1 && lo <= hi) {
    return {lo, hi};
  }
  if (std::sscanf(arg.c_str(), "%u", &lo) == 1 && lo >= 1) {
    return {lo, lo};
  }
  throw std::invalid_argument("--segments wants 'N' or 'A..B'");
}

struct BenchOutputs {
  std::string csv_path;
  std::string records_path;

  void write(const std::vector<rvh::BenchReport>& reports) const {
    if (!csv_path.empty()) {
      std::ofstream csv(csv_path);
      if (!csv) throw std::runtime_error("cannot write " + csv_path);
      csv << rvh::BenchReport::csv_header() << '\n';
      for (const auto& r : reports) csv << r.csv_row() << '\n';
    }
    if (!records_path.empty()) {
      std::ofstream records(records_path);
      if (!records) throw std::runtime_error("cannot write " + records_path);
      for (const auto& r : reports) records << r.json_line() << '\n';
    }
  }
};

void print_report(const rvh::BenchReport& r) {
  std::printf("%-6s %-12s %-12s rules=%zu value=%.6g", r.engine.c_str(),
              r.metric.c_str(), r.ruleset.c_str(), r.rules, r.value);
  if (r.reps > 1) std::printf(" (min=%.6g max=%.6g reps=%zu)", r.value_min, r.value_max, r.reps);
  if (r.metric == "mups") {
    std::printf(" insert=%.6g delete=%.6g", r.insert_mups, r.delete_mups);
  }
  std::printf("\n");
}

int cmd_partition(const std::string& ruleset_path, unsigned gap, unsigned size,
                  unsigned dims, const std::string& out_path) {
  rvh::ParseOptions opts;
  opts.dims = dims;
  const rvh::Ruleset ruleset = rvh::parse_ruleset_file(ruleset_path, opts);
  if (ruleset.empty()) throw std::runtime_error("ruleset is empty; nothing to profile");

  const rvh::PartitionParams params{gap, size};
  const rvh::PartitionDocument doc = rvh::PartitionDocument::from_ruleset(ruleset, params);

  if (out_path.empty()) {
    rvh::write_partition(std::cout, doc);
    std::fprintf(stderr, "range-vectors %zu\n", doc.range_vector_count());
  } else {
    rvh::write_partition_file(out_path, doc);
    std::printf("range-vectors %zu\n", doc.range_vector_count());
  }
  return kExitOk;
}

int cmd_classify(const std::string& ruleset_path, const std::string& trace_path,
                 const std::string& engine_name, const std::string& partition_path,
                 std::uint64_t seed) {
  const rvh::Ruleset ruleset = rvh::parse_ruleset_file(ruleset_path);
  const auto trace = rvh::parse_trace_file(trace_path);
  const rvh::EngineKind kind = rvh::engine_from_name(engine_name);

  std::optional<rvh::RangeVectorSet> partition;
  if (!partition_path.empty()) {
    partition = rvh::read_partition_file(partition_path).to_range_vector_set();
  }
  const auto engine =
      rvh::make_engine(kind, ruleset, partition ? &*partition : nullptr, seed);

  std::size_t matched = 0;
  std::size_t violations = 0;
  std::optional<std::size_t> first_violation;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (trace[i].packet.headers.size() != ruleset.dims()) {
      throw std::runtime_error("trace dimension mismatch");
    }
    const rvh::MatchResult res = engine->classify(trace[i].packet);
    if (res.matched()) ++matched;
    std::printf("%lld %u\n", res.rule_id ? static_cast<long long>(*res.rule_id) : -1LL,
                res.priority);
    if (trace[i].expected &&
        (!res.rule_id || *res.rule_id != *trace[i].expected)) {
      ++violations;
      if (!first_violation) first_violation = i;
    }
  }
  std::printf("# matched %zu/%zu (%.1f%%)\n", matched, trace.size(),
              trace.empty() ? 0.0 : 100.0 * static_cast<double>(matched) /
                                        static_cast<double>(trace.size()));
  if (violations > 0) {
    std::fprintf(stderr, "expectation violated at record %zu (%zu total)\n",
                 *first_violation, violations);
    return kExitCorrectness;
  }
  return kExitOk;
}

int cmd_estimate(const std::string& ruleset_path, const std::string& partition_path,
                 const std::string& stats_path, const std::string& trace_path,
                 const std::string& constants_csv, bool do_calibrate,
                 std::uint64_t iterations, std::uint64_t seed) {
  rvh::CalibrationConstants k = rvh::kReferenceConstants;
  if (!constants_csv.empty()) k = parse_constants(constants_csv);
  if (do_calibrate) {
    k = rvh::calibrate(iterations, seed);
    std::printf("calibrated hash=%.3fns verify=%.3fns priority=%.3fns\n", k.hash_ns,
                k.verify_ns, k.priority_ns);
  }

  if (!stats_path.empty()) {
    const rvh::StatsDocument doc = rvh::read_stats_file(stats_path);
    double estimated = 0;
    std::size_t m = 0;
    double sat = 0;
    if (doc.aggregate()) {
      m = *doc.table_count;
      sat = *doc.saturation;
      estimated = rvh::estimate_classify_ns(m, sat, k);
    } else {
      std::vector<rvh::TableStats> tables;
      tables.reserve(doc.tables.size());
      for (const auto& [n, s] : doc.tables) {
        tables.push_back({n, std::min(n, s), s, 0});
      }
      m = tables.size();
      sat = rvh::saturation(tables);
      estimated = rvh::estimate_classify_ns(tables, k);
    }
    std::printf("m %zu\nsaturation %.4f\nestimated_us %.2f\n", m, sat, estimated / 1e3);
    return kExitOk;
  }

  if (ruleset_path.empty()) {
    throw std::invalid_argument("estimate needs a ruleset or --stats-file");
  }
  const rvh::Ruleset ruleset = rvh::parse_ruleset_file(ruleset_path);
  if (ruleset.empty()) throw std::runtime_error("ruleset is empty");

  rvh::RangeVectorSet partition =
      partition_path.empty()
          ? rvh::partition_ruleset(ruleset)
          : rvh::read_partition_file(partition_path).to_range_vector_set();
  rvh::RvhClassifier classifier(partition, seed);
  for (const rvh::Rule& r : ruleset.rules) classifier.insert(r);

  const rvh::ClassifierStats stats = classifier.stats();
  if (stats.table_count() == 0) throw std::runtime_error("classifier is empty");
  const double sat = rvh::saturation(stats.tables);
  const double estimated = rvh::estimate_classify_ns(stats.tables, k);
  std::printf("m %zu\nsaturation %.4f\nestimated_us %.2f\n", stats.table_count(), sat,
              estimated / 1e3);

  if (!trace_path.empty()) {
    const auto records = rvh::parse_trace_file(trace_path);
    std::vector<rvh::Packet> packets;
    packets.reserve(records.size());
    for (const auto& rec : records) packets.push_back(rec.packet);
    const rvh::ValidationReport report = rvh::validate(classifier, packets, k);
    std::printf("measured_us %.2f\nerror_pct %.2f\nguarded_us %.3f\n",
                report.measured_ns / 1e3, 100.0 * report.relative_error,
                report.guarded_ns / 1e3);
  }
  return kExitOk;
}

int cmd_stats(const std::string& ruleset_path, int dim, const std::string& out_path,
              const std::string& lv_out_path) {
  const rvh::Ruleset ruleset = rvh::parse_ruleset_file(ruleset_path);
  if (ruleset.empty()) throw std::runtime_error("ruleset is empty");

  std::ofstream out_file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    out_file.open(out_path);
    if (!out_file) throw std::runtime_error("cannot write " + out_path);
    out = &out_file;
  }

  *out << "dim,length,mass,cdf\n";
  for (std::size_t k = 0; k < ruleset.dims(); ++k) {
    if (dim >= 0 && static_cast<std::size_t>(dim) != k) continue;
    const auto hist = rvh::prefix_length_histogram(ruleset, k);
    double cdf = 0;
    for (std::size_t len = 0; len < hist.size(); ++len) {
      cdf += hist[len];
      char buf[96];
      std::snprintf(buf, sizeof(buf), "%zu,%zu,%.9g,%.9g\n", k, len, hist[len], cdf);
      *out << buf;
    }
  }

  // Length-vector co-occurrence counts (one row per distinct vector).
  std::map<rvh::LengthVector, std::size_t> combos;
  for (const rvh::Rule& r : ruleset.rules) ++combos[rvh::rule_length_vector(r)];

  std::ofstream lv_file;
  std::ostream* lv_out = &std::cout;
  if (!lv_out_path.empty()) {
    lv_file.open(lv_out_path);
    if (!lv_file) throw std::runtime_error("cannot write " + lv_out_path);
    lv_out = &lv_file;
  }
  for (std::size_t k = 0; k < ruleset.dims(); ++k) *lv_out << "len" << k << ",";
  *lv_out << "count\n";
  for (const auto& [lv, count] : combos) {
    for (std::uint8_t len : lv) *lv_out << static_cast<unsigned>(len) << ',';
    *lv_out << count << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"range-vector hash packet classifier"};
  app.require_subcommand(1);

  std::uint64_t seed = default_seed();
  app.add_option("--seed", seed, "seed for hashing, splits, and synthetic inputs")
      ->capture_default_str();

  // partition
  auto* partition_cmd = app.add_subcommand("partition", "derive and save a partition");
  std::string p_ruleset, p_out;
  unsigned p_gap = 2, p_size = 8, p_dims = 2;
  partition_cmd->add_option("ruleset", p_ruleset, "ruleset file")->required();
  partition_cmd->add_option("-D,--D", p_gap, "max gap bridged when merging ranges")
      ->capture_default_str();
  partition_cmd->add_option("-S,--S", p_size, "merged range size must stay below this")
      ->capture_default_str();
  partition_cmd->add_option("--dims", p_dims, "address fields to extract")
      ->capture_default_str();
  partition_cmd->add_option("-o,--out", p_out, "output file (default: stdout)");

  // classify
  auto* classify_cmd = app.add_subcommand("classify", "classify a packet trace");
  std::string c_ruleset, c_trace, c_engine = "rvh", c_partition;
  classify_cmd->add_option("ruleset", c_ruleset, "ruleset file")->required();
  classify_cmd->add_option("trace", c_trace, "trace file")->required();
  classify_cmd->add_option("--engine", c_engine, "rvh | tss | oracle")
      ->capture_default_str();
  classify_cmd->add_option("--partition", c_partition, "partition file (rvh engine)");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "run a benchmark protocol");
  bench_cmd->require_subcommand(1);
  std::string b_ruleset, b_trace, b_name, b_csv, b_records, b_segments = "1..10";
  std::string b_constants;
  bool b_calibrate = false;
  std::vector<std::string> b_engines;
  std::vector<double> b_rates;
  std::size_t b_reps = 5;
  double b_duration = 0.8;

  auto add_common = [&](CLI::App* sub, bool needs_trace) {
    sub->add_option("--ruleset", b_ruleset, "ruleset file")->required();
    sub->add_option("--engine", b_engines, "engines to run (repeatable)");
    sub->add_option("--name", b_name, "ruleset tag in reports");
    sub->add_option("--csv", b_csv, "write report table here");
    sub->add_option("--records", b_records, "write JSON-lines records here");
    if (needs_trace) sub->add_option("--trace", b_trace, "trace file")->required();
  };
  auto* bench_update_cmd = bench_cmd->add_subcommand("update", "insert/delete throughput");
  add_common(bench_update_cmd, false);
  bench_update_cmd->add_option("--reps", b_reps, "repetitions")->capture_default_str();
  auto* bench_lookup_cmd = bench_cmd->add_subcommand("lookup", "classification throughput");
  add_common(bench_lookup_cmd, true);
  bench_lookup_cmd->add_option("--reps", b_reps, "repetitions")->capture_default_str();
  auto* bench_mixed_cmd =
      bench_cmd->add_subcommand("mixed", "classification under a paced update stream");
  add_common(bench_mixed_cmd, true);
  bench_mixed_cmd->add_option("--rate", b_rates, "updates per second (repeatable)");
  bench_mixed_cmd->add_option("--duration", b_duration, "seconds per cell")
      ->capture_default_str();
  auto* bench_memory_cmd = bench_cmd->add_subcommand("memory", "analytic footprint");
  add_common(bench_memory_cmd, false);
  auto* bench_sweep_cmd =
      bench_cmd->add_subcommand("sweep", "even-partition granularity sweep");
  add_common(bench_sweep_cmd, false);
  bench_sweep_cmd->add_option("--segments", b_segments, "N or A..B segments per dimension")
      ->capture_default_str();
  bench_sweep_cmd->add_option("--constants", b_constants, "hash,verify,priority ns");
  bench_sweep_cmd->add_flag("--calibrate", b_calibrate, "measure constants locally");

  // estimate
  auto* estimate_cmd = app.add_subcommand("estimate", "analytic lookup-cost estimate");
  std::string e_ruleset, e_partition, e_stats, e_trace, e_constants;
  bool e_calibrate = false;
  std::uint64_t e_iterations = 10000000;
  estimate_cmd->add_option("ruleset", e_ruleset, "ruleset file");
  estimate_cmd->add_option("--partition", e_partition, "partition file");
  estimate_cmd->add_option("--stats-file", e_stats, "injected (m, saturation) inputs");
  estimate_cmd->add_option("--trace", e_trace, "also measure and report the error");
  estimate_cmd->add_option("--constants", e_constants, "hash,verify,priority ns");
  estimate_cmd->add_flag("--calibrate", e_calibrate, "measure constants locally");
  estimate_cmd->add_option("--iterations", e_iterations, "calibration iterations")
      ->capture_default_str();

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "prefix-length distribution tables");
  std::string s_ruleset, s_out, s_lv_out;
  int s_dim = -1;
  stats_cmd->add_option("ruleset", s_ruleset, "ruleset file")->required();
  stats_cmd->add_option("--dim", s_dim, "restrict to one dimension");
  stats_cmd->add_option("--out", s_out, "distribution CSV (default: stdout)");
  stats_cmd->add_option("--lv-out", s_lv_out, "co-occurrence CSV (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*partition_cmd) return cmd_partition(p_ruleset, p_gap, p_size, p_dims, p_out);
    if (*classify_cmd) return cmd_classify(c_ruleset, c_trace, c_engine, c_partition, seed);
    if (*estimate_cmd) {
      return cmd_estimate(e_ruleset, e_partition, e_stats, e_trace, e_constants,
                          e_calibrate, e_iterations, seed);
    }
    if (*stats_cmd) return cmd_stats(s_ruleset, s_dim, s_out, s_lv_out);

    if (*bench_cmd) {
      const rvh::Ruleset ruleset = rvh::parse_ruleset_file(b_ruleset);
      rvh::BenchOptions opts;
      opts.seed = seed;
      opts.reps = b_reps;
      opts.mixed_duration_s = b_duration;
      opts.ruleset_name = b_name.empty() ? stem_of(b_ruleset) : b_name;

      std::vector<rvh::EngineKind> kinds;
      for (const std::string& name : b_engines) kinds.push_back(rvh::engine_from_name(name));
      if (kinds.empty()) kinds = {rvh::EngineKind::rvh, rvh::EngineKind::tss};

      std::vector<rvh::BenchReport> reports;
      if (*bench_sweep_cmd) {
        rvh::CalibrationConstants k = rvh::kReferenceConstants;
        if (!b_constants.empty()) k = parse_constants(b_constants);
        if (b_calibrate) k = rvh::calibrate(10000000, seed);
        const auto [lo, hi] = parse_segment_range(b_segments);
        const auto rows = rvh::sweep_even_partition(ruleset, hi, k, seed);
        std::ofstream csv;
        std::ostream* out = &std::cout;
        if (!b_csv.empty()) {
          csv.open(b_csv);
          if (!csv) throw std::runtime_error("cannot write " + b_csv);
          out = &csv;
        }
        *out << "segments,range_vectors,live_tables,hash_ns,verify_ns,total_ns\n";
        for (const auto& row : rows) {
          if (row.segments < lo) continue;
          char buf[160];
          std::snprintf(buf, sizeof(buf), "%u,%zu,%zu,%.6g,%.6g,%.6g\n", row.segments,
                        row.range_vectors, row.live_tables, row.hash_ns, row.verify_ns,
                        row.total_ns);
          *out << buf;
        }
        return kExitOk;
      }

      std::vector<rvh::TraceRecord> trace;
      if (*bench_lookup_cmd || *bench_mixed_cmd) trace = rvh::parse_trace_file(b_trace);

      for (rvh::EngineKind kind : kinds) {
        if (*bench_update_cmd) {
          reports.push_back(rvh::bench_update(ruleset, kind, opts));
        } else if (*bench_lookup_cmd) {
          reports.push_back(rvh::bench_lookup(ruleset, kind, trace, opts));
        } else if (*bench_mixed_cmd) {
          const std::vector<double> rates = b_rates.empty() ? std::vector<double>{0.0} : b_rates;
          for (double rate : rates) {
            reports.push_back(rvh::bench_mixed(ruleset, kind, trace, rate, opts));
          }
        } else if (*bench_memory_cmd) {
          reports.push_back(rvh::bench_memory(ruleset, kind, opts));
        }
      }
      for (const auto& r : reports) print_report(r);
      BenchOutputs outputs{b_csv, b_records};
      outputs.write(reports);
      return kExitOk;
    }
  } catch (const rvh::BenchError& e) {
    std::fprintf(stderr, "correctness failure: %s\n", e.what());
    return kExitCorrectness;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
