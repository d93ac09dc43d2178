#include "rvh/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <random>

#include "json.hpp"
#include "rvh/partition.hpp"

namespace rvh {

namespace {

using clock = std::chrono::steady_clock;

double seconds_between(clock::time_point a, clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

Ruleset subset(const Ruleset& ruleset, std::span<const std::size_t> indices) {
  Ruleset out;
  out.widths = ruleset.widths;
  out.rules.reserve(indices.size());
  for (std::size_t i : indices) out.rules.push_back(ruleset.rules[i]);
  return out;
}

std::uint64_t header_space_bits(const Widths& widths) {
  std::uint64_t bits = 0;
  for (std::uint8_t w : widths) bits += w;
  return bits;
}

void expect_match(const MatchResult& got, RuleId expected, std::size_t record) {
  if (!got.rule_id || *got.rule_id != expected) {
    throw BenchError("trace record " + std::to_string(record) + " expected rule " +
                     std::to_string(expected) + ", engine returned " +
                     (got.rule_id ? std::to_string(*got.rule_id) : std::string("none")));
  }
}

}  // namespace

std::string BenchReport::csv_header() {
  return "engine,metric,ruleset,rules,value,seed,reps";
}

std::string BenchReport::csv_row() const {
  return engine + "," + metric + "," + ruleset + "," + std::to_string(rules) + "," +
         fmt_double(value) + "," + std::to_string(seed) + "," + std::to_string(reps);
}

std::string BenchReport::json_line() const {
  nlohmann::json j{{"engine", engine},
                   {"metric", metric},
                   {"ruleset", ruleset},
                   {"rules", rules},
                   {"value", value},
                   {"seed", seed},
                   {"reps", reps},
                   {"trace_len", trace_len},
                   {"update_rate", update_rate},
                   {"value_min", value_min},
                   {"value_max", value_max},
                   {"oracle_checked", oracle_checked}};
  if (metric == "mups") {
    j["insert_mups"] = insert_mups;
    j["delete_mups"] = delete_mups;
  }
  return j.dump();
}

std::array<std::vector<std::size_t>, 5> split_five_ways(const Ruleset& ruleset,
                                                        std::uint64_t seed) {
  std::vector<std::size_t> order(ruleset.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed ^ 0x5f5f5f5f5f5f5f5fULL);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng() % i]);
  }
  std::array<std::vector<std::size_t>, 5> buckets;
  for (std::size_t i = 0; i < order.size(); ++i) {
    buckets[i % 5].push_back(order[i]);
  }
  return buckets;
}

void verify_against_oracle(const Engine& engine, const Ruleset& live_rules,
                           std::size_t samples, std::uint64_t seed) {
  auto check = [&](const Packet& p) {
    const MatchResult got = engine.classify(p);
    const MatchResult want = oracle_classify(live_rules, p);
    if (got != want) {
      throw BenchError(std::string(engine.name()) + " disagrees with the oracle");
    }
  };

  if (header_space_bits(live_rules.widths) <= 12) {
    std::uint64_t total = 1;
    for (std::uint8_t w : live_rules.widths) total <<= w;
    for (std::uint64_t v = 0; v < total; ++v) {
      Packet p;
      std::uint64_t rest = v;
      for (std::uint8_t w : live_rules.widths) {
        p.headers.push_back(rest & low_mask(w));
        rest >>= w;
      }
      check(p);
    }
    return;
  }

  std::mt19937_64 rng(seed ^ 0xa5a5a5a5a5a5a5a5ULL);
  std::vector<Packet> hits;
  if (!live_rules.empty()) {
    hits = generate_trace(live_rules, samples / 2, rng());
  }
  for (const Packet& p : hits) check(p);
  for (std::size_t i = hits.size(); i < samples; ++i) {
    Packet p;
    for (std::uint8_t w : live_rules.widths) p.headers.push_back(rng() & low_mask(w));
    check(p);
  }
}

BenchReport bench_update(const Ruleset& ruleset, EngineKind kind,
                         const BenchOptions& opts) {
  if (ruleset.size() < 5) {
    throw std::invalid_argument("update benchmark needs at least 5 rules");
  }
  const auto buckets = split_five_ways(ruleset, opts.seed);
  std::vector<std::size_t> initial_indices;
  for (std::size_t b = 1; b < 5; ++b) {
    initial_indices.insert(initial_indices.end(), buckets[b].begin(), buckets[b].end());
  }
  const Ruleset initial = subset(ruleset, initial_indices);
  const Ruleset held = subset(ruleset, buckets[0]);

  // The classifier is profiled from its initial content; held-out rules are
  // covered anyway because the partition spans the whole length space.
  std::optional<RangeVectorSet> partition;
  if (kind == EngineKind::rvh) partition = partition_ruleset(initial);

  std::vector<double> combined, inserts, deletes;
  std::unique_ptr<Engine> engine;
  for (std::size_t rep = 0; rep < opts.reps; ++rep) {
    engine = make_engine(kind, initial, partition ? &*partition : nullptr);

    const auto t0 = clock::now();
    for (const Rule& r : held.rules) {
      if (!engine->insert(r)) throw BenchError("held-out insert failed");
    }
    const auto t1 = clock::now();
    for (const Rule& r : held.rules) {
      if (!engine->erase(r.id)) throw BenchError("held-out delete failed");
    }
    const auto t2 = clock::now();

    const double ops = static_cast<double>(held.size());
    inserts.push_back(ops / seconds_between(t0, t1) / 1e6);
    deletes.push_back(ops / seconds_between(t1, t2) / 1e6);
    combined.push_back(2 * ops / seconds_between(t0, t2) / 1e6);
  }

  verify_against_oracle(*engine, initial, opts.verify_samples, opts.seed);

  BenchReport report;
  report.engine = engine_name(kind);
  report.metric = "mups";
  report.ruleset = opts.ruleset_name;
  report.rules = ruleset.size();
  report.value = median(combined);
  report.value_min = *std::min_element(combined.begin(), combined.end());
  report.value_max = *std::max_element(combined.begin(), combined.end());
  report.insert_mups = median(inserts);
  report.delete_mups = median(deletes);
  report.seed = opts.seed;
  report.reps = opts.reps;
  report.oracle_checked = true;
  return report;
}

BenchReport bench_lookup(const Ruleset& ruleset, EngineKind kind,
                         std::span<const TraceRecord> trace, const BenchOptions& opts) {
  if (trace.empty()) throw std::invalid_argument("lookup benchmark needs a trace");
  const std::unique_ptr<Engine> engine = make_engine(kind, ruleset);

  // Correctness before speed: one checked pass over the trace.
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const MatchResult got = engine->classify(trace[i].packet);
    if (trace[i].expected) expect_match(got, *trace[i].expected, i);
  }

  std::vector<double> mlps;
  for (std::size_t rep = 0; rep < opts.reps; ++rep) {
    std::uint64_t sink = 0;
    const auto t0 = clock::now();
    for (const TraceRecord& rec : trace) {
      sink += engine->classify(rec.packet).priority;
    }
    const auto t1 = clock::now();
    detail::do_not_optimize(sink);
    mlps.push_back(static_cast<double>(trace.size()) / seconds_between(t0, t1) / 1e6);
  }

  verify_against_oracle(*engine, ruleset, opts.verify_samples, opts.seed);

  BenchReport report;
  report.engine = engine_name(kind);
  report.metric = "mlps";
  report.ruleset = opts.ruleset_name;
  report.rules = ruleset.size();
  report.value = median(mlps);
  report.value_min = *std::min_element(mlps.begin(), mlps.end());
  report.value_max = *std::max_element(mlps.begin(), mlps.end());
  report.seed = opts.seed;
  report.reps = opts.reps;
  report.trace_len = trace.size();
  report.oracle_checked = true;
  return report;
}

BenchReport bench_mixed(const Ruleset& ruleset, EngineKind kind,
                        std::span<const TraceRecord> trace, double update_rate,
                        const BenchOptions& opts) {
  if (trace.empty()) throw std::invalid_argument("mixed benchmark needs a trace");
  if (update_rate < 0) throw std::invalid_argument("update rate must be >= 0");
  if (ruleset.size() < 5) {
    throw std::invalid_argument("mixed benchmark needs at least 5 rules");
  }

  const auto buckets = split_five_ways(ruleset, opts.seed);
  std::vector<std::size_t> initial_indices;
  for (std::size_t b = 1; b < 5; ++b) {
    initial_indices.insert(initial_indices.end(), buckets[b].begin(), buckets[b].end());
  }
  Ruleset initial = subset(ruleset, initial_indices);
  const Ruleset held = subset(ruleset, buckets[0]);

  std::optional<RangeVectorSet> partition;
  if (kind == EngineKind::rvh) partition = partition_ruleset(initial);
  const std::unique_ptr<Engine> engine =
      make_engine(kind, initial, partition ? &*partition : nullptr);

  // Coarse clock batches keep timer reads off the lookup fast path; tighter
  // batches only when the pacing actually needs them.
  const std::size_t batch = update_rate >= 1e5 ? 8 : 64;
  double tokens = 0;
  std::size_t held_next = 0;
  bool pending_delete = false;
  std::uint64_t lookups = 0;
  std::uint64_t updates = 0;
  std::uint64_t sink = 0;
  std::size_t cursor = 0;

  const auto start = clock::now();
  auto last = start;
  auto now = start;
  while (seconds_between(start, now) < opts.mixed_duration_s) {
    for (std::size_t i = 0; i < batch; ++i) {
      sink += engine->classify(trace[cursor].packet).priority;
      cursor = cursor + 1 == trace.size() ? 0 : cursor + 1;
    }
    lookups += batch;
    now = clock::now();
    tokens = std::min(1.0, tokens + update_rate * seconds_between(last, now));
    last = now;
    if (tokens >= 1.0) {
      tokens -= 1.0;
      if (pending_delete) {
        engine->erase(held.rules[held_next].id);
        held_next = held_next + 1 == held.size() ? 0 : held_next + 1;
      } else {
        engine->insert(held.rules[held_next]);
      }
      pending_delete = !pending_delete;
      ++updates;
    }
  }
  detail::do_not_optimize(sink);
  const double elapsed = seconds_between(start, now);

  if (pending_delete) initial.rules.push_back(held.rules[held_next]);
  verify_against_oracle(*engine, initial, opts.verify_samples, opts.seed);

  BenchReport report;
  report.engine = engine_name(kind);
  report.metric = "mixed_mlps";
  report.ruleset = opts.ruleset_name;
  report.rules = ruleset.size();
  report.value = static_cast<double>(lookups) / elapsed / 1e6;
  report.value_min = report.value;
  report.value_max = report.value;
  report.seed = opts.seed;
  report.reps = 1;
  report.trace_len = trace.size();
  report.update_rate = updates > 0 ? static_cast<double>(updates) / elapsed : 0.0;
  report.oracle_checked = true;
  return report;
}

BenchReport bench_memory(const Ruleset& ruleset, EngineKind kind,
                         const BenchOptions& opts) {
  const std::unique_ptr<Engine> engine = make_engine(kind, ruleset);
  verify_against_oracle(*engine, ruleset, opts.verify_samples, opts.seed);

  BenchReport report;
  report.engine = engine_name(kind);
  report.metric = "memory_bytes";
  report.ruleset = opts.ruleset_name;
  report.rules = ruleset.size();
  report.value = static_cast<double>(engine->memory_footprint());
  report.value_min = report.value;
  report.value_max = report.value;
  report.seed = opts.seed;
  report.reps = 1;
  report.oracle_checked = true;
  return report;
}

std::vector<SweepRow> sweep_even_partition(const Ruleset& ruleset, unsigned max_segments,
                                           const CalibrationConstants& k,
                                           std::uint64_t hash_seed) {
  if (ruleset.empty()) throw std::invalid_argument("sweep needs a non-empty ruleset");
  std::vector<SweepRow> rows;
  rows.reserve(max_segments);
  for (unsigned x = 1; x <= max_segments; ++x) {
    std::vector<std::vector<ClosedRange>> per_dim;
    per_dim.reserve(ruleset.dims());
    for (std::size_t d = 0; d < ruleset.dims(); ++d) {
      per_dim.push_back(even_split(ruleset.widths[d], x));
    }
    RvhClassifier classifier(build_range_vector_set(per_dim, ruleset.widths), hash_seed);
    for (const Rule& r : ruleset.rules) classifier.insert(r);

    const ClassifierStats stats = classifier.stats();
    double verify_sum = 0;
    for (const TableStats& t : stats.tables) {
      verify_sum += static_cast<double>(t.rules) / static_cast<double>(t.capacity);
    }

    SweepRow row;
    row.segments = x;
    row.range_vectors = classifier.partition().size();
    row.live_tables = classifier.table_count();
    row.hash_ns = static_cast<double>(row.range_vectors) * k.hash_ns;
    row.verify_ns = k.verify_ns * verify_sum;
    row.total_ns = row.hash_ns + row.verify_ns + k.priority_ns;
    rows.push_back(row);
  }
  return rows;
}

OverlapStat overlap_statistic(const ClassifierStats& stats) {
  double rules = 0;
  double entries = 0;
  for (const TableStats& t : stats.tables) {
    rules += static_cast<double>(t.rules);
    entries += static_cast<double>(t.entries);
  }
  OverlapStat out;
  if (entries > 0) {
    out.rules_per_entry = rules / entries;
    out.extra_per_entry = (rules - entries) / entries;
  }
  return out;
}

}  // namespace rvh
