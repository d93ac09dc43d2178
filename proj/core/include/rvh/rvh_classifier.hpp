#ifndef RVH_RVH_CLASSIFIER_HPP
#define RVH_RVH_CLASSIFIER_HPP

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "rvh/keyed_table.hpp"
#include "rvh/range_vector.hpp"
#include "rvh/rule.hpp"

namespace rvh {

/// Per-lookup probe accounting, for tests and diagnostics.
struct ClassifyTrace {
  std::size_t tables_probed = 0;
  std::size_t rules_verified = 0;
};

/// Range-vector hash classifier. One hash table per partition member holding
/// at least one rule; tables are created lazily on insert and dropped when
/// their last rule leaves. The search list stays sorted by (table priority
/// desc, base-vector squared modulus desc, partition index asc), and lookups
/// stop as soon as the best match so far strictly outranks every remaining
/// table.
///
/// Single writer: mutations need exclusive access; concurrent reads are fine.
class RvhClassifier {
 public:
  explicit RvhClassifier(RangeVectorSet partition,
                         std::uint64_t hash_seed = kDefaultHashSeed);

  /// False (and no change) when the id is already present.
  bool insert(const Rule& rule);

  /// False (and no change) when the id is unknown.
  bool erase(RuleId id);

  MatchResult classify(const Packet& packet) const {
    return classify_impl<true>(packet, nullptr);
  }

  MatchResult classify(const Packet& packet, ClassifyTrace& trace) const {
    return classify_impl<true>(packet, &trace);
  }

  /// Probes every live table (early-termination guard disabled). Must agree
  /// with classify() on all inputs; also what the analytic cost model prices.
  MatchResult classify_all_tables(const Packet& packet) const {
    return classify_impl<false>(packet, nullptr);
  }

  ClassifierStats stats() const;

  /// Stats of the table backing one partition member, if it is live.
  std::optional<TableStats> stats_for_partition(std::size_t index) const;

  /// Deterministic analytic footprint: slot arrays, group storage, rule
  /// records, and index structures, from counts and type sizes.
  std::size_t memory_footprint() const;

  std::size_t rule_count() const { return rules_.size(); }
  std::size_t table_count() const { return live_.size(); }  // m
  const RangeVectorSet& partition() const { return partition_; }
  const Widths& widths() const { return partition_.widths(); }
  std::uint64_t hash_seed() const { return hash_seed_; }

  const Rule* find_rule(RuleId id) const {
    auto it = rules_.find(id);
    return it == rules_.end() ? nullptr : &it->second;
  }

  template <class Fn>
  void for_each_rule(Fn&& fn) const {
    for (const auto& [id, rule] : rules_) fn(rule);
  }

  /// Throws std::logic_error if any structural invariant is broken. Test aid.
  void check_invariants() const;

 private:
  struct Table {
    explicit Table(std::size_t index, const RangeVector& rv)
        : partition_index(index),
          base(base_vector_of(rv)),
          squared_modulus(base_squared_modulus(base)) {}

    std::size_t partition_index;
    BaseVector base;
    std::uint64_t squared_modulus;
    KeyedTable slots;
  };

  template <bool EarlyTerminate>
  MatchResult classify_impl(const Packet& packet, ClassifyTrace* trace) const;

  bool search_order(const Table* a, const Table* b) const;
  void reposition(Table* table);
  void drop_table(Table* table);

  RangeVectorSet partition_;
  std::uint64_t hash_seed_;
  std::vector<std::unique_ptr<Table>> by_partition_;  // nullptr when not live
  std::vector<Table*> live_;                          // search order
  std::unordered_map<RuleId, Rule> rules_;
};

struct PartitionParams;

/// Explicit repartition: derive a fresh partition from the classifier's
/// current rules and bulk-load them into a new classifier. Length
/// distributions drift rarely, so this is a deliberate operation rather
/// than anything automatic.
RvhClassifier repartition(const RvhClassifier& classifier,
                          const PartitionParams& params);

}  // namespace rvh

#endif  // RVH_RVH_CLASSIFIER_HPP
