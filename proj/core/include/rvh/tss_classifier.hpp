#ifndef RVH_TSS_CLASSIFIER_HPP
#define RVH_TSS_CLASSIFIER_HPP

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "rvh/hashing.hpp"
#include "rvh/keyed_table.hpp"
#include "rvh/rvh_classifier.hpp"
#include "rvh/rule.hpp"

namespace rvh {

/// Tuple-space-search baseline: one hash table per exact length-vector, keys
/// built from the full significant bits of every field. Shares the slot
/// substrate, hash, and rule ordering with the range-vector classifier so
/// head-to-head numbers isolate the table-count difference. Every lookup
/// probes every live table.
class TssClassifier {
 public:
  explicit TssClassifier(Widths widths, std::uint64_t hash_seed = kDefaultHashSeed);

  bool insert(const Rule& rule);
  bool erase(RuleId id);

  MatchResult classify(const Packet& packet) const;

  ClassifierStats stats() const;
  std::optional<TableStats> stats_for_tuple(const LengthVector& tuple) const;
  std::size_t memory_footprint() const;

  std::size_t rule_count() const { return rules_.size(); }
  std::size_t table_count() const { return live_.size(); }
  const Widths& widths() const { return widths_; }

  void check_invariants() const;

 private:
  struct Table {
    explicit Table(LengthVector lv)
        : tuple(std::move(lv)), squared_modulus(base_squared_modulus(tuple)) {}

    LengthVector tuple;  // doubles as the base-vector
    std::uint64_t squared_modulus;
    KeyedTable slots;
  };

  struct TupleHash {
    std::size_t operator()(const LengthVector& lv) const {
      return hash_bits({lv.data(), lv.size()},
                       static_cast<std::uint32_t>(lv.size() * 8), 0);
    }
  };

  void reposition(Table* table);
  bool search_order(const Table* a, const Table* b) const;

  Widths widths_;
  std::uint64_t hash_seed_;
  std::unordered_map<LengthVector, std::unique_ptr<Table>, TupleHash> tables_;
  std::vector<Table*> live_;  // (priority desc, squared modulus desc, tuple asc)
  std::unordered_map<RuleId, Rule> rules_;
};

}  // namespace rvh

#endif  // RVH_TSS_CLASSIFIER_HPP
