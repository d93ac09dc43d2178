#ifndef RVH_KEYED_TABLE_HPP
#define RVH_KEYED_TABLE_HPP

#include <cstdint>
#include <vector>

#include "rvh/hash_key.hpp"
#include "rvh/rule.hpp"

namespace rvh {

/// Counters for one table, in model notation order: n (rules), e (occupied
/// entries, i.e. distinct keys), s (slot capacity), plus the table priority.
struct TableStats {
  std::size_t rules = 0;     // n_i
  std::size_t entries = 0;   // e_i
  std::size_t capacity = 0;  // s_i
  std::uint32_t priority = 0;
};

/// Aggregate view of a classifier's live tables, the wire contract consumed
/// by the performance model. Tables appear in search order.
struct ClassifierStats {
  std::vector<TableStats> tables;

  std::size_t table_count() const { return tables.size(); }  // m
};

/// Open-addressing hash table with linear probing. Each occupied slot holds
/// one exact key and the group of all rules sharing it, sorted by
/// (priority desc, id asc). Capacity is a power of two, doubling when the
/// entry load exceeds 3/4; deletion backward-shifts the probe cluster so no
/// tombstones exist and `entries` always counts occupied slots exactly.
class KeyedTable {
 public:
  static constexpr std::size_t kInitialCapacity = 8;
  static constexpr double kMaxLoad = 0.75;

  KeyedTable() : slots_(kInitialCapacity) {}

  /// Adds a rule under `key`; creates the entry when the key is new.
  /// The caller guarantees ids are unique table-wide.
  void add(const HashKey& key, const Rule* rule);

  /// Removes the rule with `id` from the group under `key`. Returns false if
  /// no such rule is stored. An emptied entry is removed from the table.
  bool remove(const HashKey& key, RuleId id);

  /// Group stored under `key`, or nullptr when the key is absent.
  const std::vector<const Rule*>* find(const HashKey& key) const {
    const std::size_t mask = slots_.size() - 1;
    std::size_t i = key.hash() & mask;
    while (!slots_[i].rules.empty()) {
      if (slots_[i].key.hash() == key.hash() && slots_[i].key.same_key(key)) {
        return &slots_[i].rules;
      }
      i = (i + 1) & mask;
    }
    return nullptr;
  }

  std::size_t rule_count() const { return rules_; }
  std::size_t entry_count() const { return entries_; }
  std::size_t capacity() const { return slots_.size(); }
  bool empty() const { return rules_ == 0; }

  /// Highest priority among stored rules; 0 for an empty table.
  std::uint32_t max_priority() const { return max_priority_; }

  TableStats stats() const { return {rules_, entries_, slots_.size(), max_priority_}; }

  template <class Fn>
  void for_each_group(Fn&& fn) const {
    for (const Slot& s : slots_) {
      if (!s.rules.empty()) fn(s.key, s.rules);
    }
  }

 private:
  struct Slot {
    HashKey key;
    std::vector<const Rule*> rules;  // overlap group, (priority desc, id asc)
  };

  Slot* locate(const HashKey& key);
  void grow();
  void erase_slot(std::size_t index);
  void recompute_max_priority();

  std::vector<Slot> slots_;
  std::size_t entries_ = 0;
  std::size_t rules_ = 0;
  std::uint32_t max_priority_ = 0;
};

}  // namespace rvh

#endif  // RVH_KEYED_TABLE_HPP
