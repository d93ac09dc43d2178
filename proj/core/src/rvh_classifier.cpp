#include "rvh/rvh_classifier.hpp"

#include <algorithm>
#include <stdexcept>

#include "rvh/hash_key.hpp"
#include "rvh/partition.hpp"

namespace rvh {

RvhClassifier::RvhClassifier(RangeVectorSet partition, std::uint64_t hash_seed)
    : partition_(std::move(partition)),
      hash_seed_(hash_seed),
      by_partition_(partition_.size()) {
  std::uint32_t key_bits = 0;
  for (std::uint8_t w : partition_.widths()) key_bits += w;
  if (key_bits > HashKey::kMaxBits) {
    throw std::invalid_argument("total field width exceeds hash key capacity");
  }
}

bool RvhClassifier::search_order(const Table* a, const Table* b) const {
  const std::uint32_t pa = a->slots.max_priority();
  const std::uint32_t pb = b->slots.max_priority();
  if (pa != pb) return pa > pb;
  if (a->squared_modulus != b->squared_modulus) {
    return a->squared_modulus > b->squared_modulus;
  }
  return a->partition_index < b->partition_index;
}

void RvhClassifier::reposition(Table* table) {
  auto it = std::find(live_.begin(), live_.end(), table);
  if (it != live_.end()) live_.erase(it);
  auto pos = std::lower_bound(live_.begin(), live_.end(), table,
                              [this](const Table* a, const Table* b) {
                                return search_order(a, b);
                              });
  live_.insert(pos, table);
}

void RvhClassifier::drop_table(Table* table) {
  live_.erase(std::find(live_.begin(), live_.end(), table));
  by_partition_[table->partition_index].reset();
}

bool RvhClassifier::insert(const Rule& rule) {
  if (rule.fields.size() != partition_.dims()) {
    throw std::invalid_argument("rule dimension mismatch");
  }
  if (rules_.contains(rule.id)) return false;

  const std::size_t index = map_rule(partition_, rule);
  const Rule* stored = &rules_.emplace(rule.id, rule).first->second;

  auto& table = by_partition_[index];
  const bool fresh = table == nullptr;
  if (fresh) table = std::make_unique<Table>(index, partition_[index]);

  const HashKey key = build_rule_key(table->base, *stored, widths(), hash_seed_);
  table->slots.add(key, stored);

  if (fresh) {
    auto pos = std::lower_bound(live_.begin(), live_.end(), table.get(),
                                [this](const Table* a, const Table* b) {
                                  return search_order(a, b);
                                });
    live_.insert(pos, table.get());
  } else {
    reposition(table.get());
  }
  return true;
}

bool RvhClassifier::erase(RuleId id) {
  auto it = rules_.find(id);
  if (it == rules_.end()) return false;
  const Rule& rule = it->second;

  const std::size_t index = map_rule(partition_, rule);
  Table* table = by_partition_[index].get();
  const HashKey key = build_rule_key(table->base, rule, widths(), hash_seed_);
  table->slots.remove(key, id);

  if (table->slots.empty()) {
    drop_table(table);
  } else {
    reposition(table);
  }
  rules_.erase(it);
  return true;
}

template <bool EarlyTerminate>
MatchResult RvhClassifier::classify_impl(const Packet& packet,
                                         ClassifyTrace* trace) const {
  const Widths& w = widths();
  std::uint32_t best_priority = 0;  // dummy-rule floor
  RuleId best_id = 0;
  bool matched = false;

  for (const Table* t : live_) {
    if constexpr (EarlyTerminate) {
      // Strict comparison: equal-priority tables are still probed so the
      // (priority desc, id asc) winner is found regardless of table order.
      if (matched && best_priority > t->slots.max_priority()) break;
    }
    if (trace) ++trace->tables_probed;
    const HashKey key = build_packet_key(t->base, packet, w, hash_seed_);
    const auto* group = t->slots.find(key);
    if (!group) continue;
    for (const Rule* r : *group) {
      // Sorted group: once a candidate no longer outranks the best match,
      // nothing after it can either.
      if (matched && !ranks_before(r->priority, r->id, best_priority, best_id)) break;
      if (trace) ++trace->rules_verified;
      if (rule_matches(*r, packet, w)) {
        best_priority = r->priority;
        best_id = r->id;
        matched = true;
        break;  // first verified match is the best in a sorted group
      }
    }
  }

  if (!matched) return MatchResult{};
  return MatchResult{best_id, best_priority};
}

template MatchResult RvhClassifier::classify_impl<true>(const Packet&,
                                                        ClassifyTrace*) const;
template MatchResult RvhClassifier::classify_impl<false>(const Packet&,
                                                         ClassifyTrace*) const;

ClassifierStats RvhClassifier::stats() const {
  ClassifierStats out;
  out.tables.reserve(live_.size());
  for (const Table* t : live_) out.tables.push_back(t->slots.stats());
  return out;
}

std::optional<TableStats> RvhClassifier::stats_for_partition(std::size_t index) const {
  if (index >= by_partition_.size() || !by_partition_[index]) return std::nullopt;
  return by_partition_[index]->slots.stats();
}

std::size_t RvhClassifier::memory_footprint() const {
  std::size_t bytes = sizeof(*this);
  bytes += partition_.size() *
           (sizeof(RangeVector) + partition_.dims() * sizeof(LengthRange));
  bytes += by_partition_.size() * sizeof(void*);
  bytes += live_.size() * sizeof(void*);
  for (const Table* t : live_) {
    bytes += sizeof(Table) + t->base.size();
    bytes += t->slots.capacity() * (sizeof(HashKey) + sizeof(std::vector<const Rule*>));
    bytes += t->slots.rule_count() * sizeof(const Rule*);
  }
  for (const auto& [id, rule] : rules_) {
    bytes += rule_record_bytes(rule);
  }
  return bytes;
}

void RvhClassifier::check_invariants() const {
  if (live_.size() > partition_.size()) {
    throw std::logic_error("more live tables than partition members");
  }
  for (std::size_t i = 0; i + 1 < live_.size(); ++i) {
    if (search_order(live_[i + 1], live_[i])) {
      throw std::logic_error("live table list out of order");
    }
  }
  std::size_t total_rules = 0;
  for (const Table* t : live_) {
    if (t->slots.empty()) throw std::logic_error("empty table kept live");
    if (t->slots.entry_count() > t->slots.capacity()) {
      throw std::logic_error("entry count exceeds capacity");
    }
    if (t->slots.entry_count() > t->slots.rule_count()) {
      throw std::logic_error("entry count exceeds rule count");
    }
    std::uint32_t seen_max = 0;
    std::size_t seen_rules = 0;
    t->slots.for_each_group([&](const HashKey&, const std::vector<const Rule*>& group) {
      for (std::size_t i = 0; i + 1 < group.size(); ++i) {
        if (!ranks_before(group[i]->priority, group[i]->id, group[i + 1]->priority,
                          group[i + 1]->id)) {
          throw std::logic_error("overlap group out of order");
        }
      }
      for (const Rule* r : group) {
        seen_max = std::max(seen_max, r->priority);
        ++seen_rules;
        if (!partition_[t->partition_index].contains(rule_length_vector(*r))) {
          throw std::logic_error("rule stored outside its range-vector");
        }
      }
    });
    if (seen_rules != t->slots.rule_count()) {
      throw std::logic_error("rule counter out of sync");
    }
    if (seen_max != t->slots.max_priority()) {
      throw std::logic_error("table priority out of sync");
    }
    total_rules += seen_rules;
  }
  if (total_rules != rules_.size()) {
    throw std::logic_error("classifier rule count out of sync");
  }
}

RvhClassifier repartition(const RvhClassifier& classifier,
                          const PartitionParams& params) {
  Ruleset current;
  current.widths = classifier.widths();
  current.rules.reserve(classifier.rule_count());
  classifier.for_each_rule([&](const Rule& r) { current.rules.push_back(r); });

  RvhClassifier fresh(partition_ruleset(current, params), classifier.hash_seed());
  for (const Rule& r : current.rules) fresh.insert(r);
  return fresh;
}

}  // namespace rvh
