#include "rvh/tss_classifier.hpp"

#include <algorithm>
#include <stdexcept>

#include "rvh/hash_key.hpp"

namespace rvh {

TssClassifier::TssClassifier(Widths widths, std::uint64_t hash_seed)
    : widths_(std::move(widths)), hash_seed_(hash_seed) {
  std::uint32_t key_bits = 0;
  for (std::uint8_t w : widths_) key_bits += w;
  if (widths_.empty() || key_bits > HashKey::kMaxBits) {
    throw std::invalid_argument("unsupported field widths");
  }
}

bool TssClassifier::search_order(const Table* a, const Table* b) const {
  const std::uint32_t pa = a->slots.max_priority();
  const std::uint32_t pb = b->slots.max_priority();
  if (pa != pb) return pa > pb;
  if (a->squared_modulus != b->squared_modulus) {
    return a->squared_modulus > b->squared_modulus;
  }
  return a->tuple < b->tuple;
}

void TssClassifier::reposition(Table* table) {
  auto it = std::find(live_.begin(), live_.end(), table);
  if (it != live_.end()) live_.erase(it);
  auto pos = std::lower_bound(live_.begin(), live_.end(), table,
                              [this](const Table* a, const Table* b) {
                                return search_order(a, b);
                              });
  live_.insert(pos, table);
}

bool TssClassifier::insert(const Rule& rule) {
  if (rule.fields.size() != widths_.size()) {
    throw std::invalid_argument("rule dimension mismatch");
  }
  if (rules_.contains(rule.id)) return false;

  const Rule* stored = &rules_.emplace(rule.id, rule).first->second;
  LengthVector tuple = rule_length_vector(*stored);

  auto [it, fresh] = tables_.try_emplace(tuple, nullptr);
  if (fresh) it->second = std::make_unique<Table>(std::move(tuple));
  Table* table = it->second.get();

  const HashKey key = build_rule_key(table->tuple, *stored, widths_, hash_seed_);
  table->slots.add(key, stored);
  reposition(table);
  return true;
}

bool TssClassifier::erase(RuleId id) {
  auto it = rules_.find(id);
  if (it == rules_.end()) return false;
  const Rule& rule = it->second;

  const LengthVector tuple = rule_length_vector(rule);
  auto table_it = tables_.find(tuple);
  Table* table = table_it->second.get();
  const HashKey key = build_rule_key(table->tuple, rule, widths_, hash_seed_);
  table->slots.remove(key, id);

  if (table->slots.empty()) {
    live_.erase(std::find(live_.begin(), live_.end(), table));
    tables_.erase(table_it);
  } else {
    reposition(table);
  }
  rules_.erase(it);
  return true;
}

MatchResult TssClassifier::classify(const Packet& packet) const {
  std::uint32_t best_priority = 0;
  RuleId best_id = 0;
  bool matched = false;

  // The baseline probes every table; only the in-group scan may stop early.
  for (const Table* t : live_) {
    const HashKey key = build_packet_key(t->tuple, packet, widths_, hash_seed_);
    const auto* group = t->slots.find(key);
    if (!group) continue;
    for (const Rule* r : *group) {
      if (matched && !ranks_before(r->priority, r->id, best_priority, best_id)) break;
      if (rule_matches(*r, packet, widths_)) {
        best_priority = r->priority;
        best_id = r->id;
        matched = true;
        break;
      }
    }
  }

  if (!matched) return MatchResult{};
  return MatchResult{best_id, best_priority};
}

ClassifierStats TssClassifier::stats() const {
  ClassifierStats out;
  out.tables.reserve(live_.size());
  for (const Table* t : live_) out.tables.push_back(t->slots.stats());
  return out;
}

std::optional<TableStats> TssClassifier::stats_for_tuple(const LengthVector& tuple) const {
  auto it = tables_.find(tuple);
  if (it == tables_.end()) return std::nullopt;
  return it->second->slots.stats();
}

std::size_t TssClassifier::memory_footprint() const {
  std::size_t bytes = sizeof(*this);
  bytes += live_.size() * sizeof(void*);
  for (const Table* t : live_) {
    bytes += sizeof(Table) + t->tuple.size() + 32;  // tuple-index node allowance
    bytes += t->slots.capacity() * (sizeof(HashKey) + sizeof(std::vector<const Rule*>));
    bytes += t->slots.rule_count() * sizeof(const Rule*);
  }
  for (const auto& [id, rule] : rules_) {
    bytes += rule_record_bytes(rule);
  }
  return bytes;
}

void TssClassifier::check_invariants() const {
  if (live_.size() != tables_.size()) {
    throw std::logic_error("live list and tuple index disagree");
  }
  std::size_t total_rules = 0;
  for (std::size_t i = 0; i + 1 < live_.size(); ++i) {
    if (search_order(live_[i + 1], live_[i])) {
      throw std::logic_error("live table list out of order");
    }
  }
  for (const Table* t : live_) {
    if (t->slots.empty()) throw std::logic_error("empty tuple table kept live");
    t->slots.for_each_group([&](const HashKey&, const std::vector<const Rule*>& group) {
      for (const Rule* r : group) {
        if (rule_length_vector(*r) != t->tuple) {
          throw std::logic_error("rule stored under a foreign tuple");
        }
        ++total_rules;
      }
    });
  }
  if (total_rules != rules_.size()) {
    throw std::logic_error("classifier rule count out of sync");
  }
}

}  // namespace rvh
