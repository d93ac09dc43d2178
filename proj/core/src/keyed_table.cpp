#include "rvh/keyed_table.hpp"

#include <algorithm>

namespace rvh {

namespace {

bool group_order(const Rule* a, const Rule* b) {
  return ranks_before(a->priority, a->id, b->priority, b->id);
}

}  // namespace

KeyedTable::Slot* KeyedTable::locate(const HashKey& key) {
  const std::size_t mask = slots_.size() - 1;
  std::size_t i = key.hash() & mask;
  while (!slots_[i].rules.empty()) {
    if (slots_[i].key.hash() == key.hash() && slots_[i].key.same_key(key)) {
      return &slots_[i];
    }
    i = (i + 1) & mask;
  }
  return &slots_[i];  // first free slot on the probe path
}

void KeyedTable::add(const HashKey& key, const Rule* rule) {
  Slot* slot = locate(key);
  if (slot->rules.empty()) {
    if (static_cast<double>(entries_ + 1) > kMaxLoad * static_cast<double>(slots_.size())) {
      grow();
      slot = locate(key);
    }
    slot->key = key;
    ++entries_;
  }
  auto pos = std::lower_bound(slot->rules.begin(), slot->rules.end(), rule, group_order);
  slot->rules.insert(pos, rule);
  ++rules_;
  max_priority_ = std::max(max_priority_, rule->priority);
}

bool KeyedTable::remove(const HashKey& key, RuleId id) {
  Slot* slot = locate(key);
  if (slot->rules.empty()) return false;
  auto pos = std::find_if(slot->rules.begin(), slot->rules.end(),
                          [id](const Rule* r) { return r->id == id; });
  if (pos == slot->rules.end()) return false;
  const std::uint32_t removed_priority = (*pos)->priority;
  slot->rules.erase(pos);
  --rules_;
  if (slot->rules.empty()) {
    erase_slot(static_cast<std::size_t>(slot - slots_.data()));
    --entries_;
  }
  if (removed_priority == max_priority_) recompute_max_priority();
  return true;
}

void KeyedTable::erase_slot(std::size_t index) {
  // Backward-shift deletion: pull cluster members whose home position lies
  // at or before the vacated slot, preserving the linear-probe invariant.
  const std::size_t mask = slots_.size() - 1;
  std::size_t hole = index;
  std::size_t i = (hole + 1) & mask;
  while (!slots_[i].rules.empty()) {
    const std::size_t home = slots_[i].key.hash() & mask;
    if (((i - home) & mask) >= ((i - hole) & mask)) {
      slots_[hole] = std::move(slots_[i]);
      slots_[i].rules.clear();
      hole = i;
    }
    i = (i + 1) & mask;
  }
  slots_[hole] = Slot{};
}

void KeyedTable::grow() {
  std::vector<Slot> old = std::move(slots_);
  slots_.assign(old.size() * 2, Slot{});
  const std::size_t mask = slots_.size() - 1;
  for (Slot& s : old) {
    if (s.rules.empty()) continue;
    std::size_t i = s.key.hash() & mask;
    while (!slots_[i].rules.empty()) i = (i + 1) & mask;
    slots_[i] = std::move(s);
  }
}

void KeyedTable::recompute_max_priority() {
  std::uint32_t best = 0;
  for (const Slot& s : slots_) {
    if (!s.rules.empty()) best = std::max(best, s.rules.front()->priority);
  }
  max_priority_ = best;
}

}  // namespace rvh
