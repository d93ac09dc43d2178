#include "rvh/engine.hpp"

#include <algorithm>
#include <stdexcept>

#include "rvh/partition.hpp"

namespace rvh {

const char* engine_name(EngineKind kind) {
  switch (kind) {
    case EngineKind::rvh: return "rvh";
    case EngineKind::tss: return "tss";
    case EngineKind::oracle: return "oracle";
  }
  return "?";
}

EngineKind engine_from_name(const std::string& name) {
  if (name == "rvh") return EngineKind::rvh;
  if (name == "tss") return EngineKind::tss;
  if (name == "oracle") return EngineKind::oracle;
  throw std::invalid_argument("unknown engine '" + name + "'");
}

namespace {

class RvhEngine final : public Engine {
 public:
  RvhEngine(RangeVectorSet partition, std::uint64_t seed)
      : classifier_(std::move(partition), seed) {}

  EngineKind kind() const override { return EngineKind::rvh; }
  bool insert(const Rule& rule) override { return classifier_.insert(rule); }
  bool erase(RuleId id) override { return classifier_.erase(id); }
  MatchResult classify(const Packet& packet) const override {
    return classifier_.classify(packet);
  }
  ClassifierStats stats() const override { return classifier_.stats(); }
  std::size_t memory_footprint() const override { return classifier_.memory_footprint(); }
  std::size_t table_count() const override { return classifier_.table_count(); }
  std::size_t rule_count() const override { return classifier_.rule_count(); }

  const RvhClassifier& classifier() const { return classifier_; }

 private:
  RvhClassifier classifier_;
};

class TssEngine final : public Engine {
 public:
  TssEngine(Widths widths, std::uint64_t seed) : classifier_(std::move(widths), seed) {}

  EngineKind kind() const override { return EngineKind::tss; }
  bool insert(const Rule& rule) override { return classifier_.insert(rule); }
  bool erase(RuleId id) override { return classifier_.erase(id); }
  MatchResult classify(const Packet& packet) const override {
    return classifier_.classify(packet);
  }
  ClassifierStats stats() const override { return classifier_.stats(); }
  std::size_t memory_footprint() const override { return classifier_.memory_footprint(); }
  std::size_t table_count() const override { return classifier_.table_count(); }
  std::size_t rule_count() const override { return classifier_.rule_count(); }

 private:
  TssClassifier classifier_;
};

class OracleEngine final : public Engine {
 public:
  explicit OracleEngine(Widths widths) { ruleset_.widths = std::move(widths); }

  EngineKind kind() const override { return EngineKind::oracle; }

  bool insert(const Rule& rule) override {
    if (find(rule.id)) return false;
    ruleset_.rules.push_back(rule);
    return true;
  }

  bool erase(RuleId id) override {
    auto it = std::find_if(ruleset_.rules.begin(), ruleset_.rules.end(),
                           [id](const Rule& r) { return r.id == id; });
    if (it == ruleset_.rules.end()) return false;
    ruleset_.rules.erase(it);
    return true;
  }

  MatchResult classify(const Packet& packet) const override {
    return oracle_classify(ruleset_, packet);
  }

  ClassifierStats stats() const override { return {}; }

  std::size_t memory_footprint() const override {
    std::size_t bytes = sizeof(*this);
    for (const Rule& r : ruleset_.rules) bytes += rule_record_bytes(r);
    return bytes;
  }

  std::size_t table_count() const override { return 0; }
  std::size_t rule_count() const override { return ruleset_.rules.size(); }

 private:
  const Rule* find(RuleId id) const {
    for (const Rule& r : ruleset_.rules) {
      if (r.id == id) return &r;
    }
    return nullptr;
  }

  Ruleset ruleset_;
};

}  // namespace

std::unique_ptr<Engine> make_empty_engine(EngineKind kind, const Widths& widths,
                                          const RangeVectorSet* partition,
                                          std::uint64_t hash_seed) {
  switch (kind) {
    case EngineKind::rvh:
      if (!partition) {
        throw std::invalid_argument("range-vector engine needs a partition");
      }
      return std::make_unique<RvhEngine>(*partition, hash_seed);
    case EngineKind::tss:
      return std::make_unique<TssEngine>(widths, hash_seed);
    case EngineKind::oracle:
      return std::make_unique<OracleEngine>(widths);
  }
  throw std::invalid_argument("unknown engine kind");
}

std::unique_ptr<Engine> make_engine(EngineKind kind, const Ruleset& ruleset,
                                    const RangeVectorSet* partition,
                                    std::uint64_t hash_seed) {
  std::unique_ptr<Engine> engine;
  if (kind == EngineKind::rvh && !partition) {
    const RangeVectorSet derived = partition_ruleset(ruleset);
    engine = make_empty_engine(kind, ruleset.widths, &derived, hash_seed);
  } else {
    engine = make_empty_engine(kind, ruleset.widths, partition, hash_seed);
  }
  for (const Rule& rule : ruleset.rules) {
    if (!engine->insert(rule)) {
      throw std::invalid_argument("duplicate rule id " + std::to_string(rule.id));
    }
  }
  return engine;
}

}  // namespace rvh
