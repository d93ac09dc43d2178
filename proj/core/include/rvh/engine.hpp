#ifndef RVH_ENGINE_HPP
#define RVH_ENGINE_HPP

#include <memory>
#include <string>

#include "rvh/range_vector.hpp"
#include "rvh/rule.hpp"
#include "rvh/ruleset.hpp"
#include "rvh/rvh_classifier.hpp"
#include "rvh/tss_classifier.hpp"

namespace rvh {

enum class EngineKind { rvh, tss, oracle };

const char* engine_name(EngineKind kind);
EngineKind engine_from_name(const std::string& name);  // throws on unknown names

/// Uniform mutable-classifier surface for the harness and the CLI. The
/// oracle variant wraps the linear scan so every engine can be driven by the
/// same protocol code.
class Engine {
 public:
  virtual ~Engine() = default;

  virtual EngineKind kind() const = 0;
  virtual bool insert(const Rule& rule) = 0;
  virtual bool erase(RuleId id) = 0;
  virtual MatchResult classify(const Packet& packet) const = 0;
  virtual ClassifierStats stats() const = 0;
  virtual std::size_t memory_footprint() const = 0;
  virtual std::size_t table_count() const = 0;
  virtual std::size_t rule_count() const = 0;

  const char* name() const { return engine_name(kind()); }
};

/// The range-vector engine needs a partition; pass nullptr to have one
/// derived from `ruleset` with default parameters. All engines start loaded
/// with the ruleset's rules.
std::unique_ptr<Engine> make_engine(EngineKind kind, const Ruleset& ruleset,
                                    const RangeVectorSet* partition = nullptr,
                                    std::uint64_t hash_seed = kDefaultHashSeed);

/// Empty engine over the given widths (and partition, for the range-vector
/// kind).
std::unique_ptr<Engine> make_empty_engine(EngineKind kind, const Widths& widths,
                                          const RangeVectorSet* partition = nullptr,
                                          std::uint64_t hash_seed = kDefaultHashSeed);

}  // namespace rvh

#endif  // RVH_ENGINE_HPP
