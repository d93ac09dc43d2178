#ifndef RVH_RULESET_HPP
#define RVH_RULESET_HPP

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "rvh/rule.hpp"

namespace rvh {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct Ruleset {
  std::vector<Rule> rules;
  Widths widths;  // W_k per dimension; identical for every rule

  std::size_t dims() const { return widths.size(); }
  bool empty() const { return rules.empty(); }
  std::size_t size() const { return rules.size(); }
};

struct ParseOptions {
  unsigned dims = 2;  // address fields extracted from filter-format files
};

/// Reads either a filter file ("@sip/len dip/len sport : sport dport : dport
/// proto/mask" per line) or the binary fixture format introduced by a
/// "!widths" header. Comments (#) and blank lines are skipped.
/// Filter files get priority N - rule_index so earlier lines win; the fixture
/// format carries explicit ids and priorities.
Ruleset parse_ruleset(std::istream& in, const ParseOptions& opts = {});
Ruleset parse_ruleset_file(const std::string& path, const ParseOptions& opts = {});

/// Writes the fixture format ("!widths ..." header, one rule per line).
/// Reading it back yields a structurally equal ruleset.
void write_ruleset(std::ostream& out, const Ruleset& ruleset);

/// "bits/len" with the significant bits spelled out, or "*" for length 0.
std::string prefix_to_string(const Prefix& p, unsigned width);

struct TraceRecord {
  Packet packet;
  std::optional<RuleId> expected;  // match id the trace promises, if any
};

/// One record per line, decimal columns: "sa da", "sa da id", or
/// "sa da sport dport proto id". Only the addresses and trailing id are kept.
std::vector<TraceRecord> parse_trace(std::istream& in);
std::vector<TraceRecord> parse_trace_file(const std::string& path);

void write_trace(std::ostream& out, const std::vector<TraceRecord>& trace);

/// Deterministic synthetic load: each packet picks a rule uniformly and fills
/// the wildcard bit positions with seeded random bits, so every packet
/// matches at least the rule it was built from.
std::vector<Packet> generate_trace(const Ruleset& ruleset, std::size_t count,
                                   std::uint64_t seed);

/// Reference classifier: linear scan, best match under (priority desc, id asc).
MatchResult oracle_classify(const Ruleset& ruleset, const Packet& packet);

/// Fraction of rules per prefix length in the given dimension; W+1 entries
/// summing to 1. Throws on an empty ruleset.
std::vector<double> prefix_length_histogram(const Ruleset& ruleset, std::size_t dim);

}  // namespace rvh

#endif  // RVH_RULESET_HPP
