#include "rvh/ruleset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_set>

namespace rvh {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

bool parse_u64(const std::string& s, std::uint64_t& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

// "a.b.c.d/len" -> 32-bit prefix
Prefix parse_ipv4_prefix(const std::string& tok, std::size_t line_no) {
  const auto slash = tok.find('/');
  if (slash == std::string::npos) throw ParseError(line_no, "missing '/len' in '" + tok + "'");
  std::uint64_t octets[4];
  std::size_t start = 0;
  const std::string addr = tok.substr(0, slash);
  for (int i = 0; i < 4; ++i) {
    const auto dot = i < 3 ? addr.find('.', start) : addr.size();
    if (dot == std::string::npos || !parse_u64(addr.substr(start, dot - start), octets[i]) ||
        octets[i] > 255) {
      throw ParseError(line_no, "bad IPv4 address '" + addr + "'");
    }
    start = dot + 1;
  }
  std::uint64_t len;
  if (!parse_u64(tok.substr(slash + 1), len) || len > 32) {
    throw ParseError(line_no, "bad prefix length in '" + tok + "'");
  }
  const std::uint64_t value =
      (octets[0] << 24) | (octets[1] << 16) | (octets[2] << 8) | octets[3];
  return make_prefix(value, static_cast<unsigned>(len), 32);
}

void require_port(const std::string& tok, std::size_t line_no) {
  std::uint64_t v;
  if (!parse_u64(tok, v) || v > 65535) {
    throw ParseError(line_no, "bad port '" + tok + "'");
  }
}

void require_proto(const std::string& tok, std::size_t line_no) {
  // "0xHH/0xHH"
  const auto slash = tok.find('/');
  if (slash == std::string::npos) throw ParseError(line_no, "bad protocol '" + tok + "'");
  for (const std::string& part : {tok.substr(0, slash), tok.substr(slash + 1)}) {
    if (part.size() < 3 || part[0] != '0' || (part[1] != 'x' && part[1] != 'X')) {
      throw ParseError(line_no, "bad protocol '" + tok + "'");
    }
    std::uint64_t v = 0;
    auto [ptr, ec] =
        std::from_chars(part.data() + 2, part.data() + part.size(), v, 16);
    if (ec != std::errc{} || ptr != part.data() + part.size() || v > 255) {
      throw ParseError(line_no, "bad protocol '" + tok + "'");
    }
  }
}

// "bits/len" in binary, or "*" for the zero-length prefix
Prefix parse_binary_prefix(const std::string& tok, unsigned width, std::size_t line_no) {
  if (tok == "*") return Prefix{};
  const auto slash = tok.find('/');
  if (slash == std::string::npos) {
    throw ParseError(line_no, "expected bits/len or '*', got '" + tok + "'");
  }
  const std::string bits = tok.substr(0, slash);
  std::uint64_t len;
  if (!parse_u64(tok.substr(slash + 1), len) || len != bits.size() || len > width) {
    throw ParseError(line_no, "prefix length mismatch in '" + tok + "'");
  }
  std::uint64_t value = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw ParseError(line_no, "non-binary digit in '" + tok + "'");
    value = (value << 1) | static_cast<std::uint64_t>(c - '0');
  }
  return make_prefix(value << (width - len), static_cast<unsigned>(len), width);
}

Ruleset parse_fixture(std::istream& in, const std::vector<std::string>& header,
                      std::size_t header_line, std::size_t& line_no) {
  Ruleset rs;
  if (header.size() < 2) throw ParseError(header_line, "!widths needs >= 1 dimension");
  for (std::size_t i = 1; i < header.size(); ++i) {
    std::uint64_t w;
    if (!parse_u64(header[i], w) || w == 0 || w > 64) {
      throw ParseError(header_line, "bad field width '" + header[i] + "'");
    }
    rs.widths.push_back(static_cast<std::uint8_t>(w));
  }

  std::unordered_set<RuleId> seen;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = split_ws(line);
    if (toks.empty() || toks[0][0] == '#') continue;
    const std::size_t d = rs.dims();
    if (toks.size() < d + 2) throw ParseError(line_no, "too few columns");

    Rule rule;
    std::uint64_t id;
    if (!parse_u64(toks[0], id) || id > UINT32_MAX) {
      throw ParseError(line_no, "bad rule id '" + toks[0] + "'");
    }
    rule.id = static_cast<RuleId>(id);
    if (!seen.insert(rule.id).second) {
      throw ParseError(line_no, "duplicate rule id " + toks[0]);
    }
    for (std::size_t k = 0; k < d; ++k) {
      rule.fields.push_back(parse_binary_prefix(toks[1 + k], rs.widths[k], line_no));
    }
    std::uint64_t pri;
    if (!parse_u64(toks[1 + d], pri) || pri > UINT32_MAX) {
      throw ParseError(line_no, "bad priority '" + toks[1 + d] + "'");
    }
    rule.priority = static_cast<std::uint32_t>(pri);
    for (std::size_t i = 2 + d; i < toks.size(); ++i) {
      if (!rule.action.empty()) rule.action += ' ';
      rule.action += toks[i];
    }
    rs.rules.push_back(std::move(rule));
  }
  return rs;
}

}  // namespace

Ruleset parse_ruleset(std::istream& in, const ParseOptions& opts) {
  if (opts.dims != 2) {
    throw std::invalid_argument("filter-format ingestion extracts exactly 2 address fields");
  }
  std::size_t line_no = 0;
  std::string line;

  // Find the first content line to pick the format, then continue in it.
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = split_ws(line);
    if (toks.empty() || toks[0][0] == '#') continue;

    if (toks[0] == "!widths") return parse_fixture(in, toks, line_no, line_no);

    // Filter format from here on.
    Ruleset rs;
    rs.widths = {32, 32};
    std::size_t current_line = line_no;
    std::vector<std::string> current = toks;
    while (true) {
      if (!current.empty() && current[0][0] != '#') {
        if (current.size() < 9 || current[0][0] != '@' || current[3] != ":" ||
            current[6] != ":") {
          throw ParseError(current_line, "malformed filter line");
        }
        Rule rule;
        rule.id = static_cast<RuleId>(rs.rules.size());
        rule.fields.push_back(parse_ipv4_prefix(current[0].substr(1), current_line));
        rule.fields.push_back(parse_ipv4_prefix(current[1], current_line));
        require_port(current[2], current_line);
        require_port(current[4], current_line);
        require_port(current[5], current_line);
        require_port(current[7], current_line);
        require_proto(current[8], current_line);
        rs.rules.push_back(std::move(rule));
      }
      if (!std::getline(in, line)) break;
      ++line_no;
      current_line = line_no;
      current = split_ws(line);
    }
    // Earlier lines win: first rule gets priority N, last gets 1.
    const std::uint32_t n = static_cast<std::uint32_t>(rs.rules.size());
    for (std::uint32_t i = 0; i < n; ++i) rs.rules[i].priority = n - i;
    return rs;
  }

  // Nothing but blanks and comments.
  Ruleset rs;
  rs.widths = Widths(opts.dims, 32);
  return rs;
}

Ruleset parse_ruleset_file(const std::string& path, const ParseOptions& opts) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open ruleset file: " + path);
  return parse_ruleset(in, opts);
}

std::string prefix_to_string(const Prefix& p, unsigned width) {
  if (p.length == 0) return "*";
  const std::uint64_t bits = top_bits(p.value, p.length, width);
  std::string out;
  out.reserve(p.length + 4u);
  for (unsigned i = 0; i < p.length; ++i) {
    out.push_back(static_cast<char>('0' + ((bits >> (p.length - 1 - i)) & 1)));
  }
  out += '/';
  out += std::to_string(p.length);
  return out;
}

void write_ruleset(std::ostream& out, const Ruleset& ruleset) {
  out << "!widths";
  for (std::uint8_t w : ruleset.widths) out << ' ' << static_cast<unsigned>(w);
  out << '\n';
  for (const Rule& r : ruleset.rules) {
    out << r.id;
    for (std::size_t k = 0; k < r.fields.size(); ++k) {
      out << ' ' << prefix_to_string(r.fields[k], ruleset.widths[k]);
    }
    out << ' ' << r.priority;
    if (!r.action.empty()) out << ' ' << r.action;
    out << '\n';
  }
}

std::vector<TraceRecord> parse_trace(std::istream& in) {
  std::vector<TraceRecord> trace;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = split_ws(line);
    if (toks.empty() || toks[0][0] == '#') continue;
    if (toks.size() != 2 && toks.size() != 3 && toks.size() != 6) {
      throw ParseError(line_no, "expected 2, 3, or 6 columns");
    }
    std::vector<std::uint64_t> cols(toks.size());
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (!parse_u64(toks[i], cols[i])) {
        throw ParseError(line_no, "bad integer '" + toks[i] + "'");
      }
    }
    TraceRecord rec;
    rec.packet.headers = {cols[0], cols[1]};
    if (toks.size() > 2) {
      const std::uint64_t expected = cols.back();
      if (expected > UINT32_MAX) throw ParseError(line_no, "expected id out of range");
      rec.expected = static_cast<RuleId>(expected);
    }
    trace.push_back(std::move(rec));
  }
  return trace;
}

std::vector<TraceRecord> parse_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  return parse_trace(in);
}

void write_trace(std::ostream& out, const std::vector<TraceRecord>& trace) {
  for (const TraceRecord& rec : trace) {
    for (std::size_t k = 0; k < rec.packet.headers.size(); ++k) {
      if (k) out << ' ';
      out << rec.packet.headers[k];
    }
    if (rec.expected) out << ' ' << *rec.expected;
    out << '\n';
  }
}

std::vector<Packet> generate_trace(const Ruleset& ruleset, std::size_t count,
                                   std::uint64_t seed) {
  if (ruleset.empty()) {
    throw std::invalid_argument("cannot generate a trace from an empty ruleset");
  }
  std::mt19937_64 rng(seed);
  std::vector<Packet> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Rule& rule = ruleset.rules[rng() % ruleset.rules.size()];
    Packet p;
    p.headers.reserve(ruleset.dims());
    for (std::size_t k = 0; k < ruleset.dims(); ++k) {
      const unsigned free_bits = ruleset.widths[k] - rule.fields[k].length;
      p.headers.push_back(rule.fields[k].value | (rng() & low_mask(free_bits)));
    }
    out.push_back(std::move(p));
  }
  return out;
}

MatchResult oracle_classify(const Ruleset& ruleset, const Packet& packet) {
  const Rule* best = nullptr;
  for (const Rule& r : ruleset.rules) {
    if (!rule_matches(r, packet, ruleset.widths)) continue;
    if (!best || ranks_before(r.priority, r.id, best->priority, best->id)) {
      best = &r;
    }
  }
  if (!best) return MatchResult{};
  return MatchResult{best->id, best->priority};
}

std::vector<double> prefix_length_histogram(const Ruleset& ruleset, std::size_t dim) {
  if (ruleset.empty()) {
    throw std::invalid_argument("histogram of an empty ruleset is undefined");
  }
  if (dim >= ruleset.dims()) throw std::invalid_argument("dimension out of range");
  std::vector<double> hist(ruleset.widths[dim] + 1, 0.0);
  for (const Rule& r : ruleset.rules) {
    hist[r.fields[dim].length] += 1.0;
  }
  for (double& mass : hist) mass /= static_cast<double>(ruleset.size());
  return hist;
}

}  // namespace rvh
