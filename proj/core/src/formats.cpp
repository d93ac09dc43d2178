#include "rvh/formats.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace rvh {

namespace {

constexpr const char* kPartitionHeader = "rvh-partition v1";
constexpr const char* kStatsHeader = "rvh-stats v1";

std::string next_content_line(std::istream& in, std::size_t& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    return line;
  }
  return {};
}

ClosedRange parse_closed_range(const std::string& tok, std::size_t line_no) {
  // "[lo,hi]"
  if (tok.size() < 5 || tok.front() != '[' || tok.back() != ']') {
    throw ParseError(line_no, "bad range token '" + tok + "'");
  }
  const auto comma = tok.find(',');
  if (comma == std::string::npos) throw ParseError(line_no, "bad range token '" + tok + "'");
  try {
    const int lo = std::stoi(tok.substr(1, comma - 1));
    const int hi = std::stoi(tok.substr(comma + 1, tok.size() - comma - 2));
    if (lo < 0 || hi < lo || hi > 64) throw ParseError(line_no, "range out of bounds");
    return {static_cast<std::uint8_t>(lo), static_cast<std::uint8_t>(hi)};
  } catch (const std::logic_error&) {
    throw ParseError(line_no, "bad range token '" + tok + "'");
  }
}

}  // namespace

PartitionDocument PartitionDocument::from_ruleset(const Ruleset& ruleset,
                                                  const PartitionParams& params) {
  if (ruleset.empty()) {
    throw std::invalid_argument("cannot derive a partition from an empty ruleset");
  }
  PartitionDocument doc;
  doc.widths = ruleset.widths;
  doc.params = params;
  for (std::size_t k = 0; k < ruleset.dims(); ++k) {
    doc.per_dim.push_back(partition_dimension(ruleset, k, params));
  }
  return doc;
}

void write_partition(std::ostream& out, const PartitionDocument& doc) {
  out << kPartitionHeader << '\n';
  out << "widths";
  for (std::uint8_t w : doc.widths) out << ' ' << static_cast<unsigned>(w);
  out << '\n';
  out << "params " << doc.params.max_gap << ' ' << doc.params.max_merged_size << '\n';
  for (std::size_t k = 0; k < doc.per_dim.size(); ++k) {
    out << "dim " << k;
    for (const ClosedRange& r : doc.per_dim[k]) {
      out << " [" << static_cast<unsigned>(r.lo) << ',' << static_cast<unsigned>(r.hi)
          << ']';
    }
    out << '\n';
  }
}

PartitionDocument read_partition(std::istream& in) {
  std::size_t line_no = 0;
  if (next_content_line(in, line_no) != kPartitionHeader) {
    throw ParseError(line_no, "expected header '" + std::string(kPartitionHeader) + "'");
  }

  PartitionDocument doc;
  std::string line = next_content_line(in, line_no);
  {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag != "widths") throw ParseError(line_no, "expected 'widths'");
    unsigned w;
    while (ss >> w) {
      if (w == 0 || w > 64) throw ParseError(line_no, "width out of range");
      doc.widths.push_back(static_cast<std::uint8_t>(w));
    }
    if (doc.widths.empty()) throw ParseError(line_no, "no widths given");
  }
  line = next_content_line(in, line_no);
  {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag != "params") throw ParseError(line_no, "expected 'params'");
    if (!(ss >> doc.params.max_gap >> doc.params.max_merged_size)) {
      throw ParseError(line_no, "bad params line");
    }
  }
  doc.per_dim.resize(doc.widths.size());
  for (std::size_t i = 0; i < doc.widths.size(); ++i) {
    line = next_content_line(in, line_no);
    std::istringstream ss(line);
    std::string tag;
    std::size_t dim;
    if (!(ss >> tag >> dim) || tag != "dim" || dim >= doc.widths.size()) {
      throw ParseError(line_no, "expected 'dim <k> <ranges>'");
    }
    std::string tok;
    while (ss >> tok) doc.per_dim[dim].push_back(parse_closed_range(tok, line_no));
    if (doc.per_dim[dim].empty()) throw ParseError(line_no, "dimension has no ranges");
  }
  return doc;
}

PartitionDocument read_partition_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open partition file: " + path);
  return read_partition(in);
}

void write_partition_file(const std::string& path, const PartitionDocument& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write partition file: " + path);
  write_partition(out, doc);
}

void write_stats(std::ostream& out, const StatsDocument& doc) {
  out << kStatsHeader << '\n';
  if (doc.aggregate()) {
    out << "m " << *doc.table_count << '\n';
    out << "saturation " << *doc.saturation << '\n';
  }
  for (const auto& [rules, capacity] : doc.tables) {
    out << "table " << rules << ' ' << capacity << '\n';
  }
}

StatsDocument read_stats(std::istream& in) {
  std::size_t line_no = 0;
  if (next_content_line(in, line_no) != kStatsHeader) {
    throw ParseError(line_no, "expected header '" + std::string(kStatsHeader) + "'");
  }
  StatsDocument doc;
  std::string line;
  while (!(line = next_content_line(in, line_no)).empty()) {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "m") {
      std::size_t m;
      if (!(ss >> m) || m == 0) throw ParseError(line_no, "bad table count");
      doc.table_count = m;
    } else if (tag == "saturation") {
      double s;
      if (!(ss >> s) || s < 0) throw ParseError(line_no, "bad saturation");
      doc.saturation = s;
    } else if (tag == "table") {
      std::size_t n, cap;
      if (!(ss >> n >> cap) || cap == 0) throw ParseError(line_no, "bad table row");
      doc.tables.emplace_back(n, cap);
    } else {
      throw ParseError(line_no, "unknown stats line '" + tag + "'");
    }
  }
  if (doc.table_count.has_value() != doc.saturation.has_value()) {
    throw ParseError(line_no, "aggregate stats need both m and saturation");
  }
  if (!doc.aggregate() && doc.tables.empty()) {
    throw ParseError(line_no, "stats file holds no usable inputs");
  }
  return doc;
}

StatsDocument read_stats_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open stats file: " + path);
  return read_stats(in);
}

}  // namespace rvh
