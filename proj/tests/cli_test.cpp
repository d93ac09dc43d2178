#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "rvh/formats.hpp"
#include "rvh/ruleset.hpp"
#include "support/fixtures.hpp"

namespace fs = std::filesystem;
using namespace rvh;
using namespace rvh::test;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliHarness {
 public:
  CliHarness() {
    const char* bin = std::getenv("RVH_CLI");
    REQUIRE_MESSAGE(bin != nullptr, "RVH_CLI must point at the rvh binary");
    binary_ = bin;
    dir_ = fs::temp_directory_path() /
           ("rvh-cli-test-" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }

  ~CliHarness() { fs::remove_all(dir_); }

  fs::path path(const std::string& name) const { return dir_ / name; }

  fs::path write(const std::string& name, const std::string& content) const {
    const fs::path p = path(name);
    std::ofstream out(p);
    out << content;
    return p;
  }

  RunResult run(const std::string& args) const {
    const fs::path out = path("stdout.txt");
    const fs::path err = path("stderr.txt");
    const std::string cmd =
        binary_ + " " + args + " > " + out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    RunResult result;
    result.exit_code = WEXITSTATUS(status);
    result.out = slurp(out);
    result.err = slurp(err);
    return result;
  }

 private:
  std::string binary_;
  fs::path dir_;
};

std::string toy_fixture_text() {
  std::stringstream buf;
  write_ruleset(buf, toy_ruleset());
  return buf.str();
}

}  // namespace

TEST_CASE("classify prints per-packet results and a summary") {
  CliHarness cli;
  const auto rules = cli.write("toy.rules", toy_fixture_text());
  const auto trace = cli.write("toy.trace", "31 16\n10 31\n");

  const RunResult rvh_run =
      cli.run("classify " + rules.string() + " " + trace.string() + " --engine rvh");
  CHECK(rvh_run.exit_code == 0);
  CHECK(rvh_run.out ==
        "2 4\n"
        "9 0\n"
        "# matched 2/2 (100.0%)\n");

  // The oracle engine must be byte-identical on stdout.
  const RunResult oracle_run =
      cli.run("classify " + rules.string() + " " + trace.string() + " --engine oracle");
  CHECK(oracle_run.exit_code == 0);
  CHECK(oracle_run.out == rvh_run.out);

  const RunResult tss_run =
      cli.run("classify " + rules.string() + " " + trace.string() + " --engine tss");
  CHECK(tss_run.out == rvh_run.out);
}

TEST_CASE("classify honors trace expectations") {
  CliHarness cli;
  const auto rules = cli.write("toy.rules", toy_fixture_text());

  const auto good = cli.write("good.trace", "31 16 2\n");
  CHECK(cli.run("classify " + rules.string() + " " + good.string()).exit_code == 0);

  const auto bad = cli.write("bad.trace", "31 16 5\n");
  const RunResult res = cli.run("classify " + rules.string() + " " + bad.string());
  CHECK(res.exit_code == 1);
  CHECK(res.err.find("record 0") != std::string::npos);
}

TEST_CASE("classify rejects unknown engines and missing files") {
  CliHarness cli;
  const auto rules = cli.write("toy.rules", toy_fixture_text());
  const auto trace = cli.write("toy.trace", "31 16\n");

  CHECK(cli.run("classify " + rules.string() + " " + trace.string() +
                " --engine warp")
            .exit_code == 2);
  CHECK(cli.run("classify does-not-exist.rules " + trace.string()).exit_code == 2);
}

TEST_CASE("partition command writes a loadable document") {
  CliHarness cli;
  const auto rules = cli.write("toy.rules", toy_fixture_text());
  const auto out = cli.path("toy.partition");

  const RunResult res =
      cli.run("partition " + rules.string() + " -o " + out.string());
  CHECK(res.exit_code == 0);
  CHECK(res.out == "range-vectors 4\n");

  const PartitionDocument doc = read_partition_file(out.string());
  CHECK(doc.range_vector_count() == 4);
  CHECK(doc.per_dim[0] == std::vector<ClosedRange>{{0, 2}, {3, 5}});
  CHECK(doc.per_dim[1] == std::vector<ClosedRange>{{0, 3}, {4, 5}});

  // classify accepts the saved partition explicitly.
  const auto trace = cli.write("toy.trace", "31 16 2\n");
  CHECK(cli.run("classify " + rules.string() + " " + trace.string() +
                " --partition " + out.string())
            .exit_code == 0);
}

TEST_CASE("estimate reproduces reference arithmetic from injected stats") {
  CliHarness cli;
  const auto stats = cli.write("acl1.stats",
                               "rvh-stats v1\n"
                               "m 703\n"
                               "saturation 0.71\n");
  const RunResult res = cli.run("estimate --stats-file " + stats.string() +
                                " --constants 61.0,4.7,0.9");
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("m 703") != std::string::npos);
  CHECK(res.out.find("estimated_us 45.23") != std::string::npos);

  const auto cloud = cli.write("cloud1.stats",
                               "rvh-stats v1\n"
                               "m 226\n"
                               "saturation 0.72\n");
  const RunResult res2 = cli.run("estimate --stats-file " + cloud.string() +
                                 " --constants 61.0,4.7,0.9");
  CHECK(res2.out.find("estimated_us 14.55") != std::string::npos);
}

TEST_CASE("estimate needs some input") {
  CliHarness cli;
  CHECK(cli.run("estimate").exit_code == 2);
}

TEST_CASE("stats emits distributions and the tuple table") {
  CliHarness cli;
  const auto rules = cli.write("toy.rules", toy_fixture_text());
  const auto dist = cli.path("dist.csv");
  const auto lv = cli.path("lv.csv");

  const RunResult res = cli.run("stats " + rules.string() + " --out " +
                                dist.string() + " --lv-out " + lv.string());
  CHECK(res.exit_code == 0);

  const std::string dist_text = slurp(dist);
  CHECK(dist_text.find("dim,length,mass,cdf") == 0);
  // The final CDF value of each dimension reaches 1.
  CHECK(dist_text.find("0,5,0.2,1\n") != std::string::npos);
  CHECK(dist_text.find("1,5,0.4,1\n") != std::string::npos);

  // Co-occurrence rows: header plus one line per distinct length vector.
  const std::string lv_text = slurp(lv);
  CHECK(std::count(lv_text.begin(), lv_text.end(), '\n') == 1 + 8);
}

TEST_CASE("bench lookup writes csv and records for both engines") {
  CliHarness cli;
  std::stringstream rules_text;
  write_ruleset(rules_text, clustered_ruleset(400, 23));
  const auto rules = cli.write("clustered.rules", rules_text.str());

  const Ruleset rs = clustered_ruleset(400, 23);
  std::stringstream trace_text;
  std::vector<TraceRecord> records;
  for (const Packet& p : generate_trace(rs, 500, 2)) {
    records.push_back({p, oracle_classify(rs, p).rule_id});
  }
  write_trace(trace_text, records);
  const auto trace = cli.write("clustered.trace", trace_text.str());

  const auto csv = cli.path("report.csv");
  const auto jsonl = cli.path("report.jsonl");
  const RunResult res = cli.run(
      "bench lookup --ruleset " + rules.string() + " --trace " + trace.string() +
      " --engine rvh --engine tss --reps 2 --csv " + csv.string() +
      " --records " + jsonl.string());
  CHECK(res.exit_code == 0);

  const std::string csv_text = slurp(csv);
  CHECK(csv_text.find("engine,metric,ruleset,rules,value,seed,reps") == 0);
  CHECK(csv_text.find("rvh,mlps,clustered,400,") != std::string::npos);
  CHECK(csv_text.find("tss,mlps,clustered,400,") != std::string::npos);

  const std::string jsonl_text = slurp(jsonl);
  CHECK(std::count(jsonl_text.begin(), jsonl_text.end(), '\n') == 2);
  CHECK(jsonl_text.find("\"oracle_checked\":true") != std::string::npos);
}

TEST_CASE("bench update, mixed, and memory drive the harness end to end") {
  CliHarness cli;
  std::stringstream rules_text;
  write_ruleset(rules_text, clustered_ruleset(250, 25));
  const auto rules = cli.write("clustered.rules", rules_text.str());

  const RunResult update = cli.run("bench update --ruleset " + rules.string() +
                                   " --engine rvh --reps 2");
  CHECK(update.exit_code == 0);
  CHECK(update.out.find("rvh    mups") != std::string::npos);
  CHECK(update.out.find("insert=") != std::string::npos);

  const Ruleset rs = clustered_ruleset(250, 25);
  std::stringstream trace_text;
  std::vector<TraceRecord> records;
  for (const Packet& p : generate_trace(rs, 300, 2)) records.push_back({p, std::nullopt});
  write_trace(trace_text, records);
  const auto trace = cli.write("clustered.trace", trace_text.str());

  const RunResult mixed =
      cli.run("bench mixed --ruleset " + rules.string() + " --trace " + trace.string() +
              " --engine rvh --rate 1000 --duration 0.05");
  CHECK(mixed.exit_code == 0);
  CHECK(mixed.out.find("mixed_mlps") != std::string::npos);

  const RunResult memory =
      cli.run("bench memory --ruleset " + rules.string() + " --engine rvh --engine tss");
  CHECK(memory.exit_code == 0);
  CHECK(memory.out.find("rvh    memory_bytes") != std::string::npos);
  CHECK(memory.out.find("tss    memory_bytes") != std::string::npos);
}

TEST_CASE("estimate without usable input fails cleanly") {
  CliHarness cli;
  const auto empty = cli.write("empty.rules", "# nothing here\n");
  CHECK(cli.run("estimate " + empty.string()).exit_code == 2);
  CHECK(cli.run("partition missing.rules -o x").exit_code == 2);
}

TEST_CASE("bench sweep prints the granularity table") {
  CliHarness cli;
  std::stringstream rules_text;
  write_ruleset(rules_text, clustered_ruleset(300, 24));
  const auto rules = cli.write("clustered.rules", rules_text.str());

  const RunResult res =
      cli.run("bench sweep --ruleset " + rules.string() + " --segments 1..4");
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("segments,range_vectors,live_tables,hash_ns,verify_ns,total_ns") ==
        0);
  CHECK(std::count(res.out.begin(), res.out.end(), '\n') == 1 + 4);
  CHECK(res.out.find("\n1,1,") != std::string::npos);
  CHECK(res.out.find("\n4,16,") != std::string::npos);
}

TEST_CASE("usage errors exit with code 2") {
  CliHarness cli;
  CHECK(cli.run("no-such-command").exit_code == 2);
  CHECK(cli.run("bench lookup").exit_code == 2);  // missing required flags
  CHECK(cli.run("--help").exit_code == 0);
}
