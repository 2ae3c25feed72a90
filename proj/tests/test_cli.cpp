#include <filesystem>
#include <fstream>
#include <sstream>

#include "debtbugs/cli.hpp"
#include "debtbugs/ingest.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"

using namespace debtbugs;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name)
      : dir(fs::temp_directory_path() / ("debtbugs_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator/(const std::string& file) const { return (dir / file).string(); }
};

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

std::string header_line() {
  std::string line;
  for (auto column : kFeatureCsvHeader) line += (line.empty() ? "" : ",") + std::string(column);
  return line + "\n";
}

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(cli({}).code == 1);
  CHECK(cli({"nonsense"}).code == 1);
  CHECK(cli({"identify"}).code == 1);
  CHECK(cli({"train", "--in", "x.csv", "--model", "forest"}).code == 1);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("missing input files exit 4") {
  CHECK(cli({"identify", "--in", "/nonexistent/bugs.jsonl"}).code == 4);
}

TEST_CASE("identify on an empty snapshot writes an empty report") {
  Scratch s("empty");
  spit(s / "bugs.jsonl", "");
  auto r = cli({"identify", "--in", s / "bugs.jsonl", "--out", s / "debt.jsonl"});
  CHECK(r.code == 0);
  CHECK(slurp(s / "debt.jsonl").empty());
}

TEST_CASE("cyclic duplicate links exit 2") {
  Scratch s("cycle");
  std::ostringstream text;
  write_snapshot(fixture::snapshot({fixture::bug({.id = 1, .duplicate_of = 2}),
                                    fixture::bug({.id = 2, .duplicate_of = 1})}),
                 text);
  spit(s / "bugs.jsonl", text.str());
  auto r = cli({"identify", "--in", s / "bugs.jsonl"});
  CHECK(r.code == 2);
  CHECK(r.err.find("cycle") != std::string::npos);
}

TEST_CASE("malformed input: abort exits 2, skip carries on") {
  Scratch s("malformed");
  spit(s / "bugs.jsonl", bug_to_json_line(fixture::bug({.id = 1})) + "\nnot json\n");
  CHECK(cli({"ingest", "--in", s / "bugs.jsonl"}).code == 2);
  auto r = cli({"ingest", "--in", s / "bugs.jsonl", "--on-malformed", "skip", "--out", s / "c.jsonl"});
  CHECK(r.code == 0);
  CHECK(slurp(s / "c.jsonl") == bug_to_json_line(fixture::bug({.id = 1})) + "\n");
}

TEST_CASE("train on five rows with ten folds exits 3") {
  Scratch s("tiny");
  std::string csv = header_line();
  for (int i = 0; i < 5; ++i) csv += "P" + std::to_string(i) + ",trunk,100,1,1,1,0,0,0,0,0,0," + std::to_string(i) + "\n";
  spit(s / "f.csv", csv);
  CHECK(cli({"train", "--in", s / "f.csv", "--folds", "10"}).code == 3);
}

TEST_CASE("predict on an empty table writes just the header") {
  Scratch s("predict");
  REQUIRE(cli({"synth", "--seed", "3", "--products", "30", "--out", s / "bugs.jsonl"}).code == 0);
  REQUIRE(cli({"identify", "--in", s / "bugs.jsonl", "--out", s / "debt.jsonl"}).code == 0);
  REQUIRE(cli({"features", "--in", s / "bugs.jsonl", "--debt", s / "debt.jsonl", "--out", s / "f.csv"})
              .code == 0);
  REQUIRE(cli({"train", "--in", s / "f.csv", "--out", s / "model.json"}).code == 0);
  spit(s / "empty.csv", header_line());
  auto r = cli({"predict", "--model", s / "model.json", "--in", s / "empty.csv", "--out", s / "p.csv"});
  CHECK(r.code == 0);
  CHECK(slurp(s / "p.csv") == "product,version,predicted_avg_fix_time\n");

  auto full = cli({"predict", "--model", s / "model.json", "--in", s / "f.csv"});
  CHECK(full.code == 0);
  CHECK(std::count(full.out.begin(), full.out.end(), '\n') == 31);
}

TEST_CASE("the pipeline is byte-for-byte repeatable") {
  auto pipeline = [](const Scratch& s) {
    cli({"synth", "--seed", "17", "--products", "40", "--noise", "1.5", "--out", s / "bugs.jsonl"});
    cli({"identify", "--in", s / "bugs.jsonl", "--out", s / "debt.jsonl"});
    cli({"features", "--in", s / "bugs.jsonl", "--debt", s / "debt.jsonl", "--out", s / "f.csv"});
    cli({"correlate", "--in", s / "f.csv", "--out", s / "corr.json", "--csv", s / "corr.csv"});
    cli({"summary", "--in", s / "f.csv", "--out", s / "summary.json"});
    for (std::string kind : {"linear", "mtree", "mlp"}) {
      cli({"train", "--in", s / "f.csv", "--model", kind, "--seed", "4", "--out", s / (kind + ".json"),
           "--metrics", s / (kind + "_metrics.json")});
    }
  };
  Scratch a("repeat_a"), b("repeat_b");
  pipeline(a);
  pipeline(b);
  for (std::string file : {"bugs.jsonl", "ground_truth.json", "debt.jsonl", "f.csv", "corr.json",
                           "corr.csv", "summary.json", "linear.json", "linear_metrics.json",
                           "mtree.json", "mtree_metrics.json", "mlp.json", "mlp_metrics.json"}) {
    CAPTURE(file);
    const auto first = slurp(a / file);
    CHECK_FALSE(first.empty());
    CHECK(first == slurp(b / file));
  }
  auto metrics = nlohmann::json::parse(slurp(a / "linear_metrics.json"));
  CHECK(metrics["model"] == "linear");
  CHECK(metrics["k"] == 10);
  CHECK(metrics["n"] == 40);
}
