#include "reformine/cli.hpp"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "reformine/graph.hpp"
#include "reformine/parser.hpp"
#include "reformine/pretty.hpp"
#include "test_support.hpp"

using namespace reformine;
using reformine::cli::CommandOutcome;
using reformine::testing::kExampleSpec;
namespace fs = std::filesystem;

namespace {

// Scratch directory for the spec/instance files a test needs.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    dir_ = fs::temp_directory_path() /
           ("reformine-cli-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter++));
    fs::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }
  std::string write(const std::string& name, const std::string& content) {
    const fs::path p = dir_ / name;
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

 private:
  fs::path dir_;
};

CommandOutcome run_cli(const std::vector<std::string>& args) {
  return reformine::cli::run(args);
}

const std::string kPairSpec =
    "find x : int(1..3)\nfind y : int(1..3)\nsuch that x < y\n";

const std::string kWhereSpec =
    "given n : int(1..9)\n"
    "where n % 2 = 0\n"
    "find x : int(1..n)\n"
    "such that x >= 1\n";

}  // namespace

// ============================================================
// fmt
// ============================================================

TEST_CASE("fmt prints the canonical form of the worked example") {
  TempDir tmp;
  const auto out = run_cli({"fmt", tmp.write("listing1.emini", kExampleSpec)});
  CHECK(out.exit_code == 0);
  CHECK(out.err.empty());
  CHECK(out.out == kExampleSpec);
  CHECK(out.out.find("1*(2+3)*4 = x") != std::string::npos);
}

TEST_CASE("fmt --annotate prints the box-drawing tree") {
  TempDir tmp;
  const auto out =
      run_cli({"fmt", tmp.write("spec.emini", kExampleSpec), "--annotate"});
  CHECK(out.exit_code == 0);
  CHECK(out.out == annotate(parse_spec(kExampleSpec)));
  CHECK(out.out.find("#FindStatement") != std::string::npos);
}

TEST_CASE("fmt reports parse errors with file, line, and column") {
  TempDir tmp;
  const auto out = run_cli({"fmt", tmp.write("bad.emini", "find x : int(1..\n")});
  CHECK(out.exit_code == 1);
  CHECK(out.out.empty());
  CHECK(out.err.find("bad.emini:") != std::string::npos);
  CHECK(out.err.find(": error: ") != std::string::npos);
}

TEST_CASE("a missing input file is a domain error") {
  const auto out = run_cli({"fmt", "/nonexistent/nowhere.emini"});
  CHECK(out.exit_code == 1);
  CHECK(out.err.find("cannot open file") != std::string::npos);
}

// ============================================================
// graph
// ============================================================

TEST_CASE("graph emits all three formats") {
  TempDir tmp;
  const std::string spec = tmp.write("spec.emini", kExampleSpec);

  const auto gp2 = run_cli({"graph", spec, "--format", "gp2"});
  CHECK(gp2.exit_code == 0);
  CHECK(gp2.out.find("root#Node") != std::string::npos);

  const auto dot = run_cli({"graph", spec, "--format", "dot"});
  CHECK(dot.exit_code == 0);
  CHECK(dot.out.find("digraph") != std::string::npos);

  const auto json = run_cli({"graph", spec, "--format", "json"});
  CHECK(json.exit_code == 0);
  // The JSON payload decodes back to the same specification.
  const GraphDoc doc = graph_from_json(json.out);
  CHECK(ast_equal(from_graph(doc), parse_spec(kExampleSpec)));
}

TEST_CASE("graph requires a valid format") {
  TempDir tmp;
  const std::string spec = tmp.write("spec.emini", kExampleSpec);
  CHECK(run_cli({"graph", spec, "--format", "xml"}).exit_code == 2);
  CHECK(run_cli({"graph", spec}).exit_code == 2);
}

// ============================================================
// rewrite
// ============================================================

TEST_CASE("rewrite --list reports the four commutations of the worked example") {
  TempDir tmp;
  const auto out = run_cli(
      {"rewrite", tmp.write("spec.emini", kExampleSpec), "--rule", "commute", "--list"});
  REQUIRE(out.exit_code == 0);
  const auto j = nlohmann::json::parse(out.out);
  REQUIRE(j.is_array());
  CHECK(j.size() == 4);
  for (const auto& m : j) {
    CHECK(m.at("rule") == "commute");
    CHECK(m.at("path").is_array());
  }
}

TEST_CASE("rewrite applies a match and traces it on stderr") {
  TempDir tmp;
  const auto out = run_cli(
      {"rewrite", tmp.write("spec.emini", kExampleSpec), "--rule", "commute"});
  REQUIRE(out.exit_code == 0);
  CHECK(out.out.find("x = 1*(2+3)*4") != std::string::npos);
  const auto trace = nlohmann::json::parse(out.err);
  CHECK(trace.at("rule") == "commute");
  CHECK(trace.at("path").is_array());
  // Commutation is invisible to the canonical digest.
  CHECK(trace.at("before-hash") == trace.at("after-hash"));
  CHECK(trace.at("before-hash").get<std::string>().size() == 16);
}

TEST_CASE("rewrite --index selects a later match and rejects out-of-range") {
  TempDir tmp;
  const std::string spec = tmp.write("spec.emini", kExampleSpec);
  const auto second = run_cli({"rewrite", spec, "--rule", "commute", "--index", "1"});
  CHECK(second.exit_code == 0);
  const auto first = run_cli({"rewrite", spec, "--rule", "commute", "--index", "0"});
  CHECK(first.out != second.out);

  const auto bad = run_cli({"rewrite", spec, "--rule", "commute", "--index", "9"});
  CHECK(bad.exit_code == 1);
  CHECK(bad.err.find("out of range") != std::string::npos);
}

TEST_CASE("rewrite --normalize folds the worked example") {
  TempDir tmp;
  const auto out =
      run_cli({"rewrite", tmp.write("spec.emini", kExampleSpec), "--normalize"});
  CHECK(out.exit_code == 0);
  CHECK(out.err.empty());
  CHECK(out.out == "find x : int(0..100)\nsuch that\n    20 = x\n");
}

TEST_CASE("rewrite flag misuse is a usage error") {
  TempDir tmp;
  const std::string spec = tmp.write("spec.emini", kExampleSpec);
  CHECK(run_cli({"rewrite", spec}).exit_code == 2);  // no rule, no normalize
  CHECK(run_cli({"rewrite", spec, "--rule", "nosuch", "--list"}).exit_code == 2);
  CHECK(run_cli({"rewrite", spec, "--rule", "commute", "--list", "--index", "1"})
            .exit_code == 2);
  CHECK(run_cli({"rewrite", spec, "--rule", "commute", "--normalize"}).exit_code == 2);
}

// ============================================================
// solve
// ============================================================

TEST_CASE("solve reports the worked example as JSON") {
  TempDir tmp;
  const auto out = run_cli({"solve", tmp.write("spec.emini", kExampleSpec)});
  REQUIRE(out.exit_code == 0);
  const auto j = nlohmann::json::parse(out.out);
  CHECK(j.at("status") == "sat");
  REQUIRE(j.at("solutions").size() == 1);
  CHECK(j.at("solutions")[0].at("x") == 20);
  CHECK(j.at("objective").is_null());
  CHECK(j.at("nodes") == 21);
  CHECK(j.at("failures") == 20);
  CHECK(j.at("millis").is_number());
}

TEST_CASE("solve --all enumerates every solution") {
  TempDir tmp;
  const auto out =
      run_cli({"solve", tmp.write("pair.emini", kPairSpec), "--all"});
  REQUIRE(out.exit_code == 0);
  const auto j = nlohmann::json::parse(out.out);
  CHECK(j.at("status") == "sat");
  CHECK(j.at("solutions").size() == 3);
  CHECK(j.at("solutions")[0] == nlohmann::json({{"x", 1}, {"y", 2}}));
}

TEST_CASE("solve picks optimize mode automatically for an objective") {
  TempDir tmp;
  const std::string spec = tmp.write(
      "min.emini", "find x : int(2..9)\nsuch that x * x >= 10\nminimising x\n");
  const auto out = run_cli({"solve", spec});
  REQUIRE(out.exit_code == 0);
  const auto j = nlohmann::json::parse(out.out);
  CHECK(j.at("status") == "optimal");
  CHECK(j.at("objective") == 4);
}

TEST_CASE("solve --budget reports budget exhaustion") {
  TempDir tmp;
  const auto out = run_cli(
      {"solve", tmp.write("spec.emini", kExampleSpec), "--budget", "5"});
  REQUIRE(out.exit_code == 0);
  const auto j = nlohmann::json::parse(out.out);
  CHECK(j.at("status") == "node-budget-exhausted");
  CHECK(j.at("nodes") == 5);
}

TEST_CASE("solve relation solutions use the instance JSON shape") {
  TempDir tmp;
  const std::string spec = tmp.write(
      "set.emini", "find S : set (size 2) of int(1..3)\nsuch that 1 in S\n");
  const auto out = run_cli({"solve", spec, "--all"});
  REQUIRE(out.exit_code == 0);
  const auto j = nlohmann::json::parse(out.out);
  REQUIRE(j.at("solutions").size() == 2);
  CHECK(j.at("solutions")[0].at("S") == nlohmann::json::array({1, 3}));
  CHECK(j.at("solutions")[1].at("S") == nlohmann::json::array({1, 2}));
}

TEST_CASE("solve on a where-violating instance names the clause") {
  TempDir tmp;
  const std::string spec = tmp.write("even.emini", kWhereSpec);
  const std::string inst = tmp.write("odd.param", "letting n be 3\n");
  const auto out = run_cli({"solve", spec, "--instance", inst});
  CHECK(out.exit_code == 1);
  CHECK(out.out.empty());
  CHECK(out.err.find("even.emini") != std::string::npos);
  CHECK(out.err.find("where clause violated: n%2 = 0") != std::string::npos);
}

TEST_CASE("solve accepts JSON instance files") {
  TempDir tmp;
  const std::string spec = tmp.write("even.emini", kWhereSpec);
  const std::string inst = tmp.write("even.json", "{\"n\": 4}");
  const auto out = run_cli({"solve", spec, "--instance", inst, "--all"});
  REQUIRE(out.exit_code == 0);
  const auto j = nlohmann::json::parse(out.out);
  CHECK(j.at("solutions").size() == 4);
}

TEST_CASE("solve attributes instance file problems to the instance file") {
  TempDir tmp;
  const std::string spec = tmp.write("even.emini", kWhereSpec);
  const std::string inst = tmp.write("broken.param", "letting n 3\n");
  const auto out = run_cli({"solve", spec, "--instance", inst});
  CHECK(out.exit_code == 1);
  CHECK(out.err.find("broken.param:1: error:") != std::string::npos);
}

// ============================================================
// gen
// ============================================================

TEST_CASE("gen emits deterministic instance blocks") {
  TempDir tmp;
  const std::string spec = tmp.write("even.emini", kWhereSpec);
  const auto a = run_cli({"gen", spec, "--count", "3", "--seed", "5"});
  REQUIRE(a.exit_code == 0);
  CHECK(a.out.substr(0, 13) == "$ instance 0\n");
  CHECK(a.out.find("letting n be ") != std::string::npos);
  const auto b = run_cli({"gen", spec, "--count", "3", "--seed", "5"});
  CHECK(a.out == b.out);
  const auto c = run_cli({"gen", spec, "--count", "3", "--seed", "6"});
  CHECK(a.out != c.out);
}

TEST_CASE("gen requires count and seed") {
  TempDir tmp;
  const std::string spec = tmp.write("even.emini", kWhereSpec);
  CHECK(run_cli({"gen", spec, "--seed", "5"}).exit_code == 2);
  CHECK(run_cli({"gen", spec, "--count", "3"}).exit_code == 2);
}

TEST_CASE("gen surfaces sampler failures as domain errors") {
  TempDir tmp;
  const std::string spec = tmp.write(
      "never.emini",
      "given n : int(1..9)\nwhere false\nfind x : int(1..2)\nsuch that x >= 1\n");
  const auto out = run_cli({"gen", spec, "--count", "1", "--seed", "1"});
  CHECK(out.exit_code == 1);
  CHECK(out.err.find("rejection limit exceeded") != std::string::npos);
}

// ============================================================
// explore
// ============================================================

TEST_CASE("explore reports baseline, best, and tree summary") {
  TempDir tmp;
  const std::string spec = tmp.write(
      "fold.emini", "find x : int(1..3)\nsuch that x + 1 <= 3, x * 1 = 2\n");
  tmp.write("instances/empty.param", "$ no parameters\n");
  const auto out = run_cli({"explore", spec, "--instances", tmp.path("instances"),
                            "--iters", "15", "--seed", "3"});
  REQUIRE(out.exit_code == 0);
  const auto j = nlohmann::json::parse(out.out);
  CHECK(j.at("baseline").at("nodes").get<std::uint64_t>() > 0);
  CHECK(j.at("baseline").at("reward") == 0.5);
  CHECK(j.at("best").at("reward").get<double>() >= 0.5);
  CHECK(j.at("best").at("spec-text").is_string());
  CHECK(j.at("best").at("sequence").is_array());
  CHECK(j.at("tree-summary").at("expanded").get<std::size_t>() >= 1);
  CHECK(j.at("tree-summary").at("depth-histogram")[0] == 1);
  CHECK(j.at("iterations") == 15);
}

TEST_CASE("explore is reproducible for a fixed seed") {
  TempDir tmp;
  const std::string spec = tmp.write(
      "fold.emini", "find x : int(1..3)\nsuch that x + 1 <= 3, x * 1 = 2\n");
  tmp.write("instances/empty.param", "$ no parameters\n");
  const std::vector<std::string> args = {
      "explore", spec, "--instances", tmp.path("instances"),
      "--iters", "10", "--seed", "7", "--jobs", "2"};
  auto a = nlohmann::json::parse(run_cli(args).out);
  auto b = nlohmann::json::parse(run_cli(args).out);
  a.erase("elapsed-millis");
  b.erase("elapsed-millis");
  CHECK(a == b);
}

TEST_CASE("explore writes an optional DOT dump of the search tree") {
  TempDir tmp;
  const std::string spec = tmp.write(
      "fold.emini", "find x : int(1..3)\nsuch that x * 1 = 2\n");
  tmp.write("instances/empty.param", "");
  const std::string dot_path = tmp.path("tree.dot");
  const auto out = run_cli({"explore", spec, "--instances", tmp.path("instances"),
                            "--iters", "5", "--seed", "1", "--dot", dot_path});
  REQUIRE(out.exit_code == 0);
  std::ifstream in(dot_path);
  REQUIRE(in.good());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("digraph search") != std::string::npos);
  CHECK(text.find("n0") != std::string::npos);
}

TEST_CASE("explore rejects a missing or empty instance directory") {
  TempDir tmp;
  const std::string spec = tmp.write(
      "fold.emini", "find x : int(1..3)\nsuch that x * 1 = 2\n");
  const auto missing = run_cli({"explore", spec, "--instances", tmp.path("nowhere"),
                                "--iters", "5", "--seed", "1"});
  CHECK(missing.exit_code == 1);
  CHECK(missing.err.find("not a directory") != std::string::npos);

  fs::create_directories(tmp.path("blank"));
  const auto blank = run_cli({"explore", spec, "--instances", tmp.path("blank"),
                              "--iters", "5", "--seed", "1"});
  CHECK(blank.exit_code == 1);
  CHECK(blank.err.find("no instance files found") != std::string::npos);
}

// ============================================================
// features
// ============================================================

TEST_CASE("features emits one CSV row per spec named by file stem") {
  TempDir tmp;
  const std::string listing = tmp.write("listing1.emini", kExampleSpec);
  const std::string pair = tmp.write("pair.emini", kPairSpec);
  const auto out = run_cli({"features", listing, pair});
  REQUIRE(out.exit_code == 0);
  CHECK(out.out.find("spec,find-statements,") == 0);
  CHECK(out.out.find("\nlisting1,1,0,0,0,1,0,1,0,0,1,0,0,0,0,0,0,6,0,1,0,4,0,0,0,"
                     "6,16,1.666666667,2,0,1,1\n") != std::string::npos);
  CHECK(out.out.find("\npair,") != std::string::npos);
}

TEST_CASE("features --pairwise emits a labelled distance matrix") {
  TempDir tmp;
  const std::string a = tmp.write("a.emini", kExampleSpec);
  const std::string b = tmp.write("b.emini", kPairSpec);
  const auto out = run_cli({"features", a, b, "--pairwise"});
  REQUIRE(out.exit_code == 0);
  CHECK(out.out.find("spec,a,b\n") == 0);
  CHECK(out.out.find("\na,0,") != std::string::npos);
  CHECK(out.out.find("\nb,") != std::string::npos);
}

// ============================================================
// top level
// ============================================================

TEST_CASE("missing or unknown subcommands are usage errors") {
  CHECK(run_cli({}).exit_code == 2);
  CHECK(run_cli({"frobnicate"}).exit_code == 2);
  CHECK(run_cli({"fmt"}).exit_code == 2);  // missing required positional
}

TEST_CASE("help exits zero and prints the subcommand list") {
  const auto out = run_cli({"--help"});
  CHECK(out.exit_code == 0);
  CHECK(out.out.find("fmt") != std::string::npos);
  CHECK(out.out.find("explore") != std::string::npos);
}
