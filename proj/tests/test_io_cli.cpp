#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "lll/cli.hpp"
#include "lll/errors.hpp"
#include "lll/fixer.hpp"
#include "lll/generators.hpp"
#include "lll/instance.hpp"
#include "lll/json_io.hpp"

using namespace lll;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "lll_io_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the CLI in-process, capturing the machine-readable stdout stream.
std::pair<int, std::string> cli(std::vector<std::string> args) {
  args.insert(args.begin(), "lll");
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());

  std::stringstream captured;
  std::stringstream err_sink;
  std::streambuf* old_out = std::cout.rdbuf(captured.rdbuf());
  std::streambuf* old_err = std::cerr.rdbuf(err_sink.rdbuf());
  int code = run_cli(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  return {code, captured.str()};
}

VariableSpec coin(const std::string& id) {
  return {id, {"h", "t"}, {"1/2", "1/2"}};
}

LllInstance triangle() {
  return build(
      {coin("cAB"), coin("cBC"), coin("cCA"), coin("pA"), coin("pB"), coin("pC")},
      {{"A", {"cAB", "cCA", "pA"}, {{"h", "h", "h"}}},
       {"B", {"cAB", "cBC", "pB"}, {{"h", "h", "h"}}},
       {"C", {"cBC", "cCA", "pC"}, {{"h", "h", "h"}}}},
      3);
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Internal;
}

const std::string kCoinInstance =
    R"({"rank_cap":3,"variables":[{"id":"X","domain":["h","t"],"probs":["1/2","1/2"]}],)"
    R"("events":[{"id":"E","vars":["X"],"occurs":[["h"]]}]})";

}  // namespace

TEST_CASE("instance files round trip exactly") {
  fs::path dir = fresh_dir("roundtrip");
  std::vector<LllInstance> fixtures;
  fixtures.push_back(triangle());
  fixtures.push_back(gen_random_rank3(13, 4, 3, 6));
  fixtures.push_back(gen_hypergraph_orientation(9, cyclic_triple_system(9), 2));
  fixtures.push_back(gen_weak_splitting_relaxed(9, 9, 3, 16, 2, 4));
  int i = 0;
  for (const LllInstance& inst : fixtures) {
    fs::path p = dir / ("inst" + std::to_string(i++) + ".json");
    save_instance(inst, p.string());
    CHECK(same_instance(inst, load_instance(p.string())));
    // Serialization itself is deterministic.
    fs::path q = dir / "again.json";
    save_instance(inst, q.string());
    CHECK(read_text(p) == read_text(q));
  }
}

TEST_CASE("assignment files reproduce the fixing order") {
  fs::path dir = fresh_dir("assignment");
  LllInstance tri = triangle();
  RunResult res = run_sequential(tri, OrderPolicy::seeded_shuffle, 3);
  fs::path p = dir / "assignment.json";
  save_assignment(tri, res.assignment, p.string());
  CHECK(load_assignment(tri, p.string()) == res.assignment.order());
}

TEST_CASE("trace files round trip exactly") {
  fs::path dir = fresh_dir("trace");
  LllInstance inst = gen_random_rank3(12, 3, 3, 21);
  RunResult res = run_sequential(inst, OrderPolicy::declaration, 0);
  fs::path p = dir / "trace.jsonl";
  save_trace(inst, res.trace, p.string());
  CHECK(load_trace(inst, p.string()) == res.trace);
}

TEST_CASE("malformed instance files map to parse errors with positions") {
  fs::path dir = fresh_dir("malformed");

  fs::path bad_json = dir / "bad.json";
  write_text(bad_json, "{\n  \"rank_cap\": 3,\n  nope\n}\n");
  ErrorKind k = kind_of([&] { load_instance(bad_json.string()); });
  CHECK(k == ErrorKind::ParseError);
  try {
    load_instance(bad_json.string());
  } catch (const Error& e) {
    auto detail = e.record()["error"]["detail"];
    CHECK(detail["line"] == 3);
    CHECK(detail["source"] == bad_json.string());
  }

  fs::path bad_sum = dir / "sum.json";
  write_text(bad_sum,
             R"({"rank_cap":3,"variables":[{"id":"X","domain":["h","t"],)"
             R"("probs":["49/100","50/100"]}],)"
             R"("events":[{"id":"E","vars":["X"],"occurs":[["h"]]}]})");
  CHECK(kind_of([&] { load_instance(bad_sum.string()); }) ==
        ErrorKind::ParseError);

  fs::path zero_prob = dir / "zero.json";
  write_text(zero_prob,
             R"({"rank_cap":3,"variables":[{"id":"X","domain":["h","t"],)"
             R"("probs":["1","0"]}],)"
             R"("events":[{"id":"E","vars":["X"],"occurs":[["h"]]}]})");
  CHECK(kind_of([&] { load_instance(zero_prob.string()); }) ==
        ErrorKind::ParseError);

  fs::path unknown_var = dir / "unknown.json";
  write_text(unknown_var,
             R"({"rank_cap":3,"variables":[{"id":"X","domain":["h","t"],)"
             R"("probs":["1/2","1/2"]}],)"
             R"("events":[{"id":"E","vars":["Y"],"occurs":[["h"]]}]})");
  CHECK(exit_code_for(kind_of([&] { load_instance(unknown_var.string()); })) ==
        2);

  fs::path decimal = dir / "decimal.json";
  write_text(decimal,
             R"({"rank_cap":3,"variables":[{"id":"X","domain":["h","t"],)"
             R"("probs":["0.5","0.5"]}],)"
             R"("events":[{"id":"E","vars":["X"],"occurs":[["h"]]}]})");
  CHECK(kind_of([&] { load_instance(decimal.string()); }) ==
        ErrorKind::ParseError);

  // Structurally fine but probabilistically inadmissible: three events of
  // probability 1/4 with pairwise shared coins (degree 2 needs < 1/4).
  fs::path violating = dir / "violating.json";
  write_text(
      violating,
      R"({"rank_cap":3,"variables":[)"
      R"({"id":"c1","domain":["h","t"],"probs":["1/2","1/2"]},)"
      R"({"id":"c2","domain":["h","t"],"probs":["1/2","1/2"]},)"
      R"({"id":"c3","domain":["h","t"],"probs":["1/2","1/2"]}],)"
      R"("events":[)"
      R"({"id":"A","vars":["c1","c2"],"occurs":[["h","h"]]},)"
      R"({"id":"B","vars":["c2","c3"],"occurs":[["h","h"]]},)"
      R"({"id":"C","vars":["c3","c1"],"occurs":[["h","h"]]}]})");
  CHECK(kind_of([&] { load_instance(violating.string()); }) ==
        ErrorKind::CriterionViolated);
}

TEST_CASE("assignment files are validated against the instance") {
  fs::path dir = fresh_dir("assign_validate");
  fs::path inst_path = dir / "inst.json";
  write_text(inst_path, kCoinInstance);
  LllInstance inst = load_instance(inst_path.string());

  fs::path p = dir / "a.json";
  write_text(p, R"({"assignment":[{"var":"Y","value":"t"}]})");
  CHECK(kind_of([&] { load_assignment(inst, p.string()); }) ==
        ErrorKind::ParseError);

  write_text(p, R"({"assignment":[{"var":"X","value":"sideways"}]})");
  CHECK(kind_of([&] { load_assignment(inst, p.string()); }) ==
        ErrorKind::ParseError);

  write_text(p,
             R"({"assignment":[{"var":"X","value":"t"},{"var":"X","value":"h"}]})");
  CHECK(kind_of([&] { load_assignment(inst, p.string()); }) ==
        ErrorKind::ParseError);

  write_text(p, R"({"assignment":{"X":"t"}})");
  CHECK(kind_of([&] { load_assignment(inst, p.string()); }) ==
        ErrorKind::ParseError);
}

TEST_CASE("trace files are validated structurally with line numbers") {
  fs::path dir = fresh_dir("trace_validate");
  LllInstance tri = triangle();
  RunResult res = run_sequential(tri, OrderPolicy::declaration, 0);
  fs::path p = dir / "trace.jsonl";
  save_trace(tri, res.trace, p.string());

  std::string text = read_text(p);
  // Point a write at an edge that does not exist ("A"-"A").
  std::string tampered = text;
  auto pos = tampered.find(R"("edge":["A","B"])");
  REQUIRE(pos != std::string::npos);
  tampered.replace(pos, 16, R"("edge":["A","A"])");
  fs::path bad = dir / "bad.jsonl";
  write_text(bad, tampered);
  CHECK(kind_of([&] { load_trace(tri, bad.string()); }) ==
        ErrorKind::ParseError);

  // Corrupt a rational.
  std::string bad_rat = text;
  pos = bad_rat.find("\"1/1\"");
  REQUIRE(pos != std::string::npos);
  bad_rat.replace(pos, 5, "\"1.0\"");
  write_text(bad, bad_rat);
  CHECK(kind_of([&] { load_trace(tri, bad.string()); }) ==
        ErrorKind::ParseError);
}

TEST_CASE("verify blesses genuine artifacts and flags tampered ones") {
  fs::path dir = fresh_dir("verify");
  fs::path inst_path = dir / "inst.json";
  write_text(inst_path, kCoinInstance);

  auto [run_code, run_out] =
      cli({"run", "--instance", inst_path.string(), "--mode", "sequential",
           "-o", (dir / "out").string()});
  REQUIRE(run_code == 0);

  fs::path assignment = dir / "out" / "assignment.json";
  fs::path trace = dir / "out" / "trace.jsonl";
  CHECK(cli({"verify", "--instance", inst_path.string(), "--assignment",
             assignment.string()})
            .first == 0);
  CHECK(cli({"verify", "--instance", inst_path.string(), "--trace",
             trace.string()})
            .first == 0);

  // The engine must have dodged the single event by picking tails; flipping
  // the record to heads makes the event occur.
  std::string a = read_text(assignment);
  auto pos = a.find("\"t\"");
  REQUIRE(pos != std::string::npos);
  a.replace(pos, 3, "\"h\"");
  fs::path tampered = dir / "tampered.json";
  write_text(tampered, a);
  auto [code, out] = cli({"verify", "--instance", inst_path.string(),
                          "--assignment", tampered.string()});
  CHECK(code == 1);
  CHECK(out.find("\"E\"") != std::string::npos);  // names the occurring event

  // Same flip inside the trace: the recorded increases no longer match.
  std::string t = read_text(trace);
  pos = t.find(R"("value":"t")");
  REQUIRE(pos != std::string::npos);
  t.replace(pos, 11, R"("value":"h")");
  fs::path bad_trace = dir / "tampered.jsonl";
  write_text(bad_trace, t);
  CHECK(cli({"verify", "--instance", inst_path.string(), "--trace",
             bad_trace.string()})
            .first == 1);
}

TEST_CASE("an empty instance verifies an empty assignment") {
  fs::path dir = fresh_dir("empty");
  fs::path inst_path = dir / "inst.json";
  write_text(inst_path, R"({"rank_cap":3,"variables":[],"events":[]})");
  fs::path a = dir / "a.json";
  write_text(a, R"({"assignment":[]})");
  CHECK(cli({"verify", "--instance", inst_path.string(), "--assignment",
             a.string()})
            .first == 0);
}

TEST_CASE("running a criterion-violating file exits 2 with a record") {
  fs::path dir = fresh_dir("violating_run");
  fs::path inst_path = dir / "inst.json";
  write_text(
      inst_path,
      R"({"rank_cap":3,"variables":[)"
      R"({"id":"c1","domain":["h","t"],"probs":["1/2","1/2"]},)"
      R"({"id":"c2","domain":["h","t"],"probs":["1/2","1/2"]},)"
      R"({"id":"c3","domain":["h","t"],"probs":["1/2","1/2"]}],)"
      R"("events":[)"
      R"({"id":"A","vars":["c1","c2"],"occurs":[["h","h"]]},)"
      R"({"id":"B","vars":["c2","c3"],"occurs":[["h","h"]]},)"
      R"({"id":"C","vars":["c3","c1"],"occurs":[["h","h"]]}]})");
  auto [code, out] = cli({"run", "--instance", inst_path.string()});
  CHECK(code == 2);
  CHECK(out.find("CriterionViolated") != std::string::npos);
}

TEST_CASE("identical flags and seed produce byte-identical artifacts") {
  fs::path dir = fresh_dir("deterministic");
  fs::path inst_path = dir / "inst.json";
  CHECK(cli({"gen", "--family", "random-r3", "--events", "14", "--seed", "9",
             "-o", inst_path.string()})
            .first == 0);

  for (int i = 0; i < 2; ++i) {
    CHECK(cli({"run", "--instance", inst_path.string(), "--order",
               "seeded-shuffle", "--seed", "7", "-o",
               (dir / ("run" + std::to_string(i))).string()})
              .first == 0);
    CHECK(cli({"simulate", "--instance", inst_path.string(), "--mode",
               "parallel-r3", "-o",
               (dir / ("sim" + std::to_string(i))).string()})
              .first == 0);
  }
  for (const char* name : {"assignment.json", "trace.jsonl"}) {
    CHECK(read_text(dir / "run0" / name) == read_text(dir / "run1" / name));
  }
  CHECK(read_text(dir / "sim0" / "rounds.jsonl") ==
        read_text(dir / "sim1" / "rounds.jsonl"));
  CHECK(fs::exists(dir / "sim0" / "assignment.json"));
}

TEST_CASE("usage problems exit 2") {
  fs::path dir = fresh_dir("usage");
  fs::path inst_path = dir / "inst.json";
  write_text(inst_path, kCoinInstance);

  CHECK(cli({"certify", "--samples", "0"}).first == 2);
  CHECK(cli({"frobnicate"}).first == 2);
  CHECK(cli({"run"}).first == 2);  // --instance is required
  CHECK(cli({"run", "--instance", inst_path.string(), "--order",
             "alphabetical"})
            .first == 2);
  CHECK(cli({"run", "--instance", inst_path.string(), "--check", "never"})
            .first == 2);
  CHECK(cli({"simulate", "--instance", inst_path.string(), "--mode",
             "sequential"})
            .first == 2);
  CHECK(cli({"gen", "--family", "martian", "-o", (dir / "x.json").string()})
            .first == 2);
  CHECK(cli({"srep", "mesh", "--step", "0", "-o", (dir / "m.csv").string()})
            .first == 2);
  CHECK(cli({"verify", "--instance", inst_path.string()}).first == 2);
  CHECK(cli({"run", "--instance", (dir / "absent.json").string()}).first == 2);

  CHECK(cli({"--help"}).first == 0);
}

TEST_CASE("surface mesh subcommand writes the advertised grid") {
  fs::path dir = fresh_dir("mesh");
  fs::path out = dir / "mesh.csv";
  CHECK(cli({"srep", "mesh", "--step", "1", "-o", out.string()}).first == 0);
  std::string text = read_text(out);
  int lines = 0;
  for (char c : text) lines += (c == '\n');
  CHECK(lines == 16);  // header plus the 15 admissible (a, b) pairs
  CHECK(text.rfind("a,b,f", 0) == 0);
  CHECK(text.find("0,0,4") != std::string::npos);
}

TEST_CASE("certification subcommand runs clean on a small budget") {
  auto [code, out] = cli({"certify", "--grid", "6", "--samples", "300",
                          "--seed", "12"});
  CHECK(code == 0);
  CHECK(out.find("\"certify\"") != std::string::npos);
}

TEST_CASE("error kinds map onto the documented exit codes") {
  CHECK(exit_code_for(ErrorKind::ParseError) == 2);
  CHECK(exit_code_for(ErrorKind::CriterionViolated) == 2);
  CHECK(exit_code_for(ErrorKind::UsageError) == 2);
  CHECK(exit_code_for(ErrorKind::PStarViolatedPre) == 3);
  CHECK(exit_code_for(ErrorKind::FinalEventOccurred) == 3);
  CHECK(exit_code_for(ErrorKind::Internal) == 3);
}
