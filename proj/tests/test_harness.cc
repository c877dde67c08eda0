#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <unistd.h>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cvp/bench.h"
#include "cvp/cli.h"
#include "cvp/compile.h"
#include "cvp/generators.h"
#include "cvp/io.h"
#include "cvp/search.h"
#include "fixtures.h"

using namespace cvp;
using namespace cvp::testing;

namespace {

const std::string kDataDir = CVP_TEST_DATA_DIR;

std::string capture_stdout(const std::function<int()>& fn, int& exit_code) {
  std::ostringstream captured;
  auto* old = std::cout.rdbuf(captured.rdbuf());
  exit_code = fn();
  std::cout.rdbuf(old);
  return captured.str();
}

int run_cli(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::vector<const char*> argv{"cvplan"};
  for (const auto& a : args) argv.push_back(a.c_str());
  int code = 0;
  const std::string text =
      capture_stdout([&] { return cli_main(static_cast<int>(argv.size()), argv.data()); }, code);
  if (out) *out = text;
  return code;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("cvp_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("the shipped fixture file parses to the in-memory fixture") {
  const auto parsed = parse_problem_file(kDataDir + "/two_var.json");
  CHECK(parsed.fragment.accepted());
  CHECK(serialize_problem(parsed.problem) == serialize_problem(two_var_problem()));

  const auto stats = compile_stats(parsed.problem);
  CHECK(stats.num_actions == 1);
  CHECK(stats.num_optimistic_actions == 4);
}

TEST_CASE("problem serialization round-trips") {
  SUBCASE("fixtures") {
    for (const auto& p : {two_var_problem(), shared_action_problem(),
                          gen_counters(3, Rational(0), Rational(4), DomainKind::Discrete)}) {
      const Json doc = serialize_problem(p);
      const auto reparsed = parse_problem(doc);
      CHECK(serialize_problem(reparsed.problem) == doc);
    }
  }
  SUBCASE("random instances") {
    RandomSpec spec;
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
      const auto p = gen_random(spec, seed);
      const Json doc = serialize_problem(p);
      const auto reparsed = parse_problem(doc);
      CHECK(serialize_problem(reparsed.problem) == doc);
      CHECK(reparsed.fragment.accepted());
    }
  }
  SUBCASE("exact rationals survive") {
    auto p = two_var_problem();
    p.init.nums[0] = Rational(1, 3);
    const auto reparsed = parse_problem(serialize_problem(p));
    CHECK(reparsed.problem.init.nums[0] == Rational(1, 3));
  }
}

TEST_CASE("parse errors carry context") {
  auto doc = serialize_problem(two_var_problem());

  SUBCASE("undeclared variable in an effect") {
    doc["actions"][0]["eff_q"][0]["var"] = "zz";
    CHECK_THROWS_WITH_AS(parse_problem(doc), doctest::Contains("zz"), ParseError);
  }
  SUBCASE("undeclared control variable in an expression") {
    doc["actions"][0]["pre_q"][0]["rhs"] = Json{{"op", "var"}, {"name", "ghost"}};
    CHECK_THROWS_WITH_AS(parse_problem(doc), doctest::Contains("ghost"), ParseError);
  }
  SUBCASE("decimal literals are refused") {
    doc["init"]["nums"]["x"] = 0.5;
    CHECK_THROWS_AS(parse_problem(doc), ParseError);
  }
  SUBCASE("division is refused") {
    doc["actions"][0]["pre_q"][0]["rhs"] =
        Json{{"op", "div"}, {"args", Json::array({Json{{"op", "const"}, {"value", 1}},
                                                  Json{{"op", "const"}, {"value", 2}}})}};
    CHECK_THROWS_WITH_AS(parse_problem(doc), doctest::Contains("division"), ParseError);
  }
  SUBCASE("missing init value") {
    doc["init"]["nums"].erase("y");
    CHECK_THROWS_WITH_AS(parse_problem(doc), doctest::Contains("y"), ParseError);
  }
  SUBCASE("bad json text") {
    CHECK_THROWS_AS(parse_problem_text("{ not json"), ParseError);
  }
}

TEST_CASE("plan serialization round-trips") {
  Plan plan;
  plan.steps.push_back({"a", {{"u1", Rational(1, 2)}, {"u2", Rational(3)}}});
  plan.steps.push_back({"a", {{"u1", Rational(4)}, {"u2", Rational(5)}}});
  const Json doc = serialize_plan(plan);
  const Plan reparsed = parse_plan(doc);
  REQUIRE(reparsed.steps.size() == 2);
  CHECK(reparsed.steps[0].mu.at("u1") == Rational(1, 2));
  CHECK(serialize_plan(reparsed) == doc);
}

TEST_CASE("gen_counters") {
  SUBCASE("small instance is solvable in one step") {
    const auto p = gen_counters(2, Rational(0), Rational(4), DomainKind::Discrete);
    const auto result = brute_force_discrete(p, SearchConfig{});
    REQUIRE(result.status == SearchStatus::Solved);
    CHECK(result.plan->steps.size() == 1);
  }
  SUBCASE("zero-width domains make it unsolvable") {
    const auto p = gen_counters(2, Rational(0), Rational(0), DomainKind::Discrete);
    const auto result = brute_force_discrete(p, SearchConfig{});
    CHECK(result.status == SearchStatus::Exhausted);
  }
  SUBCASE("sizes and the compilation bound") {
    const auto p = gen_counters(8, Rational(0), Rational(4), DomainKind::Continuous);
    CHECK(p.actions.size() == 8);
    const auto stats = compile_stats(p);
    CHECK(stats.num_signature_actions <= stats.num_actions * stats.num_conditions);
  }
  SUBCASE("parameter validation") {
    CHECK_THROWS_AS(gen_counters(1, Rational(0), Rational(4), DomainKind::Discrete), ConfigInvalid);
    CHECK_THROWS_AS(gen_counters(3, Rational(4), Rational(0), DomainKind::Discrete), ConfigInvalid);
    CHECK_THROWS_AS(gen_counters(3, Rational(-2), Rational(-1), DomainKind::Discrete),
                    ConfigInvalid);
  }
}

TEST_CASE("gen_random is deterministic and in-fragment") {
  RandomSpec spec;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto a = gen_random(spec, seed);
    const auto b = gen_random(spec, seed);
    CHECK(serialize_problem(a) == serialize_problem(b));
    CHECK(check_controllable_simple(a).accepted());
    CHECK_FALSE(a.goal.nums.empty());
  }
}

TEST_CASE("run_benchmark") {
  std::vector<std::pair<std::string, ControlProblem>> suite;
  for (int n = 2; n <= 4; ++n)
    suite.emplace_back("counters-" + std::to_string(n),
                       gen_counters(n, Rational(0), Rational(4), DomainKind::Discrete));

  BenchConfig config;
  config.heuristics = {"h0", "hadd"};
  config.search.seed = 1;
  config.search.timeout = std::chrono::milliseconds(10000);

  const auto records = run_benchmark(suite, config);
  REQUIRE(records.size() == 6);

  std::ostringstream csv;
  write_csv(csv, records);
  const std::string text = csv.str();
  CHECK(text.find("instance,domain,heuristic,seed,status") == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 7);  // header + one row per run

  const auto coverage = coverage_summary(records);
  CHECK(coverage.at("hadd") == 3);
  CHECK(coverage.at("hadd") >= coverage.at("h0"));

  SUBCASE("rows are deterministic modulo wall time") {
    const auto again = run_benchmark(suite, config);
    REQUIRE(again.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
      CHECK(records[i].instance == again[i].instance);
      CHECK(records[i].heuristic == again[i].heuristic);
      CHECK(records[i].status == again[i].status);
      CHECK(records[i].expansions == again[i].expansions);
      CHECK(records[i].partial_expansions == again[i].partial_expansions);
      CHECK(records[i].plan_length == again[i].plan_length);
      CHECK(records[i].h_at_init == again[i].h_at_init);
    }
  }
  SUBCASE("parallel execution yields the same rows") {
    BenchConfig parallel = config;
    parallel.jobs = 4;
    const auto again = run_benchmark(suite, parallel);
    REQUIRE(again.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
      CHECK(records[i].instance == again[i].instance);
      CHECK(records[i].heuristic == again[i].heuristic);
      CHECK(records[i].status == again[i].status);
      CHECK(records[i].expansions == again[i].expansions);
    }
  }
  SUBCASE("a failing instance becomes an error row without aborting the suite") {
    auto broken = two_var_problem();
    broken.goal.nums.push_back(
        make_condition(lin1(0), RawOp::EQ, ControlExpr::constant(Rational(5))));
    broken.finalize();
    auto mixed = suite;
    mixed.emplace_back("broken", std::move(broken));
    const auto rows = run_benchmark(mixed, config);
    REQUIRE(rows.size() == 8);
    int errors = 0;
    for (const auto& r : rows)
      if (r.status == "error") ++errors;
    CHECK(errors == 2);  // both heuristics on the broken instance
  }
}

TEST_CASE("cli workflows") {
  TempDir dir;

  SUBCASE("gen, solve, validate") {
    const auto problem_file = dir.file("p.json");
    const auto plan_file = dir.file("plan.json");
    CHECK(run_cli({"gen", "counters", "--n", "3", "--out", problem_file}) == 0);
    CHECK(run_cli({"solve", problem_file, "--heuristic", "hadd", "--seed", "1", "--plan-out",
                   plan_file}) == 0);
    CHECK(run_cli({"validate", problem_file, plan_file}) == 0);
  }
  SUBCASE("solve reports a dead end on the fixture") {
    std::string out;
    const int code = run_cli({"solve", kDataDir + "/two_var.json", "--heuristic", "hadd"}, &out);
    CHECK(code == 1);
    CHECK(out.find("dead end at initial state") != std::string::npos);
  }
  SUBCASE("compile --stats prints the action-set sizes") {
    std::string out;
    const int code =
        run_cli({"compile", kDataDir + "/two_var.json", "--mode", "signature", "--stats"}, &out);
    CHECK(code == 0);
    CHECK(out.find("|A|=1 |A_Sigma|=1 |A_O|=4") != std::string::npos);
  }
  SUBCASE("validate rejects a broken plan") {
    const auto plan_file = dir.file("bad_plan.json");
    {
      std::ofstream f(plan_file);
      f << R"({"steps": [{"action": "a", "mu": {"u1": 1, "u2": 3}}]})";
    }
    CHECK(run_cli({"validate", kDataDir + "/two_var.json", plan_file}) == 1);
  }
  SUBCASE("usage errors exit with 2") {
    CHECK(run_cli({"frobnicate"}) == 2);
    CHECK(run_cli({"solve"}) == 2);
    CHECK(run_cli({"gen", "unknown-domain"}) == 2);
  }
  SUBCASE("parse errors exit with 2") {
    const auto bad = dir.file("bad.json");
    {
      std::ofstream f(bad);
      f << "{\"state_vars\": 3}";
    }
    CHECK(run_cli({"solve", bad}) == 2);
  }
  SUBCASE("bench emits a csv") {
    const auto suite_dir = dir.file("suite");
    std::filesystem::create_directories(suite_dir);
    for (int n = 2; n <= 3; ++n)
      run_cli({"gen", "counters", "--n", std::to_string(n), "--out",
               suite_dir + "/c" + std::to_string(n) + ".json"});
    const auto csv_file = dir.file("bench.csv");
    std::string out;
    const int code = run_cli({"bench", suite_dir, "--heuristics", "hadd,h0", "--csv-out", csv_file,
                              "--timeout", "10"},
                             &out);
    CHECK(code == 0);
    CHECK(out.find("coverage:") != std::string::npos);
    std::ifstream csv(csv_file);
    std::string header;
    std::getline(csv, header);
    CHECK(header ==
          "instance,domain,heuristic,seed,status,wall_time_ms,expansions,partial_expansions,"
          "plan_length,h_at_init,actions,signature_actions,optimistic_actions");
    int rows = 0;
    for (std::string line; std::getline(csv, line);) ++rows;
    CHECK(rows == 4);
  }
}
