#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

using nlohmann::json;

static std::string fixture(const char* name) {
  return std::string(FIXTURE_DIR) + "/" + name;
}

static int run(const std::string& args, const std::string& out_file = "/dev/null") {
  std::string cmd = std::string(CLI_PATH) + " " + args + " > " + out_file + " 2>/dev/null";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

static json run_json(const std::string& args) {
  std::string path = std::string("/tmp/autocrat_cli_test_") + std::to_string(getpid()) + ".json";
  REQUIRE(run(args + " --format json", path) == 0);
  std::ifstream in(path);
  json doc = json::parse(in);
  std::remove(path.c_str());
  return doc;
}

TEST_CASE("validate exit codes") {
  CHECK(run("validate " + fixture("fix_a.json")) == 0);
  CHECK(run("validate " + fixture("fix_b.json")) == 0);
  std::string bad = "/tmp/autocrat_bad_game.json";
  std::ofstream(bad) << "{ not json";
  CHECK(run("validate " + bad) == 2);
  std::ofstream(bad) << R"({"lambda": "2", "start": "s", "states": {
      "s": {"autocrat_actions": ["a"], "opponent_actions": ["e"],
            "transitions": {"a,e": "s"}, "utility": {"a,e": 0}}}})";
  CHECK(run("validate " + bad) == 2);
  std::remove(bad.c_str());
  CHECK(run("validate /tmp/definitely_missing.json") == 2);
}

TEST_CASE("solve json output") {
  json doc = run_json("solve " + fixture("fix_b.json"));
  CHECK(doc["status"] == "Solved");
  CHECK(std::abs(doc["states"]["L"]["m"].get<double>()) < 1e-6);
  CHECK(doc["states"]["L"]["M"].get<double>() == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(doc["states"]["H"]["M"].get<double>() == doctest::Approx(2.2).epsilon(1e-6));

  json exact = run_json("solve --exact " + fixture("fix_b.json"));
  CHECK(exact["exact"]["H"]["M"] == "11/5");
  CHECK(exact["exact"]["H"]["M_certified"] == true);

  json chain = run_json("solve " + fixture("fix_c.json"));
  CHECK(chain["L"] == 2);
  CHECK(chain["states"]["s1"]["cornered"] == true);
  CHECK(chain["states"]["s2"]["cornered"] == true);
  CHECK(chain["states"]["s0"]["cornered"] == false);
}

TEST_CASE("solve lambda override and strict mode") {
  json doc = run_json("solve --lambda 0.45 " + fixture("fix_b.json"));
  CHECK(doc["states"]["L"]["M"].get<double>() == doctest::Approx(1.9).epsilon(1e-6));
  CHECK(doc["states"]["H"]["M"].get<double>() == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(run("solve --lambda 0.2 " + fixture("fix_b.json")) == 0);
  CHECK(run("solve --lambda 0.2 --strict " + fixture("fix_b.json")) == 3);
  CHECK(run("solve --lambda 1.5 " + fixture("fix_b.json")) == 2);
  json swapped = run_json("solve --init swapped " + fixture("fix_b.json"));
  CHECK(swapped["states"]["H"]["M"].get<double>() == doctest::Approx(2.2).epsilon(1e-6));
}

TEST_CASE("synthesize exit codes and spec file") {
  std::string spec = "/tmp/autocrat_cli_spec.json";
  CHECK(run("synthesize --start H --value 1.1 -o " + spec + " " + fixture("fix_b.json")) == 0);
  std::ifstream in(spec);
  json doc = json::parse(in);
  CHECK(doc["format"] == "autocrat-strategy/1");
  CHECK(doc["v0"] == 1.1);
  CHECK(run("synthesize --start H --value 9 " + fixture("fix_b.json")) == 4);
  CHECK(run("synthesize --start s --value 5 " + fixture("fix_a.json")) == 0);

  SUBCASE("simulate and verify consume the spec") {
    CHECK(run("simulate --episodes 2000 --seed 7 " + fixture("fix_b.json") + " " + spec) == 0);
    CHECK(run("verify --episodes 20000 --seed 7 " + fixture("fix_b.json") + " " + spec) == 0);
    // Corrupt the interval: verification must fail with exit 5.
    doc["states"]["L"]["M"] = doc["states"]["L"]["M"].get<double>() + 0.5;
    std::ofstream(spec) << doc.dump();
    CHECK(run("verify --episodes 20000 --seed 7 " + fixture("fix_b.json") + " " + spec) == 5);
  }
  std::remove(spec.c_str());
}

TEST_CASE("sweep") {
  std::string path = "/tmp/autocrat_cli_sweep.json";
  REQUIRE(run("sweep --lambdas 0.40:0.95:0.05 --format json " + fixture("fix_b.json"), path) ==
          0);
  std::ifstream in(path);
  json doc = json::parse(in);
  REQUIRE(doc.size() == 12);
  CHECK(doc[0]["lambda"] == "2/5");
  CHECK(doc[0]["report"]["states"]["L"]["M"].get<double>() == doctest::Approx(1.8).epsilon(1e-6));
  CHECK(doc[2]["report"]["states"]["L"]["M"].get<double>() == doctest::Approx(2.0).epsilon(1e-6));
  std::remove(path.c_str());
  // Grid entries must stay inside (0,1).
  CHECK(run("sweep --lambdas 0:0.5:0.1 " + fixture("fix_b.json")) != 0);
}
