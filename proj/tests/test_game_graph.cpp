#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include "autocrat/game_graph.hpp"

using namespace autocrat;

static std::string fixture(const char* name) {
  return std::string(FIXTURE_DIR) + "/" + name;
}

TEST_CASE("fix_a loads") {
  GameGraph g = load_game_file(fixture("fix_a.json"));
  CHECK(g.states.size() == 1);
  CHECK(g.lambda == doctest::Approx(0.5));
  CHECK(g.lambda_exact == Rational(1, 2));
  CHECK(g.start == 0);
  CHECK(g.states[0].utility[0][0] == 5.0);
  CHECK(validate(g).empty());
}

TEST_CASE("fix_b structure and rescaled utility") {
  GameGraph g = load_game_file(fixture("fix_b.json"));
  CHECK(g.states.size() == 2);
  int h = g.state_index("H"), l = g.state_index("L");
  CHECK(h >= 0);
  CHECK(l >= 0);
  CHECK(g.start == h);
  int x1 = g.autocrat_action_index(h, "1");
  int y1 = g.opponent_action_index(h, "1");
  CHECK(g.states[h].next[x1][y1] == h);
  CHECK(g.states[h].utility[x1][y1] == 3.0);
  // U_lambda = (1 - lambda) U
  CHECK(rescaled_utility(g, h, x1, y1) == doctest::Approx(0.3));
  CHECK(rescaled_utility_exact(g, h, x1, y1) == Rational(3, 10));
  auto b = utility_bounds(g);
  CHECK(b.lo == -1.0);
  CHECK(b.hi == 4.0);
}

TEST_CASE("children and parents") {
  GameGraph g = load_game_file(fixture("fix_c.json"));
  int s0 = g.state_index("s0"), s1 = g.state_index("s1"), s2 = g.state_index("s2");
  CHECK(children(g, s0) == std::vector<int>{s1});
  CHECK(children(g, s1) == std::vector<int>{s2});
  CHECK(parents(g, s0) == std::vector<int>{s2});
}

TEST_CASE("lambda accepted as number or exact string") {
  GameGraph a = load_game(R"({"lambda": 0.5, "start": "s", "states": {
      "s": {"autocrat_actions": ["a"], "opponent_actions": ["e"],
            "transitions": {"a,e": "s"}, "utility": {"a,e": "1/3"}}}})");
  CHECK(a.lambda_exact == Rational(1, 2));
  CHECK(a.states[0].utility_exact[0][0] == Rational(1, 3));
  GameGraph b = load_game(R"({"lambda": "3/10", "start": "s", "states": {
      "s": {"autocrat_actions": ["a"], "opponent_actions": ["e"],
            "transitions": {"a,e": "s"}, "utility": {"a,e": "-1.25"}}}})");
  CHECK(b.lambda_exact == Rational(3, 10));
  CHECK(b.states[0].utility_exact[0][0] == Rational(-5, 4));
}

TEST_CASE("schema violations are rejected") {
  // lambda outside (0,1)
  CHECK_THROWS_AS(load_game(R"({"lambda": "1", "start": "s", "states": {
      "s": {"autocrat_actions": ["a"], "opponent_actions": ["e"],
            "transitions": {"a,e": "s"}, "utility": {"a,e": 0}}}})"),
                  ValidationError);
  // missing utility cell
  CHECK_THROWS_AS(load_game(R"({"lambda": "0.5", "start": "s", "states": {
      "s": {"autocrat_actions": ["a", "b"], "opponent_actions": ["e"],
            "transitions": {"a,e": "s", "b,e": "s"}, "utility": {"a,e": 0}}}})"),
                  ValidationError);
  // dangling transition target
  CHECK_THROWS_AS(load_game(R"({"lambda": "0.5", "start": "s", "states": {
      "s": {"autocrat_actions": ["a"], "opponent_actions": ["e"],
            "transitions": {"a,e": "t"}, "utility": {"a,e": 0}}}})"),
                  ValidationError);
  // double-comma key
  CHECK_THROWS_AS(load_game(R"({"lambda": "0.5", "start": "s", "states": {
      "s": {"autocrat_actions": ["a"], "opponent_actions": ["e"],
            "transitions": {"a,e,,": "s"}, "utility": {"a,e": 0}}}})"),
                  ValidationError);
  // unknown start
  CHECK_THROWS_AS(load_game(R"({"lambda": "0.5", "start": "zz", "states": {
      "s": {"autocrat_actions": ["a"], "opponent_actions": ["e"],
            "transitions": {"a,e": "s"}, "utility": {"a,e": 0}}}})"),
                  ValidationError);
  // not JSON at all
  CHECK_THROWS_AS(load_game("not json"), ParseError);
}

TEST_CASE("round trip through json") {
  GameGraph g = load_game_file(fixture("fix_b.json"));
  GameGraph h = game_from_json(game_to_json(g));
  CHECK(h.states.size() == g.states.size());
  CHECK(h.lambda_exact == g.lambda_exact);
  for (size_t s = 0; s < g.states.size(); ++s) {
    CHECK(h.states[s].name == g.states[s].name);
    CHECK(h.states[s].next == g.states[s].next);
    CHECK(h.states[s].utility_exact == g.states[s].utility_exact);
  }
}

TEST_CASE("with_lambda replaces the discount") {
  GameGraph g = load_game_file(fixture("fix_b.json"));
  GameGraph h = with_lambda(g, Rational(9, 20));
  CHECK(h.lambda == doctest::Approx(0.45));
  CHECK(h.states[0].utility_exact == g.states[0].utility_exact);
}
