#pragma once

#include <nlohmann/json_fwd.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "autocrat/rational.hpp"

namespace autocrat {

// Immutable after construction; shared freely across threads.
//
// Actions are per-state and opaque: the same name in two states denotes two
// unrelated actions. Utilities are stored losslessly as rationals with a
// float view derived from them; U is unscaled, U_lambda is always computed.
struct GameGraph {
  struct State {
    std::string name;
    std::vector<std::string> autocrat_actions;
    std::vector<std::string> opponent_actions;
    // Indexed [x][y] over the declared action orders.
    std::vector<std::vector<int>> next;
    std::vector<std::vector<Rational>> utility_exact;
    std::vector<std::vector<double>> utility;
  };

  std::vector<State> states;
  Rational lambda_exact;
  double lambda = 0.0;
  int start = 0;

  int state_index(std::string_view name) const;
  int autocrat_action_index(int s, std::string_view name) const;
  int opponent_action_index(int s, std::string_view name) const;
  int num_autocrat_actions() const;
};

struct UtilityBounds {
  double lo = 0.0;
  double hi = 0.0;
};

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct ValidationError : std::runtime_error {
  ValidationError(const std::string& what, std::vector<std::string> v)
      : std::runtime_error(what), violations(std::move(v)) {}
  std::vector<std::string> violations;
};

// Parses the game file schema and throws ParseError / ValidationError.
GameGraph load_game(const std::string& json_text);
GameGraph load_game_file(const std::string& path);
GameGraph game_from_json(const nlohmann::json& doc);
nlohmann::json game_to_json(const GameGraph& g);

// Violations checkable on a constructed graph; empty iff all invariants hold.
std::vector<std::string> validate(const GameGraph& g);

// U_lambda(x,y;s) = (1 - lambda) * U(x,y;s).
double rescaled_utility(const GameGraph& g, int s, int x, int y);
Rational rescaled_utility_exact(const GameGraph& g, int s, int x, int y);

// Global extrema of the unscaled utility over all (a,s).
UtilityBounds utility_bounds(const GameGraph& g);

std::vector<int> children(const GameGraph& g, int s);
std::vector<int> parents(const GameGraph& g, int s);

// Copy with a different discount factor.
GameGraph with_lambda(const GameGraph& g, const Rational& lambda);

}  // namespace autocrat
