#pragma once

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <stdexcept>
#include <vector>

#include "autocrat/game_graph.hpp"
#include "autocrat/solver.hpp"

namespace autocrat {

enum class Side { Left, Right };

// Functional graph over surviving states: for Left, each state follows
// (x_minus, y_plus(x_minus)); for Right, (x_plus, y_minus(x_plus)). Every
// component contains exactly one cycle.
struct SuccessorGraph {
  Side side;
  std::vector<int> action;  // -1 for pruned states
  std::vector<int> reply;
  std::vector<int> next;
};

struct ExactBounds {
  Side side;
  std::vector<std::optional<Rational>> value;  // per state; nullopt if pruned
  std::vector<char> certified;
};

struct TieAmbiguity : std::runtime_error {
  TieAmbiguity(const std::string& what, int s) : std::runtime_error(what), state(s) {}
  int state;
};

SuccessorGraph successor_graph(const GameGraph& g, const SolveReport& rep, Side side);

// sum_{i<n} lambda^i U_i / sum_{i<n} lambda^i, exactly.
Rational cycle_value(const std::vector<Rational>& cycle_utilities, const Rational& lambda);

// (1-lambda) sum_{i<n} lambda^i U_i + lambda^n * anchor, exactly.
Rational branch_value(const std::vector<Rational>& branch_utilities, const Rational& lambda,
                      const Rational& anchor);

// Recovers exact endpoint values from the converged report via the cycle and
// branch formulas, then certifies each state against the exact fixed-point
// equation. A failed certificate triggers one re-solve at tol/100 before
// raising TieAmbiguity.
ExactBounds refine_exact(const GameGraph& g, const SolveReport& rep, Side side);

nlohmann::json exact_to_json(const GameGraph& g, const ExactBounds& left,
                             const ExactBounds& right);

}  // namespace autocrat
