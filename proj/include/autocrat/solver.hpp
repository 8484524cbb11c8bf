#pragma once

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "autocrat/game_graph.hpp"

namespace autocrat {

// Per-state retained autocrat actions; an empty list means the state is
// pruned away.
struct Support {
  std::vector<std::vector<int>> actions;

  static Support full(const GameGraph& g);
  bool alive(int s) const { return !actions[s].empty(); }
  bool empty() const;
};

// Per-state interval endpoints. Entries of pruned states are meaningless.
struct Bounds {
  std::vector<double> m;
  std::vector<double> M;
};

struct IterationTrace {
  std::vector<Bounds> snapshots;  // snapshot n is the state after iteration n
  std::vector<double> deltas;     // sup-norm change per iteration
  int iterations = 0;
};

enum class InitMode { Standard, Swapped };

enum class SolveStatus { Solved, Empty };

enum class ValueClass { Enforceable, LeftUnenforceable, RightUnenforceable };

struct PrunedAction {
  int state;
  int action;
  int outer_round;
};

struct SolveReport {
  SolveStatus status = SolveStatus::Empty;
  Support support;
  Bounds bounds;
  // Tied argmin/argmax sets per surviving state (empty for pruned states).
  std::vector<std::vector<int>> x_minus;
  std::vector<std::vector<int>> x_plus;
  // Unenforcing replies indexed [s][x] over the full declared action grid;
  // -1 where x is not in the final support.
  std::vector<std::vector<int>> y_plus;
  std::vector<std::vector<int>> y_minus;
  std::vector<char> cornered;
  int longest_cornered_chain = 0;  // L, in states
  bool cornered_cycle = false;
  std::vector<PrunedAction> pruned_actions;
  std::vector<IterationTrace> traces;  // one per outer round
  bool start_pruned = false;
  double tol = 1e-9;
};

struct NonConvergence : std::runtime_error {
  explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

// Upper bound on iterations needed to reach sup-norm error tol:
// ceil(ln(tol/(M0-m0)) / ln(lambda)), or 1 when tol already covers the range.
int iteration_bound(double tol, double lambda, const UtilityBounds& bounds);

// Jacobi sweep of the m/M recursions on the given support. Standard
// initialization starts at (m0, M0); swapped starts at (M0, m0). Stops when
// the sup-norm delta falls below tol*(1-lambda) or the analytic iteration
// bound is reached, either of which pins the fixed-point residual under
// tol/(1-lambda).
std::pair<Bounds, IterationTrace> iterate_bounds(const GameGraph& g, const Support& supp,
                                                 InitMode init, double tol, int max_iter,
                                                 bool record_snapshots = true);

// Tied extremal-action sets (x_minus candidates, x_plus candidates) within
// tie_eps of the optimum.
std::pair<std::vector<int>, std::vector<int>> extremal_actions(const GameGraph& g,
                                                               const Support& supp,
                                                               const Bounds& b, int s,
                                                               double tie_eps);

// (y_plus, y_minus) for action x in state s; ties break to the first
// declared opponent action.
std::pair<int, int> unenforcing_replies(const GameGraph& g, const Bounds& b, int s, int x);

// max_y{lambda m + U_lambda} <= min_y{lambda M + U_lambda} + eps.
bool check_inequality(const GameGraph& g, const Bounds& b, int s, int x, double eps);

// Removes the offending (s,x) pairs, then alternates dead-state removal and
// dangling-action removal until stable. Records removals when `removed` is
// provided.
Support prune(const GameGraph& g, Support supp, const std::vector<std::pair<int, int>>& offending,
              std::vector<PrunedAction>* removed = nullptr, int outer_round = 0);

// Algorithm: alternate the iterative process and inequality-driven pruning
// until every surviving extremal action passes, or the graph empties.
SolveReport solve(const GameGraph& g, double tol = 1e-9, int max_outer = -1,
                  bool record_snapshots = false);

ValueClass classify_value(const SolveReport& rep, int s, double v);

std::vector<SolveReport> sweep_lambda(const GameGraph& g, const std::vector<Rational>& grid,
                                      double tol = 1e-9);

nlohmann::json report_to_json(const GameGraph& g, const SolveReport& rep,
                              bool include_trace = false);

}  // namespace autocrat
