#pragma once

#include <nlohmann/json_fwd.hpp>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "autocrat/game_graph.hpp"
#include "autocrat/solver.hpp"

namespace autocrat {

// Serializable autocratic strategy: per-state interval endpoints and
// extremal actions, plus the initial target. The controller built from it
// tracks (state, target) as a sufficient statistic for the play history.
struct StrategySpec {
  struct PerState {
    bool alive = false;
    double m = 0.0;
    double M = 0.0;
    int x_minus = -1;
    int x_plus = -1;
    bool cornered = false;
  };
  double lambda = 0.0;
  int start = 0;
  double v0 = 0.0;
  double drift_tol = 0.0;
  std::vector<PerState> states;  // aligned with GameGraph state indices
};

// Mix over the two extremal actions; x_plus == x_minus collapses to one atom.
struct ActionDistribution {
  int x_minus = -1;
  int x_plus = -1;
  double p_plus = 0.0;
};

struct ValueOutOfRange : std::runtime_error {
  explicit ValueOutOfRange(const std::string& what) : std::runtime_error(what) {}
};
struct PrunedStart : std::runtime_error {
  explicit PrunedStart(const std::string& what) : std::runtime_error(what) {}
};
struct TargetDrift : std::runtime_error {
  explicit TargetDrift(const std::string& what) : std::runtime_error(what) {}
};

StrategySpec synthesize(const SolveReport& rep, const GameGraph& g, int s0, double v);

// Value-tracking finite controller implementing the one-step recursion.
class Controller {
 public:
  Controller(const GameGraph& g, const StrategySpec& spec);
  // Resumes from an arbitrary (state, target) point, e.g. when replaying or
  // enumerating playouts.
  Controller(const GameGraph& g, const StrategySpec& spec, int state, double v);

  // p(x_plus) = (v - m_s)/(M_s - m_s); a single atom when cornered or
  // degenerate. Never depends on the opponent's current action.
  ActionDistribution act() const;

  // Advances past one round: Phi is M_s after x_plus, m_s after x_minus,
  // and the carried target when the extremal actions coincide; then
  // v' = (Phi - U_lambda)/lambda, clamped into the successor interval
  // within the drift tolerance.
  void update(int played_x, int observed_y);

  int state() const { return state_; }
  double target() const { return v_; }
  long clamps() const { return clamps_; }

 private:
  const GameGraph* g_;
  const StrategySpec* spec_;
  int state_;
  double v_;
  long clamps_ = 0;
};

// (cornered set, L). L counts states along the longest directed path of
// cornered states; a cornered cycle reports its length with a diagnostic.
std::pair<std::vector<int>, int> cornered_states(const SolveReport& rep);

// L + 1.
int memory_requirement(const SolveReport& rep);

nlohmann::json spec_to_json(const GameGraph& g, const StrategySpec& spec);
StrategySpec spec_from_json(const GameGraph& g, const nlohmann::json& doc);

}  // namespace autocrat
