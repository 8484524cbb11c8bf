#include "autocrat/solver.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace autocrat {

namespace {

// max_y { lambda * m_T + U_lambda } for a fixed x.
double left_objective(const GameGraph& g, const Bounds& b, int s, int x) {
  const auto& st = g.states[s];
  double best = -std::numeric_limits<double>::infinity();
  for (size_t y = 0; y < st.opponent_actions.size(); ++y)
    best = std::max(best, g.lambda * b.m[st.next[x][y]] + rescaled_utility(g, s, x, y));
  return best;
}

// min_y { lambda * M_T + U_lambda } for a fixed x.
double right_objective(const GameGraph& g, const Bounds& b, int s, int x) {
  const auto& st = g.states[s];
  double best = std::numeric_limits<double>::infinity();
  for (size_t y = 0; y < st.opponent_actions.size(); ++y)
    best = std::min(best, g.lambda * b.M[st.next[x][y]] + rescaled_utility(g, s, x, y));
  return best;
}

int representative(const std::vector<int>& tied) { return tied.empty() ? -1 : tied.front(); }

// Longest directed path (in states) through the cornered set. A cycle is
// reported as its length with the diagnostic flag raised.
void cornered_chain(const GameGraph& g, const Support& supp, const std::vector<char>& cornered,
                    int* longest, bool* has_cycle) {
  const int n = static_cast<int>(g.states.size());
  std::vector<std::vector<int>> adj(n);
  for (int s = 0; s < n; ++s) {
    if (!cornered[s]) continue;
    int x = supp.actions[s].front();
    for (size_t y = 0; y < g.states[s].opponent_actions.size(); ++y) {
      int t = g.states[s].next[x][y];
      if (cornered[t] && std::find(adj[s].begin(), adj[s].end(), t) == adj[s].end())
        adj[s].push_back(t);
    }
  }
  *longest = 0;
  *has_cycle = false;
  std::vector<int> memo(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<char> in_cycle(n, 0);

  // Iterative DFS would be overkill at this scale; recursion depth <= |S|.
  struct Dfs {
    const std::vector<std::vector<int>>& adj;
    std::vector<int>& memo;
    std::vector<char>& on_stack;
    bool* has_cycle;
    int run(int s) {
      if (memo[s] >= 0) return memo[s];
      if (on_stack[s]) {
        *has_cycle = true;
        return 0;
      }
      on_stack[s] = 1;
      int best = 0;
      for (int t : adj[s]) best = std::max(best, run(t));
      on_stack[s] = 0;
      return memo[s] = best + 1;
    }
  } dfs{adj, memo, on_stack, has_cycle};

  for (int s = 0; s < n; ++s)
    if (cornered[s]) *longest = std::max(*longest, dfs.run(s));

  if (*has_cycle) {
    // Report the longest cornered cycle length.
    for (int s = 0; s < n; ++s) {
      if (!cornered[s]) continue;
      std::vector<int> dist(n, -1);
      dist[s] = 0;
      std::vector<int> queue{s};
      for (size_t i = 0; i < queue.size(); ++i)
        for (int t : adj[queue[i]]) {
          if (t == s) *longest = std::max(*longest, dist[queue[i]] + 1);
          if (dist[t] < 0) {
            dist[t] = dist[queue[i]] + 1;
            queue.push_back(t);
          }
        }
    }
  }
}

}  // namespace

Support Support::full(const GameGraph& g) {
  Support s;
  s.actions.resize(g.states.size());
  for (size_t i = 0; i < g.states.size(); ++i)
    for (size_t x = 0; x < g.states[i].autocrat_actions.size(); ++x)
      s.actions[i].push_back(static_cast<int>(x));
  return s;
}

bool Support::empty() const {
  for (const auto& a : actions)
    if (!a.empty()) return false;
  return true;
}

int iteration_bound(double tol, double lambda, const UtilityBounds& bounds) {
  const double range = bounds.hi - bounds.lo;
  if (tol >= range) return 1;
  return static_cast<int>(std::ceil(std::log(tol / range) / std::log(lambda)));
}

std::pair<Bounds, IterationTrace> iterate_bounds(const GameGraph& g, const Support& supp,
                                                 InitMode init, double tol, int max_iter,
                                                 bool record_snapshots) {
  const auto ub = utility_bounds(g);
  const int n = static_cast<int>(g.states.size());
  const int analytic = iteration_bound(tol, g.lambda, ub);

  Bounds b;
  b.m.assign(n, init == InitMode::Standard ? ub.lo : ub.hi);
  b.M.assign(n, init == InitMode::Standard ? ub.hi : ub.lo);

  IterationTrace trace;
  bool converged = false;
  for (int it = 1; it <= max_iter; ++it) {
    Bounds next = b;
    double delta = 0.0;
    for (int s = 0; s < n; ++s) {
      if (!supp.alive(s)) continue;
      double m_best = std::numeric_limits<double>::infinity();
      double M_best = -std::numeric_limits<double>::infinity();
      for (int x : supp.actions[s]) {
        m_best = std::min(m_best, left_objective(g, b, s, x));
        M_best = std::max(M_best, right_objective(g, b, s, x));
      }
      next.m[s] = m_best;
      next.M[s] = M_best;
      delta = std::max(delta, std::abs(next.m[s] - b.m[s]));
      delta = std::max(delta, std::abs(next.M[s] - b.M[s]));
    }
    b = std::move(next);
    trace.iterations = it;
    trace.deltas.push_back(delta);
    if (record_snapshots) trace.snapshots.push_back(b);
    if (delta < tol * (1.0 - g.lambda) || it >= analytic) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw NonConvergence("iterate_bounds: residual above threshold after " +
                         std::to_string(max_iter) + " iterations");
  return {std::move(b), std::move(trace)};
}

std::pair<std::vector<int>, std::vector<int>> extremal_actions(const GameGraph& g,
                                                               const Support& supp,
                                                               const Bounds& b, int s,
                                                               double tie_eps) {
  std::vector<int> x_minus, x_plus;
  double best_left = std::numeric_limits<double>::infinity();
  double best_right = -std::numeric_limits<double>::infinity();
  for (int x : supp.actions[s]) {
    best_left = std::min(best_left, left_objective(g, b, s, x));
    best_right = std::max(best_right, right_objective(g, b, s, x));
  }
  for (int x : supp.actions[s]) {
    if (left_objective(g, b, s, x) <= best_left + tie_eps) x_minus.push_back(x);
    if (right_objective(g, b, s, x) >= best_right - tie_eps) x_plus.push_back(x);
  }
  return {x_minus, x_plus};
}

std::pair<int, int> unenforcing_replies(const GameGraph& g, const Bounds& b, int s, int x) {
  const auto& st = g.states[s];
  int y_plus = 0, y_minus = 0;
  double best_plus = -std::numeric_limits<double>::infinity();
  double best_minus = std::numeric_limits<double>::infinity();
  for (size_t y = 0; y < st.opponent_actions.size(); ++y) {
    double left = g.lambda * b.m[st.next[x][y]] + rescaled_utility(g, s, x, y);
    double right = g.lambda * b.M[st.next[x][y]] + rescaled_utility(g, s, x, y);
    if (left > best_plus) {
      best_plus = left;
      y_plus = static_cast<int>(y);
    }
    if (right < best_minus) {
      best_minus = right;
      y_minus = static_cast<int>(y);
    }
  }
  return {y_plus, y_minus};
}

bool check_inequality(const GameGraph& g, const Bounds& b, int s, int x, double eps) {
  return left_objective(g, b, s, x) <= right_objective(g, b, s, x) + eps;
}

Support prune(const GameGraph& g, Support supp, const std::vector<std::pair<int, int>>& offending,
              std::vector<PrunedAction>* removed, int outer_round) {
  auto drop = [&](int s, int x) {
    auto& acts = supp.actions[s];
    auto it = std::find(acts.begin(), acts.end(), x);
    if (it == acts.end()) return;
    acts.erase(it);
    if (removed) removed->push_back({s, x, outer_round});
  };

  for (auto [s, x] : offending) drop(s, x);

  // Alternate dead-state removal with removal of parent actions that have
  // any transition into a dead state, until stable.
  const int n = static_cast<int>(g.states.size());
  bool changed = true;
  while (changed) {
    changed = false;
    for (int s = 0; s < n; ++s) {
      if (!supp.alive(s)) continue;
      auto acts = supp.actions[s];  // copy; drop() mutates
      for (int x : acts) {
        bool dangling = false;
        for (size_t y = 0; y < g.states[s].opponent_actions.size(); ++y)
          if (!supp.alive(g.states[s].next[x][y])) dangling = true;
        if (dangling) {
          drop(s, x);
          changed = true;
        }
      }
    }
  }
  return supp;
}

SolveReport solve(const GameGraph& g, double tol, int max_outer, bool record_snapshots) {
  if (max_outer < 0) max_outer = g.num_autocrat_actions() + 1;
  const int n = static_cast<int>(g.states.size());
  const double tie_eps = 8.0 * tol;
  const auto ub = utility_bounds(g);
  const int max_iter = std::max(64, 2 * iteration_bound(tol, g.lambda, ub) + 16);

  SolveReport rep;
  rep.tol = tol;
  rep.support = Support::full(g);

  for (int round = 0;; ++round) {
    if (round > max_outer) throw NonConvergence("solve: outer round limit exceeded");
    if (rep.support.empty()) {
      rep.status = SolveStatus::Empty;
      break;
    }
    auto [bounds, trace] = iterate_bounds(g, rep.support, InitMode::Standard, tol, max_iter,
                                          record_snapshots);
    rep.traces.push_back(std::move(trace));
    rep.bounds = std::move(bounds);

    std::vector<std::pair<int, int>> offending;
    rep.x_minus.assign(n, {});
    rep.x_plus.assign(n, {});
    for (int s = 0; s < n; ++s) {
      if (!rep.support.alive(s)) continue;
      auto [xm, xp] = extremal_actions(g, rep.support, rep.bounds, s, tie_eps);
      rep.x_minus[s] = xm;
      rep.x_plus[s] = xp;
      std::vector<int> candidates = xm;
      for (int x : xp)
        if (std::find(candidates.begin(), candidates.end(), x) == candidates.end())
          candidates.push_back(x);
      for (int x : candidates)
        if (!check_inequality(g, rep.bounds, s, x, tie_eps)) offending.push_back({s, x});
    }
    if (offending.empty()) {
      rep.status = SolveStatus::Solved;
      break;
    }
    rep.support = prune(g, std::move(rep.support), offending, &rep.pruned_actions, round);
  }

  rep.y_plus.assign(n, {});
  rep.y_minus.assign(n, {});
  rep.cornered.assign(n, 0);
  if (rep.status == SolveStatus::Solved) {
    for (int s = 0; s < n; ++s) {
      if (!rep.support.alive(s)) continue;
      const auto& st = g.states[s];
      rep.y_plus[s].assign(st.autocrat_actions.size(), -1);
      rep.y_minus[s].assign(st.autocrat_actions.size(), -1);
      for (int x : rep.support.actions[s]) {
        auto [yp, ym] = unenforcing_replies(g, rep.bounds, s, x);
        rep.y_plus[s][x] = yp;
        rep.y_minus[s][x] = ym;
      }
      rep.cornered[s] = rep.support.actions[s].size() == 1 &&
                        representative(rep.x_minus[s]) == representative(rep.x_plus[s]);
    }
    cornered_chain(g, rep.support, rep.cornered, &rep.longest_cornered_chain,
                   &rep.cornered_cycle);
    rep.start_pruned = !rep.support.alive(g.start);
  } else {
    rep.start_pruned = true;
  }
  return rep;
}

ValueClass classify_value(const SolveReport& rep, int s, double v) {
  if (rep.status != SolveStatus::Solved || !rep.support.alive(s))
    throw std::runtime_error("no enforceable values in state");
  if (v < rep.bounds.m[s] - rep.tol) return ValueClass::LeftUnenforceable;
  if (v > rep.bounds.M[s] + rep.tol) return ValueClass::RightUnenforceable;
  return ValueClass::Enforceable;
}

std::vector<SolveReport> sweep_lambda(const GameGraph& g, const std::vector<Rational>& grid,
                                      double tol) {
  std::vector<SolveReport> out;
  out.reserve(grid.size());
  for (const auto& lam : grid) out.push_back(solve(with_lambda(g, lam), tol));
  return out;
}

nlohmann::json report_to_json(const GameGraph& g, const SolveReport& rep, bool include_trace) {
  nlohmann::json doc;
  doc["status"] = rep.status == SolveStatus::Solved ? "Solved" : "Empty";
  doc["L"] = rep.longest_cornered_chain;
  if (rep.cornered_cycle) doc["cornered_cycle"] = true;
  if (rep.start_pruned) doc["start_pruned"] = true;
  nlohmann::json states = nlohmann::json::object();
  for (size_t s = 0; s < g.states.size(); ++s) {
    if (rep.status != SolveStatus::Solved || !rep.support.alive(static_cast<int>(s))) continue;
    nlohmann::json body;
    body["m"] = rep.bounds.m[s];
    body["M"] = rep.bounds.M[s];
    auto names = [&](const std::vector<int>& xs) {
      std::vector<std::string> out;
      for (int x : xs) out.push_back(g.states[s].autocrat_actions[x]);
      return out;
    };
    body["x_minus"] = names(rep.x_minus[s]);
    body["x_plus"] = names(rep.x_plus[s]);
    body["cornered"] = static_cast<bool>(rep.cornered[s]);
    states[g.states[s].name] = body;
  }
  doc["states"] = states;
  nlohmann::json pruned = nlohmann::json::array();
  for (const auto& p : rep.pruned_actions)
    pruned.push_back({g.states[p.state].name, g.states[p.state].autocrat_actions[p.action],
                      p.outer_round});
  doc["pruned_actions"] = pruned;
  if (include_trace) {
    nlohmann::json traces = nlohmann::json::array();
    for (const auto& t : rep.traces) {
      nlohmann::json tr;
      tr["iterations"] = t.iterations;
      tr["deltas"] = t.deltas;
      traces.push_back(tr);
    }
    doc["trace"] = traces;
  }
  return doc;
}

}  // namespace autocrat
