#include "autocrat/exact.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace autocrat {

namespace {

// Exact value vector from the successor graph's cycles and inbound trees.
std::vector<std::optional<Rational>> recover(const GameGraph& g, const SuccessorGraph& sg) {
  const int n = static_cast<int>(g.states.size());
  const Rational& lam = g.lambda_exact;
  std::vector<std::optional<Rational>> value(n);

  // Pointer-chasing with visitation stamps; each state visited once.
  std::vector<int> stamp(n, -1);
  for (int root = 0; root < n; ++root) {
    if (sg.next[root] < 0 || value[root]) continue;
    std::vector<int> path;
    int cur = root;
    while (cur >= 0 && stamp[cur] < 0 && !value[cur]) {
      stamp[cur] = root;
      path.push_back(cur);
      cur = sg.next[cur];
    }
    if (cur >= 0 && !value[cur] && stamp[cur] == root) {
      // Found a fresh cycle starting at cur; value each cycle state by the
      // rotated cycle formula.
      std::vector<int> cycle;
      auto it = std::find(path.begin(), path.end(), cur);
      cycle.assign(it, path.end());
      const int len = static_cast<int>(cycle.size());
      for (int i = 0; i < len; ++i) {
        std::vector<Rational> utils;
        for (int k = 0; k < len; ++k) {
          int s = cycle[(i + k) % len];
          utils.push_back(g.states[s].utility_exact[sg.action[s]][sg.reply[s]]);
        }
        value[cycle[i]] = cycle_value(utils, lam);
      }
    }
    // Walk the path backwards from the first valued state, one branch step
    // at a time.
    for (auto rit = path.rbegin(); rit != path.rend(); ++rit) {
      int s = *rit;
      if (value[s]) continue;
      int t = sg.next[s];
      value[s] = branch_value({g.states[s].utility_exact[sg.action[s]][sg.reply[s]]}, lam,
                              *value[t]);
    }
  }
  return value;
}

// Exact fixed-point residual check: for Left, v_s must equal
// min_x max_y { lambda v_T + U_lambda }; for Right, max_x min_y.
bool certify_state(const GameGraph& g, const SolveReport& rep, Side side,
                   const std::vector<std::optional<Rational>>& value, int s) {
  const Rational& lam = g.lambda_exact;
  const Rational one_minus = Rational(1) - lam;
  std::optional<Rational> outer;
  for (int x : rep.support.actions[s]) {
    std::optional<Rational> inner;
    for (size_t y = 0; y < g.states[s].opponent_actions.size(); ++y) {
      int t = g.states[s].next[x][y];
      Rational obj = lam * *value[t] + one_minus * g.states[s].utility_exact[x][y];
      if (!inner)
        inner = obj;
      else if (side == Side::Left)
        inner = std::max(*inner, obj);
      else
        inner = std::min(*inner, obj);
    }
    if (!outer)
      outer = inner;
    else if (side == Side::Left)
      outer = std::min(*outer, *inner);
    else
      outer = std::max(*outer, *inner);
  }
  return outer && *outer == *value[s];
}

ExactBounds refine_once(const GameGraph& g, const SolveReport& rep, Side side, int* bad_state) {
  auto sg = successor_graph(g, rep, side);
  ExactBounds out;
  out.side = side;
  out.value = recover(g, sg);
  out.certified.assign(g.states.size(), 0);
  *bad_state = -1;
  for (size_t s = 0; s < g.states.size(); ++s) {
    if (!out.value[s]) continue;
    out.certified[s] = certify_state(g, rep, side, out.value, static_cast<int>(s));
    if (!out.certified[s] && *bad_state < 0) *bad_state = static_cast<int>(s);
  }
  return out;
}

}  // namespace

SuccessorGraph successor_graph(const GameGraph& g, const SolveReport& rep, Side side) {
  if (rep.status != SolveStatus::Solved)
    throw std::runtime_error("successor_graph requires a Solved report");
  const int n = static_cast<int>(g.states.size());
  SuccessorGraph sg;
  sg.side = side;
  sg.action.assign(n, -1);
  sg.reply.assign(n, -1);
  sg.next.assign(n, -1);
  for (int s = 0; s < n; ++s) {
    if (!rep.support.alive(s)) continue;
    int x = side == Side::Left ? rep.x_minus[s].front() : rep.x_plus[s].front();
    int y = side == Side::Left ? rep.y_plus[s][x] : rep.y_minus[s][x];
    sg.action[s] = x;
    sg.reply[s] = y;
    sg.next[s] = g.states[s].next[x][y];
  }
  return sg;
}

Rational cycle_value(const std::vector<Rational>& cycle_utilities, const Rational& lambda) {
  if (cycle_utilities.empty()) throw std::invalid_argument("empty cycle");
  Rational num(0), den(0), pow(1);
  for (const auto& u : cycle_utilities) {
    num += pow * u;
    den += pow;
    pow *= lambda;
  }
  return num / den;
}

Rational branch_value(const std::vector<Rational>& branch_utilities, const Rational& lambda,
                      const Rational& anchor) {
  Rational sum(0), pow(1);
  for (const auto& u : branch_utilities) {
    sum += pow * u;
    pow *= lambda;
  }
  return (Rational(1) - lambda) * sum + pow * anchor;
}

ExactBounds refine_exact(const GameGraph& g, const SolveReport& rep, Side side) {
  int bad = -1;
  ExactBounds out = refine_once(g, rep, side, &bad);
  if (bad >= 0) {
    // Most near-ties are floating-point artifacts; one sharper solve usually
    // resolves the argext.
    SolveReport finer = solve(g, rep.tol / 100.0);
    out = refine_once(g, finer, side, &bad);
    if (bad >= 0)
      throw TieAmbiguity("exact certification failed in state '" + g.states[bad].name + "'", bad);
  }

  // |exact - approximate| <= tol/(1-lambda) statewise.
  for (size_t s = 0; s < g.states.size(); ++s) {
    if (!out.value[s]) continue;
    double approx = side == Side::Left ? rep.bounds.m[s] : rep.bounds.M[s];
    double diff = std::abs(out.value[s]->get_d() - approx);
    if (diff > rep.tol / (1.0 - g.lambda) + 1e-12)
      throw TieAmbiguity("exact value drifted from approximate solution in state '" +
                             g.states[s].name + "'",
                         static_cast<int>(s));
  }
  return out;
}

nlohmann::json exact_to_json(const GameGraph& g, const ExactBounds& left,
                             const ExactBounds& right) {
  nlohmann::json doc = nlohmann::json::object();
  for (size_t s = 0; s < g.states.size(); ++s) {
    if (!left.value[s] && !right.value[s]) continue;
    nlohmann::json body;
    if (left.value[s]) {
      body["m"] = to_string(*left.value[s]);
      body["m_certified"] = static_cast<bool>(left.certified[s]);
    }
    if (right.value[s]) {
      body["M"] = to_string(*right.value[s]);
      body["M_certified"] = static_cast<bool>(right.certified[s]);
    }
    doc[g.states[s].name] = body;
  }
  return doc;
}

}  // namespace autocrat
