#include "autocrat/strategy.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace autocrat {

StrategySpec synthesize(const SolveReport& rep, const GameGraph& g, int s0, double v) {
  if (rep.status != SolveStatus::Solved) throw PrunedStart("game has no enforceable values");
  if (!rep.support.alive(s0))
    throw PrunedStart("start state '" + g.states[s0].name + "' was pruned");
  if (classify_value(rep, s0, v) != ValueClass::Enforceable)
    throw ValueOutOfRange("target " + std::to_string(v) + " outside [" +
                          std::to_string(rep.bounds.m[s0]) + ", " +
                          std::to_string(rep.bounds.M[s0]) + "]");
  StrategySpec spec;
  spec.lambda = g.lambda;
  spec.start = s0;
  spec.v0 = v;
  spec.drift_tol = 64.0 * rep.tol / (1.0 - g.lambda);
  spec.states.resize(g.states.size());
  for (size_t s = 0; s < g.states.size(); ++s) {
    if (!rep.support.alive(static_cast<int>(s))) continue;
    auto& ps = spec.states[s];
    ps.alive = true;
    ps.m = rep.bounds.m[s];
    ps.M = rep.bounds.M[s];
    ps.x_minus = rep.x_minus[s].front();
    ps.x_plus = rep.x_plus[s].front();
    ps.cornered = rep.cornered[s];
  }
  return spec;
}

Controller::Controller(const GameGraph& g, const StrategySpec& spec)
    : Controller(g, spec, spec.start, spec.v0) {}

Controller::Controller(const GameGraph& g, const StrategySpec& spec, int state, double v)
    : g_(&g), spec_(&spec), state_(state), v_(v) {
  const auto& ps = spec.states[state_];
  if (!ps.alive) throw PrunedStart("controller start state not in strategy support");
  if (v_ < ps.m - spec.drift_tol || v_ > ps.M + spec.drift_tol)
    throw ValueOutOfRange("initial target outside start interval");
}

ActionDistribution Controller::act() const {
  const auto& ps = spec_->states[state_];
  ActionDistribution d;
  d.x_minus = ps.x_minus;
  d.x_plus = ps.x_plus;
  if (ps.x_minus == ps.x_plus || ps.M - ps.m <= spec_->drift_tol) {
    d.p_plus = 1.0;
    d.x_minus = d.x_plus;
    return d;
  }
  if (v_ < ps.m - spec_->drift_tol || v_ > ps.M + spec_->drift_tol)
    throw TargetDrift("target outside interval in state '" + g_->states[state_].name + "'");
  d.p_plus = std::clamp((v_ - ps.m) / (ps.M - ps.m), 0.0, 1.0);
  return d;
}

void Controller::update(int played_x, int observed_y) {
  const auto& ps = spec_->states[state_];
  if (played_x != ps.x_minus && played_x != ps.x_plus)
    throw std::invalid_argument("played action outside the extremal pair");

  double phi;
  if (ps.x_minus == ps.x_plus)
    phi = v_;  // cornered: the carried target is the forced expectation
  else
    phi = played_x == ps.x_plus ? ps.M : ps.m;

  const double u = rescaled_utility(*g_, state_, played_x, observed_y);
  const int next = g_->states[state_].next[played_x][observed_y];
  double v_next = (phi - u) / spec_->lambda;

  const auto& pn = spec_->states[next];
  if (!pn.alive) throw TargetDrift("transition into a pruned state");
  if (v_next < pn.m - spec_->drift_tol || v_next > pn.M + spec_->drift_tol)
    throw TargetDrift("one-step recursion left the enforceable interval in state '" +
                      g_->states[next].name + "'");
  if (v_next < pn.m || v_next > pn.M) {
    v_next = std::clamp(v_next, pn.m, pn.M);
    ++clamps_;
  }
  state_ = next;
  v_ = v_next;
}

std::pair<std::vector<int>, int> cornered_states(const SolveReport& rep) {
  std::vector<int> out;
  for (size_t s = 0; s < rep.cornered.size(); ++s)
    if (rep.cornered[s]) out.push_back(static_cast<int>(s));
  return {out, rep.longest_cornered_chain};
}

int memory_requirement(const SolveReport& rep) { return rep.longest_cornered_chain + 1; }

nlohmann::json spec_to_json(const GameGraph& g, const StrategySpec& spec) {
  nlohmann::json doc;
  doc["format"] = "autocrat-strategy/1";
  doc["lambda"] = spec.lambda;
  doc["start"] = g.states[spec.start].name;
  doc["v0"] = spec.v0;
  doc["drift_tol"] = spec.drift_tol;
  nlohmann::json states = nlohmann::json::object();
  for (size_t s = 0; s < spec.states.size(); ++s) {
    const auto& ps = spec.states[s];
    if (!ps.alive) continue;
    nlohmann::json body;
    body["m"] = ps.m;
    body["M"] = ps.M;
    body["x_minus"] = g.states[s].autocrat_actions[ps.x_minus];
    body["x_plus"] = g.states[s].autocrat_actions[ps.x_plus];
    body["cornered"] = ps.cornered;
    states[g.states[s].name] = body;
  }
  doc["states"] = states;
  return doc;
}

StrategySpec spec_from_json(const GameGraph& g, const nlohmann::json& doc) {
  if (doc.value("format", "") != "autocrat-strategy/1")
    throw ParseError("unknown strategy format");
  StrategySpec spec;
  spec.lambda = doc.at("lambda").get<double>();
  spec.v0 = doc.at("v0").get<double>();
  spec.drift_tol = doc.value("drift_tol", 64.0 * 1e-9 / (1.0 - spec.lambda));
  spec.start = g.state_index(doc.at("start").get<std::string>());
  if (spec.start < 0) throw ParseError("strategy start state not in game");
  spec.states.resize(g.states.size());
  for (const auto& [name, body] : doc.at("states").items()) {
    int s = g.state_index(name);
    if (s < 0) throw ParseError("strategy state '" + name + "' not in game");
    auto& ps = spec.states[s];
    ps.alive = true;
    ps.m = body.at("m").get<double>();
    ps.M = body.at("M").get<double>();
    ps.x_minus = g.autocrat_action_index(s, body.at("x_minus").get<std::string>());
    ps.x_plus = g.autocrat_action_index(s, body.at("x_plus").get<std::string>());
    if (ps.x_minus < 0 || ps.x_plus < 0)
      throw ParseError("strategy action not declared in state '" + name + "'");
    ps.cornered = body.value("cornered", false);
  }
  return spec;
}

}  // namespace autocrat
