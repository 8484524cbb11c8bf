#include "autocrat/game_graph.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace autocrat {

namespace {

using nlohmann::json;

Rational exact_number(const json& j, const std::string& where) {
  if (j.is_string()) return rational_from_string(j.get<std::string>());
  if (j.is_number_integer()) return Rational(static_cast<long>(j.get<long long>()));
  if (j.is_number_float()) return rational_from_double(j.get<double>());
  throw ParseError("expected number or rational string at " + where);
}

// "x,y" with a single comma separator; action names may not contain commas.
std::pair<std::string, std::string> split_joint_key(const std::string& key,
                                                    const std::string& where,
                                                    std::vector<std::string>& violations) {
  auto comma = key.find(',');
  if (comma == std::string::npos || key.find(',', comma + 1) != std::string::npos) {
    violations.push_back(where + ": joint-action key '" + key +
                         "' must be 'x,y' with a single comma");
    return {"", ""};
  }
  return {key.substr(0, comma), key.substr(comma + 1)};
}

}  // namespace

int GameGraph::state_index(std::string_view name) const {
  for (size_t i = 0; i < states.size(); ++i)
    if (states[i].name == name) return static_cast<int>(i);
  return -1;
}

int GameGraph::autocrat_action_index(int s, std::string_view name) const {
  const auto& a = states[s].autocrat_actions;
  auto it = std::find(a.begin(), a.end(), name);
  return it == a.end() ? -1 : static_cast<int>(it - a.begin());
}

int GameGraph::opponent_action_index(int s, std::string_view name) const {
  const auto& a = states[s].opponent_actions;
  auto it = std::find(a.begin(), a.end(), name);
  return it == a.end() ? -1 : static_cast<int>(it - a.begin());
}

int GameGraph::num_autocrat_actions() const {
  int n = 0;
  for (const auto& st : states) n += static_cast<int>(st.autocrat_actions.size());
  return n;
}

GameGraph game_from_json(const json& doc) {
  std::vector<std::string> violations;
  if (!doc.is_object()) throw ParseError("top-level document must be an object");
  for (const char* key : {"lambda", "start", "states"})
    if (!doc.contains(key)) violations.push_back(std::string("missing top-level key '") + key + "'");
  if (!violations.empty()) throw ValidationError("invalid game document", violations);

  GameGraph g;
  g.lambda_exact = exact_number(doc.at("lambda"), "lambda");
  g.lambda = g.lambda_exact.get_d();

  const auto& states = doc.at("states");
  if (!states.is_object() || states.empty())
    throw ValidationError("invalid game document", {"'states' must be a nonempty object"});

  for (const auto& [name, body] : states.items()) {
    GameGraph::State st;
    st.name = name;
    if (name.empty()) violations.push_back("state name must be nonempty");
    for (const auto& a : body.value("autocrat_actions", json::array()))
      st.autocrat_actions.push_back(a.get<std::string>());
    for (const auto& a : body.value("opponent_actions", json::array()))
      st.opponent_actions.push_back(a.get<std::string>());
    if (st.autocrat_actions.empty())
      violations.push_back("state '" + name + "': empty autocrat action set");
    if (st.opponent_actions.empty())
      violations.push_back("state '" + name + "': empty opponent action set");
    for (const auto& a : st.autocrat_actions)
      if (a.find(',') != std::string::npos)
        violations.push_back("state '" + name + "': action name '" + a + "' contains a comma");
    for (const auto& a : st.opponent_actions)
      if (a.find(',') != std::string::npos)
        violations.push_back("state '" + name + "': action name '" + a + "' contains a comma");
    g.states.push_back(std::move(st));
  }

  // Second pass: transitions and utilities over exactly X_s x Y_s.
  for (auto& st : g.states) {
    const auto& body = states.at(st.name);
    const size_t nx = st.autocrat_actions.size();
    const size_t ny = st.opponent_actions.size();
    st.next.assign(nx, std::vector<int>(ny, -1));
    st.utility_exact.assign(nx, std::vector<Rational>(ny, Rational(0)));
    st.utility.assign(nx, std::vector<double>(ny, 0.0));
    std::set<std::pair<int, int>> seen_t, seen_u;

    const auto transitions = body.value("transitions", json::object());
    const auto utility = body.value("utility", json::object());
    for (const auto& [key, target] : transitions.items()) {
      auto [xs, ys] = split_joint_key(key, "state '" + st.name + "' transitions", violations);
      if (xs.empty() && ys.empty()) continue;
      int x = -1, y = -1;
      for (size_t i = 0; i < nx; ++i)
        if (st.autocrat_actions[i] == xs) x = static_cast<int>(i);
      for (size_t i = 0; i < ny; ++i)
        if (st.opponent_actions[i] == ys) y = static_cast<int>(i);
      if (x < 0 || y < 0) {
        violations.push_back("state '" + st.name + "': transition key '" + key +
                             "' names an undeclared action");
        continue;
      }
      int t = g.state_index(target.get<std::string>());
      if (t < 0)
        violations.push_back("state '" + st.name + "': dangling target '" +
                             target.get<std::string>() + "' for edge (" + key + ")");
      st.next[x][y] = t;
      seen_t.insert({x, y});
    }
    for (const auto& [key, value] : utility.items()) {
      auto [xs, ys] = split_joint_key(key, "state '" + st.name + "' utility", violations);
      if (xs.empty() && ys.empty()) continue;
      int x = -1, y = -1;
      for (size_t i = 0; i < nx; ++i)
        if (st.autocrat_actions[i] == xs) x = static_cast<int>(i);
      for (size_t i = 0; i < ny; ++i)
        if (st.opponent_actions[i] == ys) y = static_cast<int>(i);
      if (x < 0 || y < 0) {
        violations.push_back("state '" + st.name + "': utility key '" + key +
                             "' names an undeclared action");
        continue;
      }
      st.utility_exact[x][y] = exact_number(value, "utility (" + key + ";" + st.name + ")");
      st.utility[x][y] = st.utility_exact[x][y].get_d();
      seen_u.insert({x, y});
    }
    if (seen_t.size() != nx * ny)
      violations.push_back("state '" + st.name + "': transitions must cover exactly X_s x Y_s");
    if (seen_u.size() != nx * ny)
      violations.push_back("state '" + st.name + "': utility must cover exactly X_s x Y_s");
  }

  g.start = g.state_index(doc.at("start").get<std::string>());
  if (g.start < 0)
    violations.push_back("start state '" + doc.at("start").get<std::string>() + "' not declared");

  for (const auto& v : validate(g)) violations.push_back(v);
  if (!violations.empty()) throw ValidationError("invalid game document", violations);
  return g;
}

GameGraph load_game(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
  return game_from_json(doc);
}

GameGraph load_game_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open game file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_game(buf.str());
}

json game_to_json(const GameGraph& g) {
  json doc;
  doc["lambda"] = to_string(g.lambda_exact);
  doc["start"] = g.states[g.start].name;
  json states = json::object();
  for (const auto& st : g.states) {
    json body;
    body["autocrat_actions"] = st.autocrat_actions;
    body["opponent_actions"] = st.opponent_actions;
    json transitions = json::object(), utility = json::object();
    for (size_t x = 0; x < st.autocrat_actions.size(); ++x)
      for (size_t y = 0; y < st.opponent_actions.size(); ++y) {
        std::string key = st.autocrat_actions[x] + "," + st.opponent_actions[y];
        transitions[key] = g.states[st.next[x][y]].name;
        utility[key] = to_string(st.utility_exact[x][y]);
      }
    body["transitions"] = transitions;
    body["utility"] = utility;
    states[st.name] = body;
  }
  doc["states"] = states;
  return doc;
}

std::vector<std::string> validate(const GameGraph& g) {
  std::vector<std::string> violations;
  if (!(g.lambda > 0.0 && g.lambda < 1.0)) violations.push_back("discount out of (0,1)");
  if (g.states.empty()) violations.push_back("no states");
  if (g.start < 0 || g.start >= static_cast<int>(g.states.size()))
    violations.push_back("start state out of range");
  std::set<std::string> names;
  for (const auto& st : g.states) {
    if (st.name.empty()) violations.push_back("state name must be nonempty");
    if (!names.insert(st.name).second) violations.push_back("duplicate state '" + st.name + "'");
    if (st.autocrat_actions.empty() || st.opponent_actions.empty())
      violations.push_back("state '" + st.name + "': no outgoing edge");
    for (size_t x = 0; x < st.next.size(); ++x)
      for (size_t y = 0; y < st.next[x].size(); ++y) {
        if (st.next[x][y] < 0 || st.next[x][y] >= static_cast<int>(g.states.size()))
          violations.push_back("state '" + st.name + "': dangling target on edge (" +
                               st.autocrat_actions[x] + "," + st.opponent_actions[y] + ")");
        if (!std::isfinite(st.utility[x][y]))
          violations.push_back("state '" + st.name + "': non-finite utility");
      }
  }
  return violations;
}

double rescaled_utility(const GameGraph& g, int s, int x, int y) {
  if (s < 0 || s >= static_cast<int>(g.states.size()))
    throw std::out_of_range("unknown state");
  const auto& st = g.states[s];
  if (x < 0 || x >= static_cast<int>(st.autocrat_actions.size()) || y < 0 ||
      y >= static_cast<int>(st.opponent_actions.size()))
    throw std::out_of_range("unknown action");
  return (1.0 - g.lambda) * st.utility[x][y];
}

Rational rescaled_utility_exact(const GameGraph& g, int s, int x, int y) {
  return (Rational(1) - g.lambda_exact) * g.states[s].utility_exact[x][y];
}

UtilityBounds utility_bounds(const GameGraph& g) {
  UtilityBounds b;
  bool first = true;
  for (const auto& st : g.states)
    for (const auto& row : st.utility)
      for (double u : row) {
        if (first) {
          b.lo = b.hi = u;
          first = false;
        } else {
          b.lo = std::min(b.lo, u);
          b.hi = std::max(b.hi, u);
        }
      }
  return b;
}

std::vector<int> children(const GameGraph& g, int s) {
  if (s < 0 || s >= static_cast<int>(g.states.size()))
    throw std::out_of_range("unknown state");
  std::set<int> out;
  for (const auto& row : g.states[s].next)
    for (int t : row) out.insert(t);
  return {out.begin(), out.end()};
}

std::vector<int> parents(const GameGraph& g, int s) {
  if (s < 0 || s >= static_cast<int>(g.states.size()))
    throw std::out_of_range("unknown state");
  std::set<int> out;
  for (size_t p = 0; p < g.states.size(); ++p)
    for (const auto& row : g.states[p].next)
      for (int t : row)
        if (t == s) out.insert(static_cast<int>(p));
  return {out.begin(), out.end()};
}

GameGraph with_lambda(const GameGraph& g, const Rational& lambda) {
  GameGraph out = g;
  out.lambda_exact = lambda;
  out.lambda = lambda.get_d();
  return out;
}

}  // namespace autocrat
