// Command-line front end: validate, solve, synthesize, simulate, verify,
// sweep. Exit codes: 0 ok, 1 other error, 2 parse/validation failure,
// 3 empty result under --strict, 4 target value out of range, 5 verification
// failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "autocrat/exact.hpp"
#include "autocrat/game_graph.hpp"
#include "autocrat/simulator.hpp"
#include "autocrat/solver.hpp"
#include "autocrat/strategy.hpp"

namespace {

using nlohmann::json;
using namespace autocrat;

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitParse = 2;
constexpr int kExitEmptyStrict = 3;
constexpr int kExitValueRange = 4;
constexpr int kExitVerifyFail = 5;

struct Options {
  std::string game_path;
  std::string spec_path;
  std::vector<std::string> spec_paths;
  std::string lambda_text;
  std::string lambdas_text;
  std::string start_name;
  std::string out_path;
  std::string format = "text";
  std::string init = "standard";
  std::vector<std::string> opponents;
  double tol = 1e-9;
  double value = 0.0;
  int max_iter = -1;
  int horizon = 20;
  long episodes = 100000;
  uint64_t seed = 0;
  bool trace = false;
  bool exact = false;
  bool strict = false;
};

void emit(const Options& opt, const std::string& text) {
  if (opt.out_path.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(opt.out_path);
  if (!out) throw std::runtime_error("cannot write " + opt.out_path);
  out << text << "\n";
}

GameGraph load_game_opt(const Options& opt) {
  GameGraph g = load_game_file(opt.game_path);
  if (!opt.lambda_text.empty()) {
    Rational lam = rational_from_string(opt.lambda_text);
    if (lam <= 0 || lam >= 1) throw ParseError("--lambda must lie in (0,1)");
    g = with_lambda(g, lam);
  }
  return g;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return json::parse(in);
}

std::vector<OpponentPolicy> parse_policies(const std::vector<std::string>& texts) {
  std::vector<OpponentPolicy> out;
  if (texts.empty()) {
    out = {OpponentPolicy::uniform(), OpponentPolicy::adversarial_low(),
           OpponentPolicy::adversarial_high()};
  } else {
    for (const auto& t : texts) out.push_back(OpponentPolicy::parse(t));
  }
  return out;
}

std::string interval_text(const SolveReport& rep, int s) {
  if (!rep.support.alive(s)) return "pruned";
  char buf[64];
  std::snprintf(buf, sizeof buf, "[%.6f, %.6f]", rep.bounds.m[s], rep.bounds.M[s]);
  return buf;
}

void print_solve_text(std::ostream& os, const GameGraph& g, const SolveReport& rep) {
  os << "status: " << (rep.status == SolveStatus::Solved ? "Solved" : "Empty") << "\n";
  for (int s = 0; s < static_cast<int>(g.states.size()); ++s) {
    os << "  " << g.states[s].name << ": " << interval_text(rep, s);
    if (rep.support.alive(s)) {
      os << "  x-=" << g.states[s].autocrat_actions[rep.x_minus[s].front()]
         << " x+=" << g.states[s].autocrat_actions[rep.x_plus[s].front()]
         << (rep.cornered[s] ? "  cornered" : "");
    }
    os << "\n";
  }
  os << "L: " << rep.longest_cornered_chain
     << "  memory: " << memory_requirement(rep) << "\n";
  if (!rep.pruned_actions.empty()) {
    os << "pruned:";
    for (const auto& p : rep.pruned_actions)
      os << " " << g.states[p.state].name << "/" << g.states[p.state].autocrat_actions[p.action];
    os << "\n";
  }
}

int cmd_validate(const Options& opt) {
  try {
    GameGraph g = load_game_opt(opt);
    auto violations = validate(g);
    if (!violations.empty()) {
      for (const auto& v : violations) std::cerr << v << "\n";
      return kExitParse;
    }
    if (opt.format == "json") {
      json doc{{"valid", true}, {"states", g.states.size()}};
      emit(opt, doc.dump(2));
    } else {
      emit(opt, "ok: " + std::to_string(g.states.size()) + " states");
    }
    return kExitOk;
  } catch (const ValidationError& e) {
    for (const auto& v : e.violations) std::cerr << v << "\n";
    return kExitParse;
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitParse;
  }
}

int cmd_solve(const Options& opt) {
  GameGraph g = load_game_opt(opt);
  SolveReport rep = solve(g, opt.tol, opt.max_iter, opt.trace);
  if (opt.init == "swapped" && !rep.support.empty()) {
    auto [bounds, tr] = iterate_bounds(g, rep.support, InitMode::Swapped, opt.tol,
                                       1 << 22, opt.trace);
    rep.bounds = bounds;
    if (opt.trace) rep.traces.push_back(tr);
  }
  json doc = report_to_json(g, rep, opt.trace);
  if (opt.exact && rep.status == SolveStatus::Solved) {
    ExactBounds left = refine_exact(g, rep, Side::Left);
    ExactBounds right = refine_exact(g, rep, Side::Right);
    doc["exact"] = exact_to_json(g, left, right);
  }
  if (opt.format == "json") {
    emit(opt, doc.dump(2));
  } else {
    std::ostringstream os;
    print_solve_text(os, g, rep);
    if (doc.contains("exact")) {
      for (const auto& [name, body] : doc["exact"].items())
        os << "  exact " << name << ": m=" << body["m"].get<std::string>()
           << " M=" << body["M"].get<std::string>() << "\n";
    }
    std::string text = os.str();
    if (!text.empty() && text.back() == '\n') text.pop_back();
    emit(opt, text);
  }
  if (opt.strict && rep.status == SolveStatus::Empty) return kExitEmptyStrict;
  return kExitOk;
}

int cmd_synthesize(const Options& opt) {
  GameGraph g = load_game_opt(opt);
  SolveReport rep = solve(g, opt.tol);
  int s0 = opt.start_name.empty() ? g.start : g.state_index(opt.start_name);
  if (s0 < 0) throw std::runtime_error("unknown state: " + opt.start_name);
  StrategySpec spec = synthesize(rep, g, s0, opt.value);
  emit(opt, spec_to_json(g, spec).dump(2));
  return kExitOk;
}

int cmd_simulate(const Options& opt) {
  GameGraph g = load_game_opt(opt);
  StrategySpec spec = spec_from_json(g, load_json_file(opt.spec_path));
  OpponentPolicy opp =
      OpponentPolicy::parse(opt.opponents.empty() ? "uniform" : opt.opponents.front());
  SimulationReport rep = simulate(g, spec, opp, opt.episodes, opt.seed);
  std::cerr << "seed: " << opt.seed << "\n";
  if (opt.format == "json") {
    emit(opt, simulation_to_json(rep).dump(2));
  } else {
    std::ostringstream os;
    os << "episodes: " << rep.episodes << "  opponent: " << opp.name() << "\n"
       << "mean: " << rep.mean << "  stderr: " << rep.stderr_ << "\n"
       << "ci99: [" << rep.ci99_lo << ", " << rep.ci99_hi << "]\n"
       << "mean_rounds: " << rep.mean_rounds << "  clamps: " << rep.clamps;
    emit(opt, os.str());
  }
  return kExitOk;
}

int cmd_verify(const Options& opt) {
  GameGraph g = load_game_opt(opt);
  std::vector<std::pair<double, StrategySpec>> specs;
  for (const auto& path : opt.spec_paths) {
    StrategySpec spec = spec_from_json(g, load_json_file(path));
    specs.emplace_back(spec.v0, spec);
  }
  auto policies = parse_policies(opt.opponents);
  std::cerr << "seed: " << opt.seed << "\n";
  auto rows = verify_specs(g, specs, policies, opt.episodes, opt.seed, opt.horizon);
  bool all_pass = true;
  for (const auto& r : rows) all_pass = all_pass && r.pass;
  if (opt.format == "json") {
    emit(opt, verdicts_to_json(rows).dump(2));
  } else {
    std::ostringstream os;
    for (const auto& r : rows) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "target=%-8.4f policy=%-10s mean=%-10.4f mc=%s",
                    r.target, r.policy.c_str(), r.mean, r.mc_pass ? "pass" : "FAIL");
      os << buf;
      if (r.oracle_lo) {
        std::snprintf(buf, sizeof buf, " oracle=[%.4f, %.4f]", *r.oracle_lo, *r.oracle_hi);
        os << buf;
      }
      os << (r.pass ? "  pass" : "  FAIL") << "\n";
    }
    std::string text = os.str();
    if (!text.empty() && text.back() == '\n') text.pop_back();
    emit(opt, text);
  }
  return all_pass ? kExitOk : kExitVerifyFail;
}

std::vector<Rational> parse_lambda_grid(const std::string& text) {
  std::vector<Rational> grid;
  auto push = [&](const std::string& tok) {
    Rational v = rational_from_string(tok);
    if (v <= 0 || v >= 1)
      throw std::invalid_argument("lambda grid entries must lie in (0,1): " + tok);
    grid.push_back(v);
  };
  if (text.find(':') != std::string::npos) {
    std::istringstream in(text);
    std::string a, b, step;
    std::getline(in, a, ':');
    std::getline(in, b, ':');
    std::getline(in, step, ':');
    Rational lo = rational_from_string(a), hi = rational_from_string(b),
             st = rational_from_string(step);
    if (st <= 0) throw std::invalid_argument("lambda grid step must be positive");
    for (Rational v = lo; v <= hi; v += st) {
      if (v <= 0 || v >= 1)
        throw std::invalid_argument("lambda grid entries must lie in (0,1): " + to_string(v));
      grid.push_back(v);
    }
  } else {
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) push(tok);
  }
  if (grid.empty()) throw std::invalid_argument("empty lambda grid");
  return grid;
}

int cmd_sweep(const Options& opt) {
  GameGraph g = load_game_opt(opt);
  std::vector<Rational> grid = parse_lambda_grid(opt.lambdas_text);
  std::vector<SolveReport> reports = sweep_lambda(g, grid, opt.tol);
  if (opt.format == "json") {
    json arr = json::array();
    for (size_t i = 0; i < grid.size(); ++i) {
      json row;
      row["lambda"] = to_string(grid[i]);
      row["report"] = report_to_json(with_lambda(g, grid[i]), reports[i], false);
      arr.push_back(row);
    }
    emit(opt, arr.dump(2));
  } else {
    std::ostringstream os;
    os << "lambda    ";
    for (const auto& st : g.states) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%-24s", st.name.c_str());
      os << buf;
    }
    os << "status\n";
    for (size_t i = 0; i < grid.size(); ++i) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%-10.4f", mpq_get_d(grid[i].get_mpq_t()));
      os << buf;
      for (int s = 0; s < static_cast<int>(g.states.size()); ++s) {
        std::snprintf(buf, sizeof buf, "%-24s", interval_text(reports[i], s).c_str());
        os << buf;
      }
      os << (reports[i].status == SolveStatus::Solved ? "Solved" : "Empty") << "\n";
    }
    std::string text = os.str();
    if (!text.empty() && text.back() == '\n') text.pop_back();
    emit(opt, text);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"autocratic-strategy solver for multi-state discounted games"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub, bool game = true) {
    if (game) sub->add_option("game", opt.game_path, "game JSON file")->required();
    sub->add_option("--tol", opt.tol, "convergence tolerance");
    sub->add_option("--max-iter", opt.max_iter, "outer pruning-round cap");
    sub->add_option("--lambda", opt.lambda_text, "discount override (decimal or p/q)");
    sub->add_option("--format", opt.format, "text|json")
        ->check(CLI::IsMember({"text", "json"}));
    sub->add_option("-o,--output", opt.out_path, "write output to file");
  };

  CLI::App* validate_cmd = app.add_subcommand("validate", "check a game file");
  add_common(validate_cmd);

  CLI::App* solve_cmd = app.add_subcommand("solve", "solve for enforceable intervals");
  add_common(solve_cmd);
  solve_cmd->add_flag("--trace", opt.trace, "embed iteration traces");
  solve_cmd->add_flag("--exact", opt.exact, "certify exact rational endpoints");
  solve_cmd->add_flag("--strict", opt.strict, "exit 3 when every state is pruned");
  solve_cmd->add_option("--init", opt.init, "standard|swapped")
      ->check(CLI::IsMember({"standard", "swapped"}));

  CLI::App* synth_cmd = app.add_subcommand("synthesize", "emit a strategy file");
  add_common(synth_cmd);
  synth_cmd->add_option("--start", opt.start_name, "start state (default: game start)");
  synth_cmd->add_option("--value", opt.value, "target expected rescaled utility")->required();

  CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte Carlo playouts of a strategy");
  add_common(sim_cmd);
  sim_cmd->add_option("spec", opt.spec_path, "strategy JSON file")->required();
  sim_cmd->add_option("--opponent", opt.opponents, "opponent policy");
  sim_cmd->add_option("--episodes", opt.episodes, "episode count");
  sim_cmd->add_option("--seed", opt.seed, "RNG seed");

  CLI::App* verify_cmd = app.add_subcommand("verify", "verdict table over strategies");
  add_common(verify_cmd);
  verify_cmd->add_option("specs", opt.spec_paths, "strategy JSON files")->required();
  verify_cmd->add_option("--opponent", opt.opponents, "opponent policy (repeatable)");
  verify_cmd->add_option("--episodes", opt.episodes, "episode count");
  verify_cmd->add_option("--seed", opt.seed, "RNG seed");
  verify_cmd->add_option("--horizon", opt.horizon, "oracle enumeration depth");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "solve across a lambda grid");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--lambdas", opt.lambdas_text, "lo:hi:step or comma list")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate_cmd->parsed()) return cmd_validate(opt);
    if (solve_cmd->parsed()) return cmd_solve(opt);
    if (synth_cmd->parsed()) return cmd_synthesize(opt);
    if (sim_cmd->parsed()) return cmd_simulate(opt);
    if (verify_cmd->parsed()) return cmd_verify(opt);
    if (sweep_cmd->parsed()) return cmd_sweep(opt);
  } catch (const ValueOutOfRange& e) {
    std::cerr << e.what() << "\n";
    return kExitValueRange;
  } catch (const PrunedStart& e) {
    std::cerr << e.what() << "\n";
    return kExitEmptyStrict;
  } catch (const ValidationError& e) {
    for (const auto& v : e.violations) std::cerr << v << "\n";
    return kExitParse;
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitParse;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitParse;
  } catch (const RationalParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitOther;
  }
  return kExitOther;
}
