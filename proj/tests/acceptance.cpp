// Acceptance harness: runs the ten contract scenarios end to end and prints
// one pass/fail line each. Exits nonzero when any scenario fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <set>
#include <string>
#include <vector>

#include "autocrat/exact.hpp"
#include "autocrat/game_graph.hpp"
#include "autocrat/simulator.hpp"
#include "autocrat/solver.hpp"
#include "autocrat/strategy.hpp"

using namespace autocrat;

namespace {

int g_failures = 0;

void report(int n, const char* what, bool ok, double seconds) {
  std::printf("%s  criterion %2d: %s (%.2fs)\n", ok ? "PASS" : "FAIL", n, what, seconds);
  if (!ok) ++g_failures;
}

std::string fixture(const char* name) {
  return std::string(FIXTURE_DIR) + "/" + name;
}

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

bool near(double a, double b, double tol = 1e-6) { return std::abs(a - b) <= tol; }

GameGraph random_game(SplitMix64& rng) {
  const int ns = 1 + static_cast<int>(rng.next() % 6);
  static const char* lambdas[] = {"0.3", "0.6", "0.9"};
  nlohmann::json doc;
  doc["lambda"] = lambdas[rng.next() % 3];
  doc["start"] = "s0";
  nlohmann::json states = nlohmann::json::object();
  for (int s = 0; s < ns; ++s) {
    const int nx = 1 + static_cast<int>(rng.next() % 4);
    const int ny = 1 + static_cast<int>(rng.next() % 4);
    nlohmann::json body;
    for (int x = 0; x < nx; ++x) body["autocrat_actions"].push_back("a" + std::to_string(x));
    for (int y = 0; y < ny; ++y) body["opponent_actions"].push_back("b" + std::to_string(y));
    nlohmann::json trans = nlohmann::json::object(), util = nlohmann::json::object();
    for (int x = 0; x < nx; ++x) {
      for (int y = 0; y < ny; ++y) {
        std::string key = "a" + std::to_string(x) + ",b" + std::to_string(y);
        trans[key] = "s" + std::to_string(rng.next() % ns);
        util[key] = static_cast<long>(rng.next() % 9) - 4;
      }
    }
    body["transitions"] = trans;
    body["utility"] = util;
    states["s" + std::to_string(s)] = body;
  }
  doc["states"] = states;
  return game_from_json(doc);
}

void criterion_1() {
  double t0 = now_seconds();
  GameGraph g = load_game_file(fixture("fix_b.json"));
  SolveReport rep = solve(g);
  int h = g.state_index("H"), l = g.state_index("L");
  bool ok = rep.status == SolveStatus::Solved && near(rep.bounds.m[h], 0.0) &&
            near(rep.bounds.m[l], 0.0) && near(rep.bounds.M[l], 2.0) &&
            near(rep.bounds.M[h], 2.2);
  ExactBounds left = refine_exact(g, rep, Side::Left);
  ExactBounds right = refine_exact(g, rep, Side::Right);
  ok = ok && *left.value[h] == Rational(0) && *left.value[l] == Rational(0) &&
       *right.value[l] == Rational(2) && *right.value[h] == Rational(11, 5) &&
       left.certified[h] && left.certified[l] && right.certified[h] && right.certified[l];
  double dt = now_seconds() - t0;
  report(1, "donation game endpoints at lambda=0.9, exact 0/0/2/11:5", ok && dt < 1.0, dt);
}

void criterion_2() {
  double t0 = now_seconds();
  GameGraph g = load_game_file(fixture("fix_b.json"));
  SolveReport mid = solve(with_lambda(g, Rational(9, 20)));
  int h = g.state_index("H"), l = g.state_index("L");
  bool ok = mid.status == SolveStatus::Solved && near(mid.bounds.M[l], 1.9) &&
            near(mid.bounds.M[h], 3.0);
  std::vector<Rational> grid;
  for (int i = 40; i <= 95; i += 5) grid.emplace_back(i, 100);
  auto reports = sweep_lambda(g, grid);
  // M_L rises with lambda below 1/2 and is flat at 2 from 1/2 on.
  ok = ok && near(reports[0].bounds.M[l], 1.8) && near(reports[1].bounds.M[l], 1.9) &&
       near(reports[2].bounds.M[l], 2.0) && near(reports[11].bounds.M[l], 2.0);
  double slope_below = reports[1].bounds.M[l] - reports[0].bounds.M[l];
  double slope_above = reports[4].bounds.M[l] - reports[3].bounds.M[l];
  ok = ok && slope_below > 0.05 && std::abs(slope_above) < 1e-6;
  double dt = now_seconds() - t0;
  report(2, "donation game at lambda=0.45 plus the M_L kink across 0.5", ok && dt < 2.0, dt);
}

void criterion_3() {
  double t0 = now_seconds();
  GameGraph g = load_game_file(fixture("fix_c.json"));
  SolveReport rep = solve(g);
  int s0 = g.state_index("s0"), s1 = g.state_index("s1"), s2 = g.state_index("s2");
  bool ok = rep.status == SolveStatus::Solved && near(rep.bounds.m[s0], 6.0 / 7) &&
            near(rep.bounds.M[s0], 27.0 / 7) && near(rep.bounds.m[s1], 12.0 / 7) &&
            near(rep.bounds.M[s1], 12.0 / 7) && near(rep.bounds.m[s2], 10.0 / 7) &&
            near(rep.bounds.M[s2], 17.0 / 7);
  ok = ok && !rep.cornered[s0] && rep.cornered[s1] && rep.cornered[s2] &&
       rep.longest_cornered_chain == 2 && memory_requirement(rep) == 3;
  ExactBounds left = refine_exact(g, rep, Side::Left);
  ExactBounds right = refine_exact(g, rep, Side::Right);
  ok = ok && *left.value[s0] == Rational(6, 7) && *left.value[s1] == Rational(12, 7) &&
       *left.value[s2] == Rational(10, 7) && *right.value[s0] == Rational(27, 7) &&
       *right.value[s1] == Rational(12, 7) && *right.value[s2] == Rational(17, 7);
  for (int s : {s0, s1, s2}) ok = ok && left.certified[s] && right.certified[s];
  double dt = now_seconds() - t0;
  report(3, "cornered chain values, cornered set {s1,s2}, L=2, memory 3, exact", ok && dt < 1.0,
         dt);
}

void criterion_4() {
  double t0 = now_seconds();
  const double tol = 1e-9;
  bool ok = true;
  auto agree = [&](const GameGraph& g) {
    Support supp = Support::full(g);
    auto [a, t1] = iterate_bounds(g, supp, InitMode::Standard, tol, 1 << 22);
    auto [b, t2] = iterate_bounds(g, supp, InitMode::Swapped, tol, 1 << 22);
    for (size_t s = 0; s < g.states.size(); ++s) {
      if (std::abs(a.m[s] - b.m[s]) > 2 * tol || std::abs(a.M[s] - b.M[s]) > 2 * tol)
        return false;
    }
    return true;
  };
  for (const char* name : {"fix_a.json", "fix_b.json", "fix_c.json"})
    ok = ok && agree(load_game_file(fixture(name)));
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) ok = ok && agree(random_game(rng));
  double dt = now_seconds() - t0;
  report(4, "uniqueness: standard vs swapped init on fixtures and 200 random games",
         ok && dt < 30.0, dt);
}

void criterion_5() {
  double t0 = now_seconds();
  GameGraph g = load_game_file(fixture("fix_b.json"));
  Support supp = Support::full(g);
  auto [ref, rt] = iterate_bounds(g, supp, InitMode::Standard, 1e-13, 1 << 22);
  auto [b, trace] = iterate_bounds(g, supp, InitMode::Standard, 1e-9, 1 << 22, true);
  const auto ub = utility_bounds(g);
  const double range = ub.hi - ub.lo;
  bool ok = true;
  for (size_t i = 0; i < trace.snapshots.size(); ++i) {
    double err = 0.0;
    for (size_t s = 0; s < g.states.size(); ++s) {
      err = std::max(err, std::abs(trace.snapshots[i].m[s] - ref.m[s]));
      err = std::max(err, std::abs(trace.snapshots[i].M[s] - ref.M[s]));
    }
    ok = ok && err <= std::pow(g.lambda, static_cast<double>(i + 1)) * range + 1e-12;
  }
  ok = ok && trace.iterations <= iteration_bound(1e-9, g.lambda, ub);
  double dt = now_seconds() - t0;
  report(5, "geometric error envelope and iteration cap", ok, dt);
}

void criterion_6() {
  double t0 = now_seconds();
  GameGraph g = load_game_file(fixture("fix_b.json"));
  SolveReport rep = solve(g);
  int h = g.state_index("H");
  bool ok = true;
  const char* policies[] = {"uniform", "fixed:0", "fixed:1", "adv-low", "adv-high"};
  const uint64_t seed = 20260826;
  uint64_t stream = 0;
  for (double target : {0.0, 1.1, 2.2}) {
    StrategySpec spec = synthesize(rep, g, h, target);
    for (const char* text : policies) {
      SimulationReport sim = simulate(g, spec, OpponentPolicy::parse(text), 100000,
                                      substream_seed(seed, stream++));
      double half = 2.5758293035489 * std::max(sim.stderr_, 1e-12);
      bool row = std::abs(sim.mean - target) <= half;
      // rounds+1 is geometric with mean 10 and variance lambda/(1-lambda)^2.
      double rounds_se = std::sqrt(0.9 / (0.01 * sim.episodes));
      row = row && std::abs(sim.mean_rounds - 10.0) <= 3 * rounds_se;
      if (!row) {
        std::printf("      target %.1f vs %s: mean %.5f +- %.5f rounds %.3f\n", target, text,
                    sim.mean, half, sim.mean_rounds);
      }
      ok = ok && row;
    }
  }
  double dt = now_seconds() - t0;
  report(6, "Monte Carlo enforcement for 3 targets x 5 policies", ok && dt < 60.0, dt);
}

void criterion_7() {
  double t0 = now_seconds();
  GameGraph g = load_game_file(fixture("fix_b.json"));
  SolveReport rep = solve(g);
  int h = g.state_index("H");
  bool ok = true;
  const char* policies[] = {"fixed:0", "fixed:1", "adv-low", "adv-high"};
  for (double target : {0.0, 1.1, 2.2}) {
    StrategySpec spec = synthesize(rep, g, h, target);
    for (const char* text : policies) {
      for (int horizon : {20, 40}) {
        auto [lo, hi] = exact_expectation(g, spec, OpponentPolicy::parse(text), horizon);
        double width = std::pow(0.9, horizon + 1) * 5.0;
        bool row = lo <= target + 1e-9 && target <= hi + 1e-9 && near(hi - lo, width, 1e-9);
        if (!row)
          std::printf("      target %.1f vs %s H=%d: [%.6f, %.6f]\n", target, text, horizon, lo,
                      hi);
        ok = ok && row;
      }
    }
  }
  double dt = now_seconds() - t0;
  report(7, "exhaustive oracle brackets every target at H=20 and H=40", ok && dt < 30.0, dt);
}

void criterion_8() {
  double t0 = now_seconds();
  GameGraph g = load_game_file(fixture("fix_b.json"));
  SolveReport rep = solve(g);
  int h = g.state_index("H"), l = g.state_index("L");
  StrategySpec spec = synthesize(rep, g, h, 1.1);
  spec.states[l].M += 0.5;
  std::vector<OpponentPolicy> policies = {
      OpponentPolicy::parse("uniform"), OpponentPolicy::parse("fixed:0"),
      OpponentPolicy::parse("fixed:1"), OpponentPolicy::parse("adv-low"),
      OpponentPolicy::parse("adv-high")};
  auto rows = verify_specs(g, {{1.1, spec}}, policies, 50000, 1);
  bool any_fail = false;
  for (const auto& r : rows) any_fail = any_fail || !r.pass;
  double dt = now_seconds() - t0;
  report(8, "negative control: corrupted M_L fails verification", any_fail, dt);
}

void criterion_9() {
  double t0 = now_seconds();
  const double tol = 1e-9;
  SplitMix64 rng(777);
  bool ok = true;
  for (int trial = 0; trial < 100; ++trial) {
    GameGraph g = random_game(rng);
    Support full = Support::full(g);
    Support restricted = full;
    for (size_t s = 0; s < g.states.size(); ++s) {
      std::vector<int> keep;
      for (int x : full.actions[s])
        if (rng.next() % 2 == 0) keep.push_back(x);
      if (keep.empty()) keep.push_back(full.actions[s][rng.next() % full.actions[s].size()]);
      restricted.actions[s] = keep;
    }
    auto [fb, t1] = iterate_bounds(g, full, InitMode::Standard, tol, 1 << 22);
    auto [rb, t2] = iterate_bounds(g, restricted, InitMode::Standard, tol, 1 << 22);
    for (size_t s = 0; s < g.states.size(); ++s)
      ok = ok && rb.m[s] >= fb.m[s] - 4 * tol && rb.M[s] <= fb.M[s] + 4 * tol;
  }
  double dt = now_seconds() - t0;
  report(9, "support monotonicity on 100 random games", ok, dt);
}

void criterion_10() {
  double t0 = now_seconds();
  GameGraph g = load_game_file(fixture("fix_c.json"));
  SolveReport rep = solve(g);
  int s0 = g.state_index("s0");
  StrategySpec spec = synthesize(rep, g, s0, 2.0);
  auto play_cycle = [&](Controller& ctrl, uint64_t bits) {
    ctrl.update(bits & 1 ? spec.states[s0].x_plus : spec.states[s0].x_minus, 0);
    ctrl.update(spec.states[ctrl.state()].x_minus, (bits >> 1) & 1);
    ctrl.update(spec.states[ctrl.state()].x_minus, (bits >> 2) & 1);
  };
  SplitMix64 rng(5);
  bool ok = true;
  for (int trial = 0; trial < 500; ++trial) {
    Controller a(g, spec), b(g, spec);
    int la = static_cast<int>(rng.next() % 4), lb = static_cast<int>(rng.next() % 4);
    for (int i = 0; i < la; ++i) play_cycle(a, rng.next());
    for (int i = 0; i < lb; ++i) play_cycle(b, rng.next());
    uint64_t window = rng.next();
    play_cycle(a, window);
    play_cycle(b, window);
    ok = ok && a.state() == b.state() && std::abs(a.target() - b.target()) <= 1e-9;
  }
  double dt = now_seconds() - t0;
  report(10, "window determinism: targets agree given the last L+1 rounds", ok, dt);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  if (g_failures) std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
