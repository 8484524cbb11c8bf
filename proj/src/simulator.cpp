#include "autocrat/simulator.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <thread>

namespace autocrat {

namespace {

constexpr double kZ99 = 2.5758293035489004;  // 99% two-sided normal quantile

int thread_count(long episodes) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  long cap = std::min<long>(hw, 8);
  if (const char* env = std::getenv("AUTOCRAT_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) cap = v;
  }
  return static_cast<int>(std::max(1L, std::min<long>(cap, episodes)));
}

int sample_action(const ActionDistribution& mix, SplitMix64& rng) {
  if (mix.x_minus == mix.x_plus || mix.p_plus >= 1.0) return mix.x_plus;
  if (mix.p_plus <= 0.0) return mix.x_minus;
  return rng.uniform() < mix.p_plus ? mix.x_plus : mix.x_minus;
}

}  // namespace

uint64_t substream_seed(uint64_t seed, uint64_t index) {
  SplitMix64 mixer(seed ^ (0xd1342543de82ef95ULL * (index + 1)));
  return mixer.next();
}

OpponentPolicy OpponentPolicy::uniform() { return {}; }

OpponentPolicy OpponentPolicy::fixed(std::string action_name) {
  OpponentPolicy p;
  p.kind_ = Kind::Fixed;
  p.name_ = "fixed:" + action_name;
  p.fixed_action_ = std::move(action_name);
  return p;
}

OpponentPolicy OpponentPolicy::adversarial_low() {
  OpponentPolicy p;
  p.kind_ = Kind::AdversarialLow;
  p.name_ = "adv-low";
  return p;
}

OpponentPolicy OpponentPolicy::adversarial_high() {
  OpponentPolicy p;
  p.kind_ = Kind::AdversarialHigh;
  p.name_ = "adv-high";
  return p;
}

OpponentPolicy OpponentPolicy::scripted(std::vector<std::string> sequence) {
  OpponentPolicy p;
  p.kind_ = Kind::Scripted;
  p.name_ = "scripted";
  p.script_ = std::move(sequence);
  return p;
}

OpponentPolicy OpponentPolicy::random_mixture(uint64_t mixture_seed) {
  OpponentPolicy p;
  p.kind_ = Kind::RandomMixture;
  p.name_ = "mix:" + std::to_string(mixture_seed);
  p.mixture_seed_ = mixture_seed;
  return p;
}

OpponentPolicy OpponentPolicy::parse(const std::string& text) {
  if (text == "uniform") return uniform();
  if (text == "adv-low") return adversarial_low();
  if (text == "adv-high") return adversarial_high();
  if (text.rfind("fixed:", 0) == 0) return fixed(text.substr(6));
  if (text.rfind("mix:", 0) == 0)
    return random_mixture(std::strtoull(text.c_str() + 4, nullptr, 10));
  if (text.rfind("scripted:", 0) == 0) {
    std::vector<std::string> seq;
    std::string body = text.substr(9), cur;
    for (char c : body) {
      if (c == ',') {
        seq.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) seq.push_back(cur);
    if (seq.empty()) throw std::invalid_argument("empty script");
    return scripted(std::move(seq));
  }
  throw std::invalid_argument("unknown opponent policy: " + text);
}

bool OpponentPolicy::deterministic() const {
  return kind_ != Kind::Uniform && kind_ != Kind::RandomMixture;
}

int OpponentPolicy::choose(const GameGraph& g, const StrategySpec& spec, int s,
                           const ActionDistribution& mix, int round, SplitMix64* rng) const {
  const auto& st = g.states[s];
  const int ny = static_cast<int>(st.opponent_actions.size());
  switch (kind_) {
    case Kind::Uniform:
      return static_cast<int>(rng->next() % ny);
    case Kind::Fixed: {
      int y = g.opponent_action_index(s, fixed_action_);
      return y >= 0 ? y : 0;
    }
    case Kind::Scripted: {
      int y = g.opponent_action_index(s, script_[round % script_.size()]);
      return y >= 0 ? y : 0;
    }
    case Kind::RandomMixture: {
      // Per-state weights drawn once from the mixture seed.
      SplitMix64 gen(substream_seed(mixture_seed_, static_cast<uint64_t>(s)));
      std::vector<double> w(ny);
      double total = 0.0;
      for (int y = 0; y < ny; ++y) total += (w[y] = gen.uniform() + 1e-3);
      double u = rng->uniform() * total;
      for (int y = 0; y < ny; ++y) {
        u -= w[y];
        if (u <= 0.0) return y;
      }
      return ny - 1;
    }
    case Kind::AdversarialLow:
    case Kind::AdversarialHigh: {
      const double p_plus = mix.x_minus == mix.x_plus ? 1.0 : mix.p_plus;
      double best = kind_ == Kind::AdversarialLow ? -std::numeric_limits<double>::infinity()
                                                  : std::numeric_limits<double>::infinity();
      int best_y = 0;
      for (int y = 0; y < ny; ++y) {
        auto objective = [&](int x) {
          int t = st.next[x][y];
          double endpoint = kind_ == Kind::AdversarialLow ? spec.states[t].m : spec.states[t].M;
          return spec.lambda * endpoint + rescaled_utility(g, s, x, y);
        };
        double v = p_plus * objective(mix.x_plus) + (1.0 - p_plus) * objective(mix.x_minus);
        if (kind_ == Kind::AdversarialLow ? v > best : v < best) {
          best = v;
          best_y = y;
        }
      }
      return best_y;
    }
  }
  return 0;
}

EpisodeResult run_episode(const GameGraph& g, const StrategySpec& spec, const OpponentPolicy& opp,
                          SplitMix64& rng) {
  EpisodeResult res;
  Controller ctrl(g, spec);
  int round = 0;
  while (true) {
    const int s = ctrl.state();
    const ActionDistribution mix = ctrl.act();
    const int x = sample_action(mix, rng);
    const int y = opp.choose(g, spec, s, mix, round, &rng);
    res.total_utility += g.states[s].utility[x][y];
    res.total_rescaled += rescaled_utility(g, s, x, y);
    ctrl.update(x, y);
    res.rounds = round;
    if (rng.uniform() >= spec.lambda) break;  // game ends
    ++round;
  }
  res.clamps = ctrl.clamps();
  return res;
}

SimulationReport simulate(const GameGraph& g, const StrategySpec& spec, const OpponentPolicy& opp,
                          long episodes, uint64_t seed) {
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  std::vector<double> totals(episodes);
  std::vector<int> rounds(episodes);
  std::vector<long> clamps(episodes);

  auto worker = [&](long lo, long hi) {
    for (long e = lo; e < hi; ++e) {
      SplitMix64 rng(substream_seed(seed, static_cast<uint64_t>(e)));
      EpisodeResult res = run_episode(g, spec, opp, rng);
      totals[e] = res.total_rescaled;
      rounds[e] = res.rounds;
      clamps[e] = res.clamps;
    }
  };

  const int nthreads = thread_count(episodes);
  if (nthreads == 1) {
    worker(0, episodes);
  } else {
    std::vector<std::thread> pool;
    long chunk = (episodes + nthreads - 1) / nthreads;
    for (int t = 0; t < nthreads; ++t)
      pool.emplace_back(worker, t * chunk, std::min<long>(episodes, (t + 1) * chunk));
    for (auto& th : pool) th.join();
  }

  // Reduce in episode-index order.
  SimulationReport rep;
  rep.episodes = episodes;
  rep.seed = seed;
  double sum = 0.0, round_sum = 0.0;
  for (long e = 0; e < episodes; ++e) {
    sum += totals[e];
    round_sum += rounds[e] + 1;
    rep.clamps += clamps[e];
  }
  rep.mean = sum / static_cast<double>(episodes);
  rep.mean_rounds = round_sum / static_cast<double>(episodes);
  double ss = 0.0;
  for (long e = 0; e < episodes; ++e) ss += (totals[e] - rep.mean) * (totals[e] - rep.mean);
  double variance = episodes > 1 ? ss / static_cast<double>(episodes - 1) : 0.0;
  rep.stderr_ = std::sqrt(variance / static_cast<double>(episodes));
  rep.ci99_lo = rep.mean - kZ99 * rep.stderr_;
  rep.ci99_hi = rep.mean + kZ99 * rep.stderr_;
  return rep;
}

std::pair<double, double> exact_expectation(const GameGraph& g, const StrategySpec& spec,
                                            const OpponentPolicy& opp, int horizon,
                                            long node_budget) {
  if (!opp.deterministic())
    throw std::invalid_argument("exact_expectation requires a deterministic opponent policy");
  if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");

  // Level-by-level enumeration of reachable (state, target) nodes. Nodes
  // with matching quantized targets are merged: the successor target depends
  // only on (state, played endpoint, reply), so coinciding nodes share all
  // futures.
  auto key_of = [](int s, double v) {
    return std::pair<int, long long>(s, std::llround(v * 0x1p34));
  };
  std::map<std::pair<int, long long>, std::pair<double, double>> level;  // key -> (prob, v)
  level[key_of(spec.start, spec.v0)] = {1.0, spec.v0};

  double total = 0.0;
  double discount = 1.0;
  long expanded = 0;
  for (int n = 0; n <= horizon; ++n) {
    std::map<std::pair<int, long long>, std::pair<double, double>> next_level;
    double layer_mean = 0.0;
    for (const auto& [key, node] : level) {
      if (++expanded > node_budget)
        throw HorizonTooLarge("enumeration exceeded the node budget");
      const auto [prob, v] = node;
      const int s = key.first;
      Controller ctrl(g, spec, s, v);
      const ActionDistribution mix = ctrl.act();
      const int y = opp.choose(g, spec, s, mix, n, nullptr);
      struct Atom {
        int x;
        double p;
      };
      Atom atoms[2] = {{mix.x_plus, mix.x_minus == mix.x_plus ? 1.0 : mix.p_plus},
                       {mix.x_minus, mix.x_minus == mix.x_plus ? 0.0 : 1.0 - mix.p_plus}};
      for (const auto& atom : atoms) {
        if (atom.p <= 0.0) continue;
        layer_mean += prob * atom.p * rescaled_utility(g, s, atom.x, y);
        Controller child = ctrl;
        child.update(atom.x, y);
        auto [it, inserted] =
            next_level.try_emplace(key_of(child.state(), child.target()),
                                   std::pair<double, double>(0.0, child.target()));
        it->second.first += prob * atom.p;
      }
    }
    total += discount * layer_mean;
    discount *= spec.lambda;
    level = std::move(next_level);
  }

  const auto ub = utility_bounds(g);
  return {total + discount * ub.lo, total + discount * ub.hi};
}

namespace {

std::vector<VerdictRow> run_verdicts(const GameGraph& g,
                                     const std::vector<std::pair<double, StrategySpec>>& specs,
                                     const std::vector<OpponentPolicy>& policies, long episodes,
                                     uint64_t seed, int horizon) {
  std::vector<VerdictRow> rows;
  uint64_t row_index = 0;
  for (const auto& [target, spec] : specs) {
    for (const auto& pol : policies) {
      VerdictRow row;
      row.target = target;
      row.policy = pol.name();
      bool errored = false;
      try {
        SimulationReport sim =
            simulate(g, spec, pol, episodes, substream_seed(seed, row_index));
        row.mean = sim.mean;
        row.ci_half_width = kZ99 * sim.stderr_;
        row.mc_pass = sim.stderr_ > 1e-12
                          ? std::abs(sim.mean - target) <= row.ci_half_width
                          : std::abs(sim.mean - target) <= 1e-9;
        if (pol.deterministic()) {
          auto [lo, hi] = exact_expectation(g, spec, pol, horizon);
          row.oracle_lo = lo;
          row.oracle_hi = hi;
        }
      } catch (const TargetDrift&) {
        errored = true;  // corrupted or inconsistent spec: the verdict fails
      }
      bool oracle_pass = !row.oracle_lo ||
                         (*row.oracle_lo <= target && target <= *row.oracle_hi);
      row.pass = !errored && row.mc_pass && oracle_pass;
      rows.push_back(row);
      ++row_index;
    }
  }
  return rows;
}

}  // namespace

std::vector<VerdictRow> verify_enforcement(const GameGraph& g, const SolveReport& rep, int s0,
                                           const std::vector<double>& targets,
                                           const std::vector<OpponentPolicy>& policies,
                                           long episodes, uint64_t seed, int horizon) {
  std::vector<std::pair<double, StrategySpec>> specs;
  for (double v : targets) specs.emplace_back(v, synthesize(rep, g, s0, v));
  return run_verdicts(g, specs, policies, episodes, seed, horizon);
}

std::vector<VerdictRow> verify_specs(const GameGraph& g,
                                     const std::vector<std::pair<double, StrategySpec>>& specs,
                                     const std::vector<OpponentPolicy>& policies, long episodes,
                                     uint64_t seed, int horizon) {
  return run_verdicts(g, specs, policies, episodes, seed, horizon);
}

nlohmann::json simulation_to_json(const SimulationReport& rep) {
  nlohmann::json doc;
  doc["episodes"] = rep.episodes;
  doc["mean"] = rep.mean;
  doc["stderr"] = rep.stderr_;
  doc["ci99"] = {rep.ci99_lo, rep.ci99_hi};
  doc["mean_rounds"] = rep.mean_rounds;
  doc["clamps"] = rep.clamps;
  doc["seed"] = rep.seed;
  return doc;
}

nlohmann::json verdicts_to_json(const std::vector<VerdictRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json r;
    r["target"] = row.target;
    r["policy"] = row.policy;
    r["mean"] = row.mean;
    r["mc_pass"] = row.mc_pass;
    if (row.oracle_lo) {
      r["oracle_lo"] = *row.oracle_lo;
      r["oracle_hi"] = *row.oracle_hi;
    }
    r["pass"] = row.pass;
    arr.push_back(r);
  }
  return arr;
}

}  // namespace autocrat
