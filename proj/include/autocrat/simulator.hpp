#pragma once

#include <cstdint>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "autocrat/game_graph.hpp"
#include "autocrat/solver.hpp"
#include "autocrat/strategy.hpp"

namespace autocrat {

// Counter-based SplitMix64 stream; per-episode substreams are derived from
// (seed, episode index) so results are reproducible regardless of execution
// parallelism.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}
  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  uint64_t state_;
};

uint64_t substream_seed(uint64_t seed, uint64_t index);

// Opponent behaviour depends only on (state, round, the autocrat's current
// mix) -- never on the autocrat's realized current-round action.
// AdversarialLow/High best-respond to the mix: they pick the reply
// maximizing the expected lambda*m objective (resp. minimizing the
// lambda*M objective) and so approximate the unenforcing replies without
// foreknowledge of the realized action.
class OpponentPolicy {
 public:
  enum class Kind { Uniform, Fixed, AdversarialLow, AdversarialHigh, Scripted, RandomMixture };

  static OpponentPolicy uniform();
  static OpponentPolicy fixed(std::string action_name);
  static OpponentPolicy adversarial_low();
  static OpponentPolicy adversarial_high();
  static OpponentPolicy scripted(std::vector<std::string> sequence);  // cycled by round
  static OpponentPolicy random_mixture(uint64_t mixture_seed);

  // Parses "uniform", "fixed:<a>", "adv-low", "adv-high", "scripted:<a,b>",
  // "mix:<seed>".
  static OpponentPolicy parse(const std::string& text);

  bool deterministic() const;
  int choose(const GameGraph& g, const StrategySpec& spec, int s, const ActionDistribution& mix,
             int round, SplitMix64* rng) const;
  const std::string& name() const { return name_; }
  Kind kind() const { return kind_; }

 private:
  Kind kind_ = Kind::Uniform;
  std::string name_ = "uniform";
  std::string fixed_action_;
  std::vector<std::string> script_;
  uint64_t mixture_seed_ = 0;
};

struct EpisodeResult {
  double total_utility = 0.0;
  double total_rescaled = 0.0;  // sum of U_lambda over rounds played
  int rounds = 0;               // t, so rounds+1 one-shot games were played
  long clamps = 0;
};

struct SimulationReport {
  long episodes = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  double ci99_lo = 0.0;
  double ci99_hi = 0.0;
  double mean_rounds = 0.0;
  long clamps = 0;
  uint64_t seed = 0;
};

struct HorizonTooLarge : std::runtime_error {
  explicit HorizonTooLarge(const std::string& what) : std::runtime_error(what) {}
};

// Round 0 is always played; after each round the game continues with
// probability lambda.
EpisodeResult run_episode(const GameGraph& g, const StrategySpec& spec,
                          const OpponentPolicy& opp, SplitMix64& rng);

SimulationReport simulate(const GameGraph& g, const StrategySpec& spec, const OpponentPolicy& opp,
                          long episodes, uint64_t seed);

// Exhaustive expectation against a deterministic policy: enumerates the
// reachable (state, target) nodes level by level to depth H and brackets
// E[U_lambda] with the lambda^{H+1} tail bound.
std::pair<double, double> exact_expectation(const GameGraph& g, const StrategySpec& spec,
                                            const OpponentPolicy& opp, int horizon,
                                            long node_budget = 1L << 22);

struct VerdictRow {
  double target = 0.0;
  std::string policy;
  double mean = 0.0;
  double ci_half_width = 0.0;
  bool mc_pass = false;
  std::optional<double> oracle_lo;
  std::optional<double> oracle_hi;
  bool pass = false;
};

std::vector<VerdictRow> verify_enforcement(const GameGraph& g, const SolveReport& rep, int s0,
                                           const std::vector<double>& targets,
                                           const std::vector<OpponentPolicy>& policies,
                                           long episodes, uint64_t seed, int horizon = 20);

// Same verdict computation but against externally provided strategy specs
// (one per target); used for negative controls with corrupted specs.
std::vector<VerdictRow> verify_specs(const GameGraph& g,
                                     const std::vector<std::pair<double, StrategySpec>>& specs,
                                     const std::vector<OpponentPolicy>& policies, long episodes,
                                     uint64_t seed, int horizon = 20);

nlohmann::json simulation_to_json(const SimulationReport& rep);
nlohmann::json verdicts_to_json(const std::vector<VerdictRow>& rows);

}  // namespace autocrat
