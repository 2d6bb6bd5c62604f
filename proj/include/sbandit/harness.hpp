#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sbandit/metrics.hpp"
#include "sbandit/policies.hpp"

namespace sbandit {

struct PolicySpec {
  PolicyKind kind = PolicyKind::HUCB;
  // unset hyperparameters resolve against the instance: l defaults to the
  // number of total original arms, L to max(1, ceil(1/c))
  std::optional<double> L;
  std::optional<double> l;
  bool fair_global_clock = false;
  TieBreak tie = TieBreak::UniformRandom;

  PolicyHyper resolve(const Instance& instance, const GapSummary& gaps) const;
};

struct DiscountSpec {
  enum class Kind { Ones, InverseT };
  Kind kind = Kind::Ones;
  DiscountSequence build(long T) const;
};

struct UtilitySpec {
  enum class Kind { Identity, Power };
  Kind kind = Kind::Identity;
  double p = 1.0;
  UtilityFunction build() const;
};

struct ScenarioConfig {
  std::string name = "scenario";
  long T = 100000;
  int reps = 100;
  std::uint64_t base_seed = 1;
  PolicySpec policy;
  std::vector<AgentProfile> agents;
  DiscountSpec discount;
  UtilitySpec utility;
  // coupled mode seeds the reward stream from (base_seed, rep) only, so runs
  // that differ in policy share reward randomness
  bool coupled_rewards = false;
  int sweep_agent = 1;  // whose replicas a replication sweep scales

  void validate() const;
  Instance build() const { return build_instance(agents); }
};

struct AggregateResult {
  std::string scenario_name;
  std::string policy;
  long T = 0;
  int reps = 0;
  std::uint64_t base_seed = 0;
  std::vector<long> checkpoints;
  std::vector<double> regret_mean, regret_std;
  std::vector<std::vector<double>> revenue_mean, revenue_std;  // [agent slot][checkpoint]
  std::vector<std::vector<double>> episode_revenue;            // [agent slot][rep] finals
  double wall_seconds = 0.0;

  double final_regret_mean() const { return regret_mean.back(); }
  double final_regret_std() const { return regret_std.back(); }
  double final_revenue_mean(int agent_id) const {
    return revenue_mean[static_cast<std::size_t>(agent_id - 1)].back();
  }
  double final_revenue_std(int agent_id) const {
    return revenue_std[static_cast<std::size_t>(agent_id - 1)].back();
  }
};

// geometrically spaced rounds, always containing 1..min(T,64), the powers of
// ten up to T, and T itself
std::vector<long> checkpoint_rounds(long T);

// Stream seeds for one episode. Documented layout (see rng.hpp derive_seed):
//   root        = derive(base_seed, rep, policy tag)
//   init/agent/arm/reward streams = derive(root, 0, stream name)
//   coupled rewards instead use     derive(derive(base_seed, rep, "reward"), 0, "reward")
struct EpisodeSeeds {
  std::uint64_t root, init, agent, arm, reward;
};
EpisodeSeeds episode_seeds(const ScenarioConfig& config, int rep_index);

RunResult run_episode(const ScenarioConfig& config, int rep_index);

// R episodes in parallel (SB_THREADS overrides the worker count), reduced to
// mean/std trajectories; deterministic regardless of scheduling
AggregateResult run_experiment(const ScenarioConfig& config);

std::vector<AggregateResult> sweep_replicas(const ScenarioConfig& config,
                                            const std::vector<long>& replica_counts);
std::vector<AggregateResult> sweep_policies(const ScenarioConfig& config,
                                            const std::vector<PolicySpec>& policies);

// the experiment scenarios shipped as presets: fig1 (equilibrium, no
// replication), fig2a, fig2b, fig2c, and the 2-agent verification toy
std::vector<std::string> preset_names();
ScenarioConfig builtin_preset(const std::string& name);

// [scenario]/[policy]/[agents]/[agent] key-value document
ScenarioConfig parse_scenario_file(const std::string& path);
ScenarioConfig parse_scenario_text(const std::string& text, const std::string& origin);

void write_result_csv(const AggregateResult& result, const std::string& path);
AggregateResult read_result_csv(const std::string& path);
void write_result_json(const AggregateResult& result, const ScenarioConfig& config,
                       const std::string& path);

std::string format_double(double v);  // shortest round-trippable decimal

int harness_thread_count();
std::string output_directory(const std::string& flag_value);  // SB_OUT fallback

}  // namespace sbandit
