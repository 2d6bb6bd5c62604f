#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "sbandit/core.hpp"

namespace sbandit {

enum class PolicyKind { UCB1, FairUCB1, SUCB, HUCB, RHUCB, PRHUCB };

const char* policy_name(PolicyKind kind);
PolicyKind parse_policy(const std::string& name);  // ucb1|fair|sucb|hucb|rhucb|prhucb

// FirstCandidate is a diagnostic mode (the verify command's deterministic
// tie-break switch); normal operation breaks ties uniformly at random among
// all indices within kTieTolerance of the maximum.
enum class TieBreak { UniformRandom, FirstCandidate };

inline constexpr double kTieTolerance = 1e-12;

struct PolicyHyper {
  double L = 1.0;  // RH-UCB per-agent subsample scale: |B_i| = min(|S_i|, ceil(L ln T))
  double l = 1.0;  // S-UCB global sample scale:       sampled = min(|S|, ceil(l ln T))
  bool fair_global_clock = false;  // Fair(UCB1) inner clock: agent-local time by default
  TieBreak tie = TieBreak::UniformRandom;
};

struct ArmStats {
  long n = 0;      // n(a)
  double r = 0.0;  // r(a): arithmetic mean of observed rewards; unused while n == 0
};

struct AgentStats {
  long N = 0;      // N(i)
  double R = 0.0;  // R(i)
};

// ln guarded at zero; only relevant at t = 1 where indices are unused anyway.
inline double ln_pos(double x) { return x > 1.0 ? std::log(x) : 0.0; }

inline double ucb1_index(double r, long n, double t) {
  return r + std::sqrt(2.0 * ln_pos(t) / static_cast<double>(n));
}

inline double hucb_agent_index(const AgentStats& s, double t) {
  return s.R + std::sqrt(2.0 * ln_pos(t) / static_cast<double>(s.N));
}

inline double rhucb_agent_index(const AgentStats& s, double t) {
  return s.R + std::sqrt(std::sqrt(t) * ln_pos(t) / static_cast<double>(s.N));
}

inline double prhucb_agent_index(const AgentStats& s, double t) {
  double lt = ln_pos(t);
  return s.R + std::sqrt(std::sqrt(t * lt * lt * lt) / static_cast<double>(s.N));
}

// the arm-level index shared by all policies' second level, with its own clock
inline double arm_index(double r, long n, double clock) {
  return r + std::sqrt(2.0 * ln_pos(clock) / static_cast<double>(n));
}

std::size_t sucb_sample_size(long total_arms, double l, long T);
std::size_t rhucb_sample_size(long agent_arms, double L, long T);

// uniform samples without replacement: the S-UCB global set of size
// min(|S|, ceil(l ln T)) and RH-UCB's per-agent B_i of size min(|S_i|, ceil(L ln T))
std::vector<ArmId> sucb_init(const Instance& instance, double l, long T, RandomSource& rng);
std::vector<std::vector<ArmId>> rhucb_init(const Instance& instance, double L, long T,
                                           RandomSource& rng);

// One policy run's sufficient statistics plus the select/update round
// protocol. select() consumes exactly one draw from agent_rng (hierarchical
// policies and Fair) and exactly one draw from arm_rng per round, regardless
// of candidate-set sizes, so coupled-seed comparisons across replication
// levels stay aligned. The exact-enumeration oracle drives the identical
// decision logic through selection_distribution()/force_select().
class PolicyState {
 public:
  PolicyState(PolicyKind kind, const Instance& instance, const PolicyHyper& hyper,
              long horizon, RandomSource& init_rng);
  // oracle path: S-UCB takes fixed_active[0], RH-UCB one entry per agent;
  // kinds without init-time randomness ignore the argument
  PolicyState(PolicyKind kind, const Instance& instance, const PolicyHyper& hyper,
              long horizon, const std::vector<std::vector<ArmId>>& fixed_active);

  ArmId select(RandomSource& agent_rng, RandomSource& arm_rng);
  void update(ArmId arm, int reward);

  // exact probability of each arm being the next selection; pure
  std::vector<std::pair<ArmId, double>> selection_distribution() const;
  // oracle hook: apply the side effects select() has when it returns `arm`
  void force_select(ArmId arm);

  PolicyKind kind() const { return kind_; }
  long t() const { return t_; }
  long rounds_completed() const { return t_ - 1; }
  ArmStats arm_stats(ArmId a) const;
  AgentStats agent_stats(int agent_id) const;
  // RH-UCB/PRH-UCB per-agent subsample; S-UCB global sampled set under agent_id 0
  const std::vector<ArmId>& subsample(int agent_id) const;
  bool in_active_set(ArmId a) const { return active_flag_[static_cast<std::size_t>(a)] != 0; }

 private:
  void init_stats();
  void init_active(RandomSource* init_rng, const std::vector<std::vector<ArmId>>* fixed);
  void phase1_candidates(std::vector<int>& out) const;
  // fills arm candidates within agent; true when the pick grows the subsample
  bool phase2_candidates(int agent_id, std::vector<ArmId>& out) const;
  void flat_candidates(std::vector<ArmId>& out) const;
  void argmax_arms(const std::vector<ArmId>& arms, double bonus_scale,
                   std::vector<ArmId>& out) const;
  bool prh_can_grow(int agent_id) const;
  template <class T>
  const T& pick(const std::vector<T>& candidates, RandomSource& rng) const;

  const Instance* inst_;
  PolicyKind kind_;
  PolicyHyper hyper_;
  long horizon_;
  long t_ = 1;
  ArmId pending_ = -1;

  std::vector<long> n_;              // pulls per arm
  std::vector<double> sum_;          // reward totals per arm
  std::vector<double> mean_;         // sum_/n_, maintained on update
  std::vector<double> inv_sqrt_n_;   // 1/sqrt(n), maintained on update
  std::vector<long> N_;              // selections per agent (slot agent-1)
  std::vector<double> agent_sum_;
  std::vector<double> agent_mean_;

  // arms the policy may ever play: everything, the S-UCB sample, or each
  // agent's B_i (which PRH-UCB grows online)
  std::vector<std::vector<ArmId>> active_;  // [0]: flat set; per agent slot otherwise
  std::vector<char> active_flag_;
  std::vector<std::vector<ArmId>> prh_remaining_;  // S_i \ B_i, PRH-UCB only
  long unexplored_flat_ = 0;            // active arms with n == 0 (flat kinds)
  std::vector<long> unexplored_agent_;  // same per agent (hierarchical kinds)

  mutable std::vector<int> scratch_agents_;
  mutable std::vector<ArmId> scratch_arms_;
};

}  // namespace sbandit
