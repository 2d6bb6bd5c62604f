#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sbandit/errors.hpp"
#include "sbandit/rng.hpp"

namespace sbandit {

using ArmId = std::int32_t;

// One of an agent's unique underlying contents, a Bernoulli arm.
struct OriginalArm {
  int agent_id = 0;      // 1-based
  int origin_index = 0;  // 1-based within the agent
  double mean = 0.0;     // Bernoulli parameter, in [0, 1]
};

// What an agent registers: each original arm replicated copy_counts[k] times
// (0 hides the arm entirely).
struct AgentProfile {
  int agent_id = 0;
  std::vector<OriginalArm> originals;
  std::vector<long> copy_counts;
};

AgentProfile make_profile(int agent_id, const std::vector<double>& means,
                          const std::vector<long>& copies);

struct RegisteredArm {
  ArmId arm_id = -1;
  int agent_id = 0;
  int origin_index = 0;
  int copy_index = 0;  // 1..copy_counts[origin]
  double mean = 0.0;   // identical to the original's mean: copies are exact
};

// The registered arm universe. Arm ids are dense [0, arm_count) and assigned
// in (agent_id, origin_index, copy_index) lexical order, so each agent's arms
// occupy one contiguous id range and seeded runs are bit-reproducible.
struct Instance {
  std::vector<AgentProfile> agents;
  std::vector<RegisteredArm> arms;
  int n = 0;                       // agent count
  std::vector<ArmId> agent_begin;  // size n+1; agent i (1-based) owns [begin[i-1], begin[i])

  ArmId arm_count() const { return static_cast<ArmId>(arms.size()); }
  int agent_of(ArmId a) const { return arms[static_cast<std::size_t>(a)].agent_id; }
  long agent_arm_count(int agent_id) const {
    return agent_begin[static_cast<std::size_t>(agent_id)] -
           agent_begin[static_cast<std::size_t>(agent_id) - 1];
  }
  std::span<const RegisteredArm> agent_arms(int agent_id) const {
    auto b = static_cast<std::size_t>(agent_begin[static_cast<std::size_t>(agent_id) - 1]);
    auto e = static_cast<std::size_t>(agent_begin[static_cast<std::size_t>(agent_id)]);
    return {arms.data() + b, e - b};
  }
  long total_original_count() const;
};

// Gap structure of an instance. mu_star is taken over the original arms
// (hidden ones included), matching the regret definition; internal gaps are
// per original arm.
struct GapSummary {
  double mu_star = 0.0;
  std::vector<double> per_arm_gap;    // Delta(a) by arm id
  std::vector<double> per_agent_gap;  // Delta_i, slot i-1
  std::vector<double> agent_best_mean;
  std::vector<std::vector<double>> internal_gap;  // delta_{i,a}, [agent slot][origin slot]
  std::vector<double> agent_best_fraction;
  double best_fraction = 1.0;  // c = min_i fraction of registered arms at mu*_i
};

struct HistoryRecord {
  long t = 0;  // 1-based round
  ArmId arm_id = -1;
  int agent_id = 0;
  int reward = 0;
};

struct History {
  std::vector<HistoryRecord> records;
};

Instance build_instance(const std::vector<AgentProfile>& profiles);

int draw_reward(const RegisteredArm& arm, RandomSource& rng);

GapSummary summarize_gaps(const Instance& instance);

}  // namespace sbandit
