#include "sbandit/core.hpp"

#include <algorithm>
#include <numeric>

namespace sbandit {

AgentProfile make_profile(int agent_id, const std::vector<double>& means,
                          const std::vector<long>& copies) {
  AgentProfile p;
  p.agent_id = agent_id;
  for (std::size_t k = 0; k < means.size(); ++k)
    p.originals.push_back({agent_id, static_cast<int>(k) + 1, means[k]});
  p.copy_counts = copies;
  return p;
}

long Instance::total_original_count() const {
  long c = 0;
  for (const auto& p : agents) c += static_cast<long>(p.originals.size());
  return c;
}

Instance build_instance(const std::vector<AgentProfile>& profiles) {
  if (profiles.empty()) throw ConfigError("build_instance: no agents");
  Instance inst;
  inst.agents = profiles;
  inst.n = static_cast<int>(profiles.size());
  inst.agent_begin.assign(static_cast<std::size_t>(inst.n) + 1, 0);

  for (int i = 0; i < inst.n; ++i) {
    const auto& p = inst.agents[static_cast<std::size_t>(i)];
    if (p.agent_id != i + 1)
      throw ConfigError("build_instance: agent ids must be 1..n in order, got " +
                        std::to_string(p.agent_id) + " at position " + std::to_string(i + 1));
    if (p.originals.empty())
      throw ConfigError("build_instance: agent " + std::to_string(p.agent_id) +
                        " has no original arms");
    if (p.copy_counts.size() != p.originals.size())
      throw ConfigError("build_instance: agent " + std::to_string(p.agent_id) +
                        ": copy_counts length != originals length");
    long registered = 0;
    for (std::size_t k = 0; k < p.originals.size(); ++k) {
      const auto& o = p.originals[k];
      if (o.agent_id != p.agent_id || o.origin_index != static_cast<int>(k) + 1)
        throw ConfigError("build_instance: agent " + std::to_string(p.agent_id) +
                          ": original arm labels inconsistent");
      if (!(o.mean >= 0.0 && o.mean <= 1.0))
        throw InvalidMeanError("build_instance: mean " + std::to_string(o.mean) +
                               " outside [0,1] (agent " + std::to_string(p.agent_id) + ")");
      if (p.copy_counts[k] < 0)
        throw ConfigError("build_instance: negative copy count");
      registered += p.copy_counts[k];
    }
    if (registered == 0)
      throw EmptyStrategyError("build_instance: agent " + std::to_string(p.agent_id) +
                               " registers no arms");

    for (std::size_t k = 0; k < p.originals.size(); ++k) {
      for (long c = 1; c <= p.copy_counts[k]; ++c) {
        RegisteredArm a;
        a.arm_id = static_cast<ArmId>(inst.arms.size());
        a.agent_id = p.agent_id;
        a.origin_index = static_cast<int>(k) + 1;
        a.copy_index = static_cast<int>(c);
        a.mean = p.originals[k].mean;
        inst.arms.push_back(a);
      }
    }
    inst.agent_begin[static_cast<std::size_t>(i) + 1] = static_cast<ArmId>(inst.arms.size());
  }
  return inst;
}

int draw_reward(const RegisteredArm& arm, RandomSource& rng) {
  return rng.u01() < arm.mean ? 1 : 0;
}

GapSummary summarize_gaps(const Instance& inst) {
  GapSummary g;
  g.mu_star = 0.0;
  for (const auto& p : inst.agents)
    for (const auto& o : p.originals) g.mu_star = std::max(g.mu_star, o.mean);

  g.per_arm_gap.resize(inst.arms.size());
  for (const auto& a : inst.arms)
    g.per_arm_gap[static_cast<std::size_t>(a.arm_id)] = g.mu_star - a.mean;

  g.per_agent_gap.resize(static_cast<std::size_t>(inst.n));
  g.agent_best_mean.resize(static_cast<std::size_t>(inst.n));
  g.internal_gap.resize(static_cast<std::size_t>(inst.n));
  g.agent_best_fraction.resize(static_cast<std::size_t>(inst.n));
  g.best_fraction = 1.0;

  for (int i = 0; i < inst.n; ++i) {
    const auto& p = inst.agents[static_cast<std::size_t>(i)];
    double best = 0.0;
    for (const auto& o : p.originals) best = std::max(best, o.mean);
    g.agent_best_mean[static_cast<std::size_t>(i)] = best;
    g.per_agent_gap[static_cast<std::size_t>(i)] = g.mu_star - best;
    auto& internal = g.internal_gap[static_cast<std::size_t>(i)];
    internal.reserve(p.originals.size());
    for (const auto& o : p.originals) internal.push_back(best - o.mean);

    long at_best = 0;
    auto arms = inst.agent_arms(i + 1);
    for (const auto& a : arms)
      if (a.mean == best) ++at_best;
    double frac = static_cast<double>(at_best) / static_cast<double>(arms.size());
    g.agent_best_fraction[static_cast<std::size_t>(i)] = frac;
    g.best_fraction = std::min(g.best_fraction, frac);
  }
  return g;
}

}  // namespace sbandit
