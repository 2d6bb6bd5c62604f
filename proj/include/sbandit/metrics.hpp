#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sbandit/core.hpp"

namespace sbandit {

// Per-round revenue weights: non-negative, non-increasing, with at least
// n strictly positive entries (a proper discount sequence).
struct DiscountSequence {
  std::vector<double> gammas;

  static DiscountSequence ones(long T);
  static DiscountSequence inverse_t(long T);
  void validate(int n_agents) const;  // throws ConfigError on violation
};

// Non-decreasing map from revenue to utility. Power shapes cover the
// risk-averse (p < 1) and risk-seeking (p > 1) cases; a user table is
// interpolated linearly and clamped outside its range.
struct UtilityFunction {
  enum class Shape { Identity, Power, Table };
  Shape shape = Shape::Identity;
  double p = 1.0;
  std::vector<std::pair<double, double>> table;  // sorted by x, y non-decreasing

  static UtilityFunction identity() { return {}; }
  static UtilityFunction power(double exponent);
  static UtilityFunction user_table(std::vector<std::pair<double, double>> points);

  double operator()(double v) const;
};

// One seeded episode reduced to checkpointed trajectories. Finals are exact:
// the last checkpoint is always T.
struct RunResult {
  std::vector<long> checkpoints;
  std::vector<double> regret;                       // cumulative pseudo-regret
  std::vector<std::vector<double>> agent_revenue;   // [agent slot][checkpoint]
  std::vector<std::vector<long>> agent_counts;      // [agent slot][checkpoint]
  std::uint64_t seed = 0;

  double final_regret() const { return regret.back(); }
  double final_revenue(int agent_id) const {
    return agent_revenue[static_cast<std::size_t>(agent_id - 1)].back();
  }
};

// series[t-1] = sum of Delta(A_s) for s <= t
std::vector<double> cumulative_regret(const History& history, const GapSummary& gaps);

// sum of gamma_t * R_t over rounds where the agent's arm was played
double agent_revenue(const History& history, int agent_id, const DiscountSequence& gamma);

struct UtilityEstimate {
  double mean = 0.0;
  double ci_half_width = 0.0;  // normal-approximation 95% interval
  double lo() const { return mean - ci_half_width; }
  double hi() const { return mean + ci_half_width; }
};

UtilityEstimate expected_utility(const std::vector<RunResult>& results, int agent_id,
                                 const UtilityFunction& U);
UtilityEstimate expected_utility(const std::vector<double>& revenues, const UtilityFunction& U);

// closed form of the logarithmic regret bound for H-UCB under equilibrium:
// sum_{Delta_i > 0} (8 / Delta_i) ln T + (1 + pi^2/3) sum_i Delta_i
double hucb_bound(const GapSummary& gaps, long T);

// leading sqrt(T) ln T terms of the RH-UCB bound with replicators; the
// O(ln^5 T) remainder carries no stated constant and is reported separately
struct RhucbBound {
  double leading = 0.0;
  bool precondition_ok = true;  // L >= 1/c
  std::string remainder_note = "plus an unquantified O(ln^5 T) remainder";
};

RhucbBound rhucb_bound(const GapSummary& gaps, long T, double L);

}  // namespace sbandit
