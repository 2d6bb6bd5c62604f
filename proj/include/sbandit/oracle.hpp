#pragma once

#include <vector>

#include "sbandit/policies.hpp"

namespace sbandit {

// Distribution of an agent's t-count N_{S_i,t} on the integer support [0, t].
struct ExactDistribution {
  std::vector<double> pmf;  // index = count

  double total_mass() const;
  // largest absolute CDF difference against another distribution
  double cdf_distance(const ExactDistribution& other) const;
};

enum class Dominance { StrictlyDominates, Dominates, Incomparable };

// CDF-wise comparison of A against B at tolerance 1e-9: A dominates B when
// P[A <= x] <= P[B <= x] everywhere, strictly when some point is strictly lower.
Dominance dominance_check(const ExactDistribution& A, const ExactDistribution& B);

inline constexpr double kCdfTolerance = 1e-9;
inline constexpr double kPathGuard = 1e7;

struct EnumerationResult {
  // dist[agent slot][t-1] for t = 1..t_max
  std::vector<std::vector<ExactDistribution>> per_agent;
  int t_max = 0;
};

// Exhaustively enumerates every Bernoulli reward realization, every uniform
// initialization/tie branch, and (for RH-UCB / S-UCB) every subsample, and
// returns the exact per-agent selection-count distribution at each round.
// Throws TooLargeError when the path-count guard would be exceeded.
EnumerationResult enumerate_exact(const Instance& instance, PolicyKind kind,
                                  const PolicyHyper& hyper, long horizon, int t_max);

struct AgentDominanceReport {
  int agent_id = 0;
  std::vector<Dominance> per_round;     // duplicated variant vs base, t = 1..t_max
  std::vector<double> cdf_distance;     // max CDF gap per round
  bool dominates_every_round = false;
  bool strict_at_some_round = false;
  bool equal_every_round = false;       // within kCdfTolerance
};

struct ProofnessReport {
  PolicyKind kind{};
  int t_max = 0;
  std::vector<AgentDominanceReport> agents;

  bool all_equal() const;            // proofness evidence
  bool all_strictly_dominated() const;  // proneness evidence
};

// For each agent: duplicates that agent's entire strategy once, enumerates
// both processes exactly, and reports the dominance direction of the agent's
// t-count per round.
ProofnessReport proneness_certificate(const Instance& instance, PolicyKind kind,
                                      const PolicyHyper& hyper, long horizon, int t_max);

}  // namespace sbandit
