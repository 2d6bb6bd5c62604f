#include "sbandit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace sbandit {

double ExactDistribution::total_mass() const {
  double s = 0.0;
  for (double p : pmf) s += p;
  return s;
}

double ExactDistribution::cdf_distance(const ExactDistribution& other) const {
  std::size_t m = std::max(pmf.size(), other.pmf.size());
  double cdf_a = 0.0, cdf_b = 0.0, worst = 0.0;
  for (std::size_t x = 0; x < m; ++x) {
    if (x < pmf.size()) cdf_a += pmf[x];
    if (x < other.pmf.size()) cdf_b += other.pmf[x];
    worst = std::max(worst, std::abs(cdf_a - cdf_b));
  }
  return worst;
}

Dominance dominance_check(const ExactDistribution& A, const ExactDistribution& B) {
  std::size_t m = std::max(A.pmf.size(), B.pmf.size());
  double cdf_a = 0.0, cdf_b = 0.0;
  bool everywhere = true, strict = false;
  for (std::size_t x = 0; x < m; ++x) {
    if (x < A.pmf.size()) cdf_a += A.pmf[x];
    if (x < B.pmf.size()) cdf_b += B.pmf[x];
    if (cdf_a > cdf_b + kCdfTolerance) everywhere = false;
    if (cdf_a < cdf_b - kCdfTolerance) strict = true;
  }
  if (!everywhere) return Dominance::Incomparable;
  return strict ? Dominance::StrictlyDominates : Dominance::Dominates;
}

namespace {

double binomial_coefficient(long n, long k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (long j = 1; j <= k; ++j) c *= static_cast<double>(n - k + j) / static_cast<double>(j);
  return c;
}

// number of uniform subsample assignments the policy draws at init time
double subsample_combinations(const Instance& inst, PolicyKind kind, const PolicyHyper& hyper,
                              long horizon) {
  if (kind == PolicyKind::SUCB) {
    auto m = static_cast<long>(sucb_sample_size(inst.arm_count(), hyper.l, horizon));
    return binomial_coefficient(inst.arm_count(), m);
  }
  if (kind == PolicyKind::RHUCB) {
    double c = 1.0;
    for (int i = 1; i <= inst.n; ++i) {
      long cnt = inst.agent_arm_count(i);
      auto m = static_cast<long>(rhucb_sample_size(cnt, hyper.L, horizon));
      c *= binomial_coefficient(cnt, m);
    }
    return c;
  }
  return 1.0;
}

void check_path_guard(const Instance& inst, PolicyKind kind, const PolicyHyper& hyper,
                      long horizon, int t_max) {
  double bound = subsample_combinations(inst, kind, hyper, horizon);
  double per_round = 2.0 * static_cast<double>(std::max<ArmId>(1, inst.arm_count()));
  for (int t = 0; t < t_max; ++t) {
    bound *= per_round;
    if (bound > kPathGuard)
      throw TooLargeError("enumerate_exact: path bound exceeds " +
                          std::to_string(static_cast<long>(kPathGuard)) + " (" +
                          std::to_string(inst.arm_count()) + " arms, t_max " +
                          std::to_string(t_max) + ")");
  }
}

// all k-subsets of [0, n), lexicographic
void for_each_combination(long n, long k, const std::function<void(const std::vector<ArmId>&)>& fn) {
  std::vector<ArmId> pick(static_cast<std::size_t>(k));
  std::function<void(long, long)> rec = [&](long start, long depth) {
    if (depth == k) {
      fn(pick);
      return;
    }
    for (long v = start; v <= n - (k - depth); ++v) {
      pick[static_cast<std::size_t>(depth)] = static_cast<ArmId>(v);
      rec(v + 1, depth + 1);
    }
  };
  if (k == 0)
    fn(pick);
  else
    rec(0, 0);
}

class Enumerator {
 public:
  Enumerator(const Instance& inst, int t_max) : inst_(inst), t_max_(t_max) {
    res_.t_max = t_max;
    res_.per_agent.resize(static_cast<std::size_t>(inst.n));
    for (auto& rounds : res_.per_agent) {
      rounds.resize(static_cast<std::size_t>(t_max));
      for (int t = 1; t <= t_max; ++t)
        rounds[static_cast<std::size_t>(t - 1)].pmf.assign(static_cast<std::size_t>(t) + 1, 0.0);
    }
    counts_.assign(static_cast<std::size_t>(inst.n), 0);
  }

  void walk(const PolicyState& state, double prob) {
    int t = static_cast<int>(state.t());
    if (t > t_max_) return;
    auto branches = state.selection_distribution();
    for (const auto& [arm, p_sel] : branches) {
      double mu = inst_.arms[static_cast<std::size_t>(arm)].mean;
      auto slot = static_cast<std::size_t>(inst_.agent_of(arm) - 1);
      for (int reward : {1, 0}) {
        double p_r = reward ? mu : 1.0 - mu;
        if (p_r <= 0.0) continue;
        double p = prob * p_sel * p_r;
        PolicyState child = state;
        child.force_select(arm);
        child.update(arm, reward);
        ++counts_[slot];
        for (std::size_t i = 0; i < counts_.size(); ++i)
          res_.per_agent[i][static_cast<std::size_t>(t - 1)]
              .pmf[static_cast<std::size_t>(counts_[i])] += p;
        walk(child, p);
        --counts_[slot];
      }
    }
  }

  EnumerationResult take() { return std::move(res_); }

 private:
  const Instance& inst_;
  int t_max_;
  EnumerationResult res_;
  std::vector<long> counts_;
};

}  // namespace

EnumerationResult enumerate_exact(const Instance& instance, PolicyKind kind,
                                  const PolicyHyper& hyper, long horizon, int t_max) {
  check_path_guard(instance, kind, hyper, horizon, t_max);
  Enumerator en(instance, t_max);

  if (kind == PolicyKind::SUCB) {
    auto m = static_cast<long>(sucb_sample_size(instance.arm_count(), hyper.l, horizon));
    double total = binomial_coefficient(instance.arm_count(), m);
    for_each_combination(instance.arm_count(), m, [&](const std::vector<ArmId>& set) {
      PolicyState st(kind, instance, hyper, horizon, std::vector<std::vector<ArmId>>{set});
      en.walk(st, 1.0 / total);
    });
  } else if (kind == PolicyKind::RHUCB) {
    // independent uniform subsamples per agent: enumerate the product space
    std::vector<std::vector<ArmId>> chosen(static_cast<std::size_t>(instance.n));
    double total = subsample_combinations(instance, kind, hyper, horizon);
    std::function<void(int)> per_agent = [&](int agent) {
      if (agent > instance.n) {
        PolicyState st(kind, instance, hyper, horizon, chosen);
        en.walk(st, 1.0 / total);
        return;
      }
      long cnt = instance.agent_arm_count(agent);
      auto m = static_cast<long>(rhucb_sample_size(cnt, hyper.L, horizon));
      ArmId begin = instance.agent_begin[static_cast<std::size_t>(agent - 1)];
      for_each_combination(cnt, m, [&](const std::vector<ArmId>& local) {
        auto& dst = chosen[static_cast<std::size_t>(agent - 1)];
        dst.clear();
        for (ArmId j : local) dst.push_back(begin + j);
        per_agent(agent + 1);
      });
    };
    per_agent(1);
  } else {
    // no init-time randomness for the other policies
    Rng unused(0);
    PolicyState st(kind, instance, hyper, horizon, unused);
    en.walk(st, 1.0);
  }
  return en.take();
}

bool ProofnessReport::all_equal() const {
  for (const auto& a : agents)
    if (!a.equal_every_round) return false;
  return true;
}

bool ProofnessReport::all_strictly_dominated() const {
  for (const auto& a : agents)
    if (!(a.dominates_every_round && a.strict_at_some_round)) return false;
  return true;
}

ProofnessReport proneness_certificate(const Instance& instance, PolicyKind kind,
                                      const PolicyHyper& hyper, long horizon, int t_max) {
  ProofnessReport report;
  report.kind = kind;
  report.t_max = t_max;
  auto base = enumerate_exact(instance, kind, hyper, horizon, t_max);

  for (int i = 1; i <= instance.n; ++i) {
    auto profiles = instance.agents;
    for (auto& c : profiles[static_cast<std::size_t>(i - 1)].copy_counts) c *= 2;
    Instance variant = build_instance(profiles);
    auto dup = enumerate_exact(variant, kind, hyper, horizon, t_max);

    AgentDominanceReport ar;
    ar.agent_id = i;
    ar.dominates_every_round = true;
    ar.equal_every_round = true;
    for (int t = 1; t <= t_max; ++t) {
      const auto& d_base = base.per_agent[static_cast<std::size_t>(i - 1)]
                                         [static_cast<std::size_t>(t - 1)];
      const auto& d_dup = dup.per_agent[static_cast<std::size_t>(i - 1)]
                                       [static_cast<std::size_t>(t - 1)];
      Dominance rel = dominance_check(d_dup, d_base);
      ar.per_round.push_back(rel);
      ar.cdf_distance.push_back(d_dup.cdf_distance(d_base));
      if (rel == Dominance::Incomparable) ar.dominates_every_round = false;
      if (rel == Dominance::StrictlyDominates) ar.strict_at_some_round = true;
      if (ar.cdf_distance.back() > kCdfTolerance) ar.equal_every_round = false;
    }
    report.agents.push_back(std::move(ar));
  }
  return report;
}

}  // namespace sbandit
