#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "sbandit/policies.hpp"
#include "test_util.hpp"

using namespace sbandit;
using testutil::StubSource;

namespace {

Instance toy(std::vector<double> means, std::vector<long> copies = {}) {
  std::vector<AgentProfile> p;
  for (std::size_t i = 0; i < means.size(); ++i)
    p.push_back(make_profile(static_cast<int>(i) + 1, {means[i]},
                             {copies.empty() ? 1 : copies[i]}));
  return build_instance(p);
}

PolicyState fresh(PolicyKind kind, const Instance& inst, long horizon = 1000,
                  PolicyHyper hyper = {}) {
  Rng init(11);
  return PolicyState(kind, inst, hyper, horizon, init);
}

// plays `rounds` rounds against fixed reward streams, returns pulled arms
std::vector<ArmId> play(PolicyState& st, const Instance& inst, long rounds,
                        std::uint64_t seed = 1) {
  Rng agent(derive_seed(seed, 0, "agent")), arm(derive_seed(seed, 0, "arm")),
      reward(derive_seed(seed, 0, "reward"));
  std::vector<ArmId> pulls;
  for (long t = 0; t < rounds; ++t) {
    ArmId a = st.select(agent, arm);
    st.update(a, draw_reward(inst.arms[static_cast<std::size_t>(a)], reward));
    pulls.push_back(a);
  }
  return pulls;
}

}  // namespace

TEST_CASE("index formulas match hand evaluation") {
  // UCB1 at t = e^2 with one zero-reward pull
  CHECK(ucb1_index(0.0, 1, std::exp(2.0)) == doctest::Approx(2.0).epsilon(1e-9));
  // agent index, R=0.5 N=4 t=100
  AgentStats s{4, 0.5};
  CHECK(hucb_agent_index(s, 100.0) == doctest::Approx(2.0174271294).epsilon(1e-9));
  CHECK(rhucb_agent_index(s, 100.0) == doctest::Approx(3.8930702122).epsilon(1e-9));
  // t=1 leaves only the empirical mean
  CHECK(hucb_agent_index(s, 1.0) == 0.5);
  CHECK(rhucb_agent_index(s, 1.0) == 0.5);
  CHECK(prhucb_agent_index(s, 1.0) == 0.5);
}

TEST_CASE("agent index decreases toward R as N grows") {
  double prev = 1e18;
  for (long N : {1L, 2L, 5L, 20L, 100L, 10000L}) {
    AgentStats s{N, 0.5};
    double v = hucb_agent_index(s, 50.0);
    CHECK(v < prev);
    CHECK(v > 0.5);
    prev = v;
  }
}

TEST_CASE("index monotonicity in t and n") {
  using IndexFn = double (*)(const AgentStats&, double);
  const IndexFn agent_indices[] = {hucb_agent_index, rhucb_agent_index, prhucb_agent_index};
  for (long n : {1L, 3L, 10L}) {
    double prev = -1.0;
    for (double t : {2.0, 5.0, 50.0, 5000.0}) {
      double v = ucb1_index(0.3, n, t);
      CHECK(v >= prev);
      prev = v;
    }
    for (IndexFn f : agent_indices) {
      double aprev = -1.0;
      for (double t : {2.0, 5.0, 50.0, 5000.0}) {
        double v = f({n, 0.3}, t);
        CHECK(v >= aprev);
        aprev = v;
      }
    }
  }
  for (double t : {2.0, 50.0, 5000.0}) {
    double prev = 1e18;
    for (long n : {1L, 2L, 4L, 16L, 256L}) {
      double v = ucb1_index(0.3, n, t);
      CHECK(v <= prev);
      prev = v;
    }
    for (IndexFn f : agent_indices) {
      double aprev = 1e18;
      for (long n : {1L, 2L, 4L, 16L, 256L}) {
        double v = f({n, 0.3}, t);
        CHECK(v <= aprev);
        aprev = v;
      }
    }
  }
}

TEST_CASE("ucb1 initialization is uniform over unexplored arms") {
  Instance inst = toy({0.2, 0.5, 0.8});
  // counting stub: enumerate every choose() outcome for the first pick
  std::map<ArmId, int> first_pick;
  for (std::size_t pick = 0; pick < 3; ++pick) {
    PolicyState st = fresh(PolicyKind::UCB1, inst);
    StubSource agent_rng, arm_rng({pick});
    ArmId a = st.select(agent_rng, arm_rng);
    CHECK(arm_rng.last_m == 3);
    first_pick[a] += 1;
  }
  CHECK(first_pick.size() == 3);  // each unexplored arm reachable exactly once
  for (const auto& [arm, count] : first_pick) CHECK(count == 1);
}

TEST_CASE("ucb1 selects the argmax once all arms are explored") {
  Instance inst = toy({0.2, 0.5, 0.8});
  PolicyState st = fresh(PolicyKind::UCB1, inst);
  StubSource stub;
  for (int a = 0; a < 3; ++a) {
    StubSource s({static_cast<std::size_t>(0)});
    ArmId got = st.select(stub, s);
    st.update(got, got == 2 ? 1 : 0);
  }
  // stats now: arm 2 has r=1 and dominates
  ArmId a = st.select(stub, stub);
  CHECK(a == 2);
  st.update(a, 1);
  CHECK(st.arm_stats(2).n == 2);
  CHECK(st.arm_stats(2).r == 1.0);
}

TEST_CASE("two identical arms tie and split selections about evenly") {
  Instance inst = build_instance({make_profile(1, {0.5}, {2})});
  PolicyState st = fresh(PolicyKind::UCB1, inst);
  Rng agent(3), armrng(17);
  long count0 = 0, rounds = 20000;
  for (long t = 0; t < rounds; ++t) {
    ArmId a = st.select(agent, armrng);
    // identical deterministic rewards keep the two copies tied forever
    st.update(a, 1);
    count0 += a == 0;
  }
  double frac = static_cast<double>(count0) / static_cast<double>(rounds);
  CHECK(std::abs(frac - 0.5) < 3.0 * 0.5 / std::sqrt(static_cast<double>(rounds)));
}

TEST_CASE("fair draws agents uniformly") {
  Instance inst = toy({0.5, 0.6, 0.7, 0.8, 0.9});
  PolicyState st = fresh(PolicyKind::FairUCB1, inst);
  Rng agent(5), armrng(6), reward(7);
  const long rounds = 100000;
  std::vector<long> per_agent(5, 0);
  for (long t = 0; t < rounds; ++t) {
    ArmId a = st.select(agent, armrng);
    st.update(a, draw_reward(inst.arms[static_cast<std::size_t>(a)], reward));
    per_agent[static_cast<std::size_t>(inst.agent_of(a) - 1)] += 1;
  }
  for (long c : per_agent) {
    double frac = static_cast<double>(c) / static_cast<double>(rounds);
    CHECK(std::abs(frac - 0.2) < 0.004);  // 3 sigma binomial interval
  }
}

TEST_CASE("fair with a single-arm agent always plays that arm when drawn") {
  Instance inst = toy({0.4, 0.9});
  PolicyState st = fresh(PolicyKind::FairUCB1, inst);
  Rng agent(1), armrng(2), reward(3);
  for (long t = 0; t < 500; ++t) {
    ArmId a = st.select(agent, armrng);
    int who = inst.agent_of(a);
    CHECK(inst.agent_arms(who)[0].arm_id == a);
    st.update(a, draw_reward(inst.arms[static_cast<std::size_t>(a)], reward));
  }
}

TEST_CASE("fair regret is linear on an extreme two-agent instance") {
  Instance inst = toy({1.0, 0.0});
  GapSummary gaps = summarize_gaps(inst);
  PolicyState st = fresh(PolicyKind::FairUCB1, inst);
  Rng agent(21), armrng(22), reward(23);
  const long T = 20000;
  double regret = 0.0;
  for (long t = 0; t < T; ++t) {
    ArmId a = st.select(agent, armrng);
    st.update(a, draw_reward(inst.arms[static_cast<std::size_t>(a)], reward));
    regret += gaps.per_arm_gap[static_cast<std::size_t>(a)];
  }
  // agent 2 is drawn half the time, each such round costs Delta = 1
  CHECK(regret / static_cast<double>(T) == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("sucb sample sizes") {
  CHECK(sucb_sample_size(5, 1.0, 22026) == 5);  // min clamp: l ln T = 10 > 5
  CHECK(sucb_sample_size(5005, 15.0, 10000) == 139);
  Instance inst = toy({0.5, 0.6, 0.7, 0.8, 0.9});
  Rng rng(3);
  auto sample = sucb_init(inst, 1.0, 22026, rng);
  CHECK(sample.size() == 5);
  std::set<ArmId> uniq(sample.begin(), sample.end());
  CHECK(uniq.size() == sample.size());
}

TEST_CASE("sucb never plays outside its sample") {
  Instance inst = build_instance({make_profile(1, {0.5}, {50}), make_profile(2, {0.9}, {1})});
  PolicyHyper hyper;
  hyper.l = 1.0;  // ceil(ln 200) = 6 of 51 arms
  PolicyState st = fresh(PolicyKind::SUCB, inst, 200, hyper);
  const auto& sample = st.subsample(0);
  CHECK(sample.size() == sucb_sample_size(51, 1.0, 200));
  std::set<ArmId> allowed(sample.begin(), sample.end());
  for (ArmId a : play(st, inst, 200)) CHECK(allowed.count(a) == 1);
}

TEST_CASE("rhucb subsample sizes and exclusivity") {
  CHECK(rhucb_sample_size(2000, 3.0, 22026) == 30);
  CHECK(rhucb_sample_size(10, 3.0, 22026) == 10);  // B_i = S_i when small
  Instance inst = build_instance({make_profile(1, {0.5}, {100}), make_profile(2, {0.9}, {1})});
  PolicyHyper hyper;
  hyper.L = 1.0;
  PolicyState st = fresh(PolicyKind::RHUCB, inst, 500, hyper);
  CHECK(st.subsample(1).size() == rhucb_sample_size(100, 1.0, 500));
  CHECK(st.subsample(2).size() == 1);
  std::set<ArmId> allowed;
  for (int i = 1; i <= 2; ++i)
    allowed.insert(st.subsample(i).begin(), st.subsample(i).end());
  for (ArmId a : play(st, inst, 500)) CHECK(allowed.count(a) == 1);
}

TEST_CASE("rhucb subsampling misses the best copy rarely when L >= 1/c") {
  // c = 0.5: 20 best-mean copies among 40 arms, L=2, T=100 -> sample 10
  Instance inst = build_instance({make_profile(1, {0.9, 0.3}, {20, 20})});
  Rng rng(2024);
  const int trials = 100000;
  int misses = 0;
  for (int i = 0; i < trials; ++i) {
    auto sets = rhucb_init(inst, 2.0, 100, rng);
    bool found = false;
    for (ArmId a : sets[0])
      if (inst.arms[static_cast<std::size_t>(a)].mean == 0.9) found = true;
    misses += !found;
  }
  double freq = static_cast<double>(misses) / trials;
  double sigma = std::sqrt(0.01 * 0.99 / trials);
  CHECK(freq <= 0.01 + 3.0 * sigma);
}

TEST_CASE("hucb initialization explores agents uniformly") {
  Instance inst = toy({0.2, 0.5, 0.8});
  std::map<int, int> first_agent;
  for (std::size_t pick = 0; pick < 3; ++pick) {
    PolicyState st = fresh(PolicyKind::HUCB, inst);
    StubSource agent_rng({pick}), arm_rng;
    ArmId a = st.select(agent_rng, arm_rng);
    CHECK(agent_rng.last_m == 3);
    first_agent[inst.agent_of(a)] += 1;
  }
  CHECK(first_agent.size() == 3);
}

TEST_CASE("hucb phase 2 is degenerate for a single-arm agent") {
  Instance inst = toy({0.3, 0.9});
  PolicyState st = fresh(PolicyKind::HUCB, inst);
  Rng agent(1), armrng(2), reward(3);
  for (long t = 0; t < 300; ++t) {
    ArmId a = st.select(agent, armrng);
    CHECK(inst.agent_arms(inst.agent_of(a))[0].arm_id == a);
    st.update(a, draw_reward(inst.arms[static_cast<std::size_t>(a)], reward));
  }
}

TEST_CASE("count conservation across every policy") {
  Instance inst = build_instance(
      {make_profile(1, {0.5, 0.2}, {3, 2}), make_profile(2, {0.8}, {4})});
  for (PolicyKind kind : {PolicyKind::HUCB, PolicyKind::RHUCB, PolicyKind::PRHUCB,
                          PolicyKind::FairUCB1, PolicyKind::UCB1}) {
    PolicyState st = fresh(kind, inst, 400);
    Rng agent(1), armrng(2), reward(3);
    for (long t = 1; t <= 400; ++t) {
      ArmId a = st.select(agent, armrng);
      st.update(a, draw_reward(inst.arms[static_cast<std::size_t>(a)], reward));
      long arm_total = 0, agent_total = 0;
      for (ArmId x = 0; x < inst.arm_count(); ++x) arm_total += st.arm_stats(x).n;
      for (int i = 1; i <= inst.n; ++i) agent_total += st.agent_stats(i).N;
      CHECK(arm_total == t);
      CHECK(agent_total == t);
      CHECK(st.rounds_completed() == t);
    }
  }
}

TEST_CASE("phase-1 choice is blind to replication under coupled streams") {
  // same means, one run with replicas: the selected-agent sequence must match
  for (PolicyKind kind : {PolicyKind::HUCB, PolicyKind::RHUCB, PolicyKind::PRHUCB}) {
    Instance base = toy({0.5, 0.8, 0.65});
    Instance replicated = toy({0.5, 0.8, 0.65}, {7, 1, 3});
    PolicyState st_a = fresh(kind, base, 600);
    PolicyState st_b = fresh(kind, replicated, 600);
    Rng agent_a(101), arm_a(202), reward_a(303);
    Rng agent_b(101), arm_b(202), reward_b(303);
    for (long t = 0; t < 600; ++t) {
      ArmId a = st_a.select(agent_a, arm_a);
      ArmId b = st_b.select(agent_b, arm_b);
      CHECK(base.agent_of(a) == replicated.agent_of(b));
      int rw_a = draw_reward(base.arms[static_cast<std::size_t>(a)], reward_a);
      int rw_b = draw_reward(replicated.arms[static_cast<std::size_t>(b)], reward_b);
      CHECK(rw_a == rw_b);  // same mean, coupled stream
      st_a.update(a, rw_a);
      st_b.update(b, rw_b);
    }
  }
}

TEST_CASE("rhucb phase-1 bonus is larger than hucb's") {
  AgentStats s{10, 0.5};
  for (double t : {10.0, 100.0, 10000.0})
    CHECK(rhucb_agent_index(s, t) > hucb_agent_index(s, t));
}

TEST_CASE("prhucb grows its subsample within the ln^2 t budget") {
  Instance inst = build_instance({make_profile(1, {0.5}, {40}), make_profile(2, {0.8}, {40})});
  PolicyState st = fresh(PolicyKind::PRHUCB, inst, 4000);
  Rng agent(31), armrng(32), reward(33);
  for (long t = 1; t <= 4000; ++t) {
    // bound checked on the state entering round t
    double lt = std::log(static_cast<double>(t));
    double cap = std::max(1.0, std::ceil(lt * lt));
    for (int i = 1; i <= 2; ++i) {
      auto sz = static_cast<double>(st.subsample(i).size());
      CHECK(sz <= std::min(40.0, cap));
    }
    ArmId a = st.select(agent, armrng);
    st.update(a, draw_reward(inst.arms[static_cast<std::size_t>(a)], reward));
  }
  CHECK(st.subsample(1).size() >= 10);
  CHECK(st.subsample(2).size() >= 10);
}

TEST_CASE("prhucb subsample is non-decreasing and single-arm agents stick") {
  Instance inst = build_instance({make_profile(1, {0.6}, {1}), make_profile(2, {0.4}, {30})});
  PolicyState st = fresh(PolicyKind::PRHUCB, inst, 2000);
  Rng agent(41), armrng(42), reward(43);
  std::size_t prev1 = 0, prev2 = 0;
  for (long t = 0; t < 2000; ++t) {
    ArmId a = st.select(agent, armrng);
    st.update(a, draw_reward(inst.arms[static_cast<std::size_t>(a)], reward));
    CHECK(st.subsample(1).size() >= prev1);
    CHECK(st.subsample(2).size() >= prev2);
    prev1 = st.subsample(1).size();
    prev2 = st.subsample(2).size();
    CHECK(st.subsample(1).size() <= 1);
  }
  CHECK(st.subsample(1).size() == 1);
  CHECK(st.subsample(1)[0] == 0);
}

TEST_CASE("policy_update incremental means are exact") {
  Instance inst = toy({0.5});
  PolicyState st = fresh(PolicyKind::UCB1, inst);
  StubSource stub;
  ArmId a = st.select(stub, stub);
  st.update(a, 1);
  CHECK(st.arm_stats(0).n == 1);
  CHECK(st.arm_stats(0).r == 1.0);
  // r=0.5 after two pulls, then reward 1 -> 2/3
  a = st.select(stub, stub);
  st.update(a, 0);
  CHECK(st.arm_stats(0).r == 0.5);
  a = st.select(stub, stub);
  st.update(a, 1);
  CHECK(st.arm_stats(0).r == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("running means equal recomputed means within 1e-12") {
  Rng meta(777);
  for (int trial = 0; trial < 50; ++trial) {
    Instance inst = build_instance(testutil::random_profiles(meta));
    PolicyState st = fresh(PolicyKind::HUCB, inst, 300);
    Rng agent(trial), armrng(trial + 1), reward(trial + 2);
    std::vector<std::vector<int>> seen(static_cast<std::size_t>(inst.arm_count()));
    for (long t = 0; t < 300; ++t) {
      ArmId a = st.select(agent, armrng);
      int rw = draw_reward(inst.arms[static_cast<std::size_t>(a)], reward);
      st.update(a, rw);
      seen[static_cast<std::size_t>(a)].push_back(rw);
    }
    for (ArmId a = 0; a < inst.arm_count(); ++a) {
      const auto& rewards = seen[static_cast<std::size_t>(a)];
      if (rewards.empty()) continue;
      double mean = 0.0;
      for (int r : rewards) mean += r;
      mean /= static_cast<double>(rewards.size());
      CHECK(std::abs(st.arm_stats(a).r - mean) < 1e-12);
      CHECK(st.arm_stats(a).n == static_cast<long>(rewards.size()));
    }
  }
}

TEST_CASE("update protocol violations throw") {
  Instance inst = toy({0.5, 0.6});
  PolicyState st = fresh(PolicyKind::UCB1, inst);
  StubSource stub;
  CHECK_THROWS_AS(st.update(0, 1), StaleUpdateError);
  ArmId a = st.select(stub, stub);
  CHECK_THROWS_AS(st.select(stub, stub), StaleUpdateError);
  st.update(a, 1);
  CHECK_THROWS_AS(st.update(a, 1), StaleUpdateError);
}

TEST_CASE("deterministic replay: same seeds give identical pull sequences") {
  Instance inst = build_instance(
      {make_profile(1, {0.5, 0.3}, {2, 3}), make_profile(2, {0.8}, {2})});
  for (PolicyKind kind : {PolicyKind::UCB1, PolicyKind::FairUCB1, PolicyKind::SUCB,
                          PolicyKind::HUCB, PolicyKind::RHUCB, PolicyKind::PRHUCB}) {
    Rng init_a(55), init_b(55);
    PolicyHyper hyper;
    PolicyState st_a(kind, inst, hyper, 300, init_a);
    PolicyState st_b(kind, inst, hyper, 300, init_b);
    auto pulls_a = play(st_a, inst, 300, 99);
    auto pulls_b = play(st_b, inst, 300, 99);
    CHECK(pulls_a == pulls_b);
  }
}

TEST_CASE("selection_distribution matches select() sampling") {
  Instance inst = build_instance({make_profile(1, {0.6}, {2}), make_profile(2, {0.4}, {1})});
  for (PolicyKind kind : {PolicyKind::UCB1, PolicyKind::FairUCB1, PolicyKind::HUCB}) {
    PolicyState st = fresh(kind, inst, 100);
    Rng agent(1), armrng(2), reward(3);
    for (int t = 0; t < 5; ++t) {
      ArmId a = st.select(agent, armrng);
      st.update(a, draw_reward(inst.arms[static_cast<std::size_t>(a)], reward));
    }
    auto dist = st.selection_distribution();
    double mass = 0.0;
    for (auto [arm, p] : dist) mass += p;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));

    std::map<ArmId, long> counts;
    const long trials = 200000;
    for (long i = 0; i < trials; ++i) {
      PolicyState copy = st;
      Rng a_rng(1000 + i), r_rng(2000 + i);
      counts[copy.select(a_rng, r_rng)] += 1;
    }
    for (auto [arm, p] : dist) {
      double freq = static_cast<double>(counts[arm]) / trials;
      double sigma = std::sqrt(p * (1 - p) / trials);
      CHECK(std::abs(freq - p) <= 3.5 * sigma + 1e-9);
    }
  }
}
