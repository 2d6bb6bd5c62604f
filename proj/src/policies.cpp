#include "sbandit/policies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sbandit {

const char* policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::UCB1: return "ucb1";
    case PolicyKind::FairUCB1: return "fair";
    case PolicyKind::SUCB: return "sucb";
    case PolicyKind::HUCB: return "hucb";
    case PolicyKind::RHUCB: return "rhucb";
    case PolicyKind::PRHUCB: return "prhucb";
  }
  return "?";
}

PolicyKind parse_policy(const std::string& name) {
  if (name == "ucb1") return PolicyKind::UCB1;
  if (name == "fair") return PolicyKind::FairUCB1;
  if (name == "sucb") return PolicyKind::SUCB;
  if (name == "hucb") return PolicyKind::HUCB;
  if (name == "rhucb") return PolicyKind::RHUCB;
  if (name == "prhucb") return PolicyKind::PRHUCB;
  throw ConfigError("unknown policy '" + name + "'");
}

std::size_t sucb_sample_size(long total_arms, double l, long T) {
  double want = std::ceil(l * ln_pos(static_cast<double>(T)));
  return static_cast<std::size_t>(std::min(static_cast<double>(total_arms), want));
}

std::size_t rhucb_sample_size(long agent_arms, double L, long T) {
  double want = std::ceil(L * ln_pos(static_cast<double>(T)));
  return static_cast<std::size_t>(std::min(static_cast<double>(agent_arms), want));
}

namespace {

bool is_flat(PolicyKind k) { return k == PolicyKind::UCB1 || k == PolicyKind::SUCB; }

}  // namespace

PolicyState::PolicyState(PolicyKind kind, const Instance& instance, const PolicyHyper& hyper,
                         long horizon, RandomSource& init_rng)
    : inst_(&instance), kind_(kind), hyper_(hyper), horizon_(horizon) {
  init_stats();
  init_active(&init_rng, nullptr);
}

PolicyState::PolicyState(PolicyKind kind, const Instance& instance, const PolicyHyper& hyper,
                         long horizon, const std::vector<std::vector<ArmId>>& fixed_active)
    : inst_(&instance), kind_(kind), hyper_(hyper), horizon_(horizon) {
  init_stats();
  init_active(nullptr, &fixed_active);
}

void PolicyState::init_stats() {
  auto arm_count = static_cast<std::size_t>(inst_->arm_count());
  auto n_agents = static_cast<std::size_t>(inst_->n);
  n_.assign(arm_count, 0);
  sum_.assign(arm_count, 0.0);
  mean_.assign(arm_count, 0.0);
  inv_sqrt_n_.assign(arm_count, 0.0);
  N_.assign(n_agents, 0);
  agent_sum_.assign(n_agents, 0.0);
  agent_mean_.assign(n_agents, 0.0);
  active_flag_.assign(arm_count, 0);
}

void PolicyState::init_active(RandomSource* init_rng,
                              const std::vector<std::vector<ArmId>>* fixed) {
  auto arm_count = static_cast<std::size_t>(inst_->arm_count());
  auto n_agents = static_cast<std::size_t>(inst_->n);
  if (is_flat(kind_)) {
    active_.resize(1);
    if (kind_ == PolicyKind::UCB1) {
      active_[0].resize(arm_count);
      for (std::size_t a = 0; a < arm_count; ++a) active_[0][a] = static_cast<ArmId>(a);
    } else if (fixed) {
      active_[0] = fixed->at(0);
      if (active_[0].empty()) throw ConfigError("S-UCB sample is empty");
    } else {
      if (hyper_.l <= 0.0) throw ConfigError("S-UCB requires l > 0");
      std::size_t m = sucb_sample_size(inst_->arm_count(), hyper_.l, horizon_);
      if (m == 0) throw ConfigError("S-UCB sample is empty (horizon too small)");
      active_[0] = sucb_init(*inst_, hyper_.l, horizon_, *init_rng);
    }
    for (ArmId a : active_[0]) active_flag_[static_cast<std::size_t>(a)] = 1;
    unexplored_flat_ = static_cast<long>(active_[0].size());
    return;
  }

  active_.resize(n_agents);
  unexplored_agent_.assign(n_agents, 0);
  if (kind_ == PolicyKind::PRHUCB) prh_remaining_.resize(n_agents);
  for (int i = 1; i <= inst_->n; ++i) {
    auto slot = static_cast<std::size_t>(i - 1);
    ArmId begin = inst_->agent_begin[slot];
    long count = inst_->agent_arm_count(i);
    switch (kind_) {
      case PolicyKind::FairUCB1:
      case PolicyKind::HUCB: {
        active_[slot].resize(static_cast<std::size_t>(count));
        for (long j = 0; j < count; ++j) active_[slot][static_cast<std::size_t>(j)] = begin + j;
        break;
      }
      case PolicyKind::RHUCB: {
        if (hyper_.L <= 0.0) throw ConfigError("RH-UCB requires L > 0");
        std::size_t m = rhucb_sample_size(count, hyper_.L, horizon_);
        if (m == 0) throw ConfigError("RH-UCB subsample is empty (horizon too small)");
        if (fixed) {
          active_[slot] = fixed->at(slot);
        } else {
          auto local = sample_without_replacement(static_cast<std::size_t>(count), m, *init_rng);
          active_[slot].reserve(m);
          for (ArmId j : local) active_[slot].push_back(begin + j);
        }
        break;
      }
      case PolicyKind::PRHUCB: {
        auto& rem = prh_remaining_[slot];
        rem.resize(static_cast<std::size_t>(count));
        for (long j = 0; j < count; ++j) rem[static_cast<std::size_t>(j)] = begin + j;
        break;
      }
      default: break;
    }
    for (ArmId a : active_[slot]) active_flag_[static_cast<std::size_t>(a)] = 1;
    unexplored_agent_[slot] = static_cast<long>(active_[slot].size());
  }
}

std::vector<ArmId> sucb_init(const Instance& instance, double l, long T, RandomSource& rng) {
  std::size_t m = sucb_sample_size(instance.arm_count(), l, T);
  return sample_without_replacement(static_cast<std::size_t>(instance.arm_count()), m, rng);
}

std::vector<std::vector<ArmId>> rhucb_init(const Instance& instance, double L, long T,
                                           RandomSource& rng) {
  std::vector<std::vector<ArmId>> out(static_cast<std::size_t>(instance.n));
  for (int i = 1; i <= instance.n; ++i) {
    long count = instance.agent_arm_count(i);
    std::size_t m = rhucb_sample_size(count, L, T);
    auto local = sample_without_replacement(static_cast<std::size_t>(count), m, rng);
    auto& dst = out[static_cast<std::size_t>(i - 1)];
    dst.reserve(m);
    for (ArmId j : local) dst.push_back(instance.agent_begin[static_cast<std::size_t>(i - 1)] + j);
  }
  return out;
}

ArmStats PolicyState::arm_stats(ArmId a) const {
  auto idx = static_cast<std::size_t>(a);
  return {n_[idx], mean_[idx]};
}

AgentStats PolicyState::agent_stats(int agent_id) const {
  auto slot = static_cast<std::size_t>(agent_id - 1);
  return {N_[slot], agent_mean_[slot]};
}

const std::vector<ArmId>& PolicyState::subsample(int agent_id) const {
  if (is_flat(kind_)) return active_[0];
  return active_[static_cast<std::size_t>(agent_id - 1)];
}

bool PolicyState::prh_can_grow(int agent_id) const {
  auto slot = static_cast<std::size_t>(agent_id - 1);
  const auto& B = active_[slot];
  if (static_cast<long>(B.size()) >= inst_->agent_arm_count(agent_id)) return false;
  // the agent-initialization round always admits one arm, so B_i is never
  // empty once the agent has been selected; afterwards growth follows ln^2 t
  if (B.empty()) return true;
  double lt = ln_pos(static_cast<double>(t_));
  return static_cast<double>(B.size()) < lt * lt;
}

void PolicyState::argmax_arms(const std::vector<ArmId>& arms, double bonus_scale,
                              std::vector<ArmId>& out) const {
  double best = -1.0;
  for (ArmId a : arms) {
    auto idx = static_cast<std::size_t>(a);
    double v = mean_[idx] + bonus_scale * inv_sqrt_n_[idx];
    if (v > best) best = v;
  }
  out.clear();
  double cut = best - kTieTolerance;
  for (ArmId a : arms) {
    auto idx = static_cast<std::size_t>(a);
    if (mean_[idx] + bonus_scale * inv_sqrt_n_[idx] >= cut) out.push_back(a);
  }
}

void PolicyState::flat_candidates(std::vector<ArmId>& out) const {
  const auto& arms = active_[0];
  if (unexplored_flat_ > 0) {
    out.clear();
    for (ArmId a : arms)
      if (n_[static_cast<std::size_t>(a)] == 0) out.push_back(a);
    return;
  }
  double scale = std::sqrt(2.0 * ln_pos(static_cast<double>(t_)));
  argmax_arms(arms, scale, out);
}

void PolicyState::phase1_candidates(std::vector<int>& out) const {
  out.clear();
  if (kind_ == PolicyKind::FairUCB1) {
    for (int i = 1; i <= inst_->n; ++i) out.push_back(i);
    return;
  }
  for (int i = 1; i <= inst_->n; ++i)
    if (N_[static_cast<std::size_t>(i - 1)] == 0) out.push_back(i);
  if (!out.empty()) return;

  double td = static_cast<double>(t_);
  auto index_of = [&](std::size_t slot) {
    AgentStats s{N_[slot], agent_mean_[slot]};
    switch (kind_) {
      case PolicyKind::HUCB: return hucb_agent_index(s, td);
      case PolicyKind::RHUCB: return rhucb_agent_index(s, td);
      case PolicyKind::PRHUCB: return prhucb_agent_index(s, td);
      default: return 0.0;
    }
  };
  double best = -1.0;
  for (int i = 0; i < inst_->n; ++i) best = std::max(best, index_of(static_cast<std::size_t>(i)));
  double cut = best - kTieTolerance;
  for (int i = 0; i < inst_->n; ++i)
    if (index_of(static_cast<std::size_t>(i)) >= cut) out.push_back(i + 1);
}

bool PolicyState::phase2_candidates(int agent_id, std::vector<ArmId>& out) const {
  auto slot = static_cast<std::size_t>(agent_id - 1);
  if (kind_ == PolicyKind::PRHUCB && prh_can_grow(agent_id)) {
    out = prh_remaining_[slot];
    return true;
  }
  const auto& arms = active_[slot];
  if (unexplored_agent_[slot] > 0) {
    out.clear();
    for (ArmId a : arms)
      if (n_[static_cast<std::size_t>(a)] == 0) out.push_back(a);
    return false;
  }
  double clock;
  if (kind_ == PolicyKind::FairUCB1)
    clock = hyper_.fair_global_clock ? static_cast<double>(t_)
                                     : static_cast<double>(N_[slot] + 1);
  else
    clock = static_cast<double>(N_[slot]);  // N(i) before this round's update
  argmax_arms(arms, std::sqrt(2.0 * ln_pos(clock)), out);
  return false;
}

template <class T>
const T& PolicyState::pick(const std::vector<T>& candidates, RandomSource& rng) const {
  if (hyper_.tie == TieBreak::FirstCandidate) return candidates.front();
  return candidates[rng.choose(candidates.size())];
}

ArmId PolicyState::select(RandomSource& agent_rng, RandomSource& arm_rng) {
  if (pending_ != -1)
    throw StaleUpdateError("select() called while an update is pending");
  ArmId arm;
  if (is_flat(kind_)) {
    flat_candidates(scratch_arms_);
    arm = pick(scratch_arms_, arm_rng);
  } else {
    phase1_candidates(scratch_agents_);
    int agent = pick(scratch_agents_, agent_rng);
    phase2_candidates(agent, scratch_arms_);
    arm = pick(scratch_arms_, arm_rng);
  }
  force_select(arm);
  return arm;
}

void PolicyState::force_select(ArmId arm) {
  if (pending_ != -1)
    throw StaleUpdateError("force_select() called while an update is pending");
  auto idx = static_cast<std::size_t>(arm);
  if (kind_ == PolicyKind::PRHUCB && !active_flag_[idx]) {
    // growth pick: admit the arm into B_i
    auto slot = static_cast<std::size_t>(inst_->agent_of(arm) - 1);
    active_[slot].push_back(arm);
    active_flag_[idx] = 1;
    ++unexplored_agent_[slot];
    auto& rem = prh_remaining_[slot];
    auto it = std::find(rem.begin(), rem.end(), arm);
    rem.erase(it);
  }
  pending_ = arm;
}

void PolicyState::update(ArmId arm, int reward) {
  if (pending_ == -1)
    throw StaleUpdateError("update() called twice for one select");
  if (arm != pending_)
    throw StaleUpdateError("update() arm does not match the pending selection");
  auto idx = static_cast<std::size_t>(arm);
  long n0 = n_[idx];
  n_[idx] = n0 + 1;
  sum_[idx] += reward;
  mean_[idx] = sum_[idx] / static_cast<double>(n_[idx]);
  inv_sqrt_n_[idx] = 1.0 / std::sqrt(static_cast<double>(n_[idx]));
  if (n0 == 0 && active_flag_[idx]) {
    if (is_flat(kind_))
      --unexplored_flat_;
    else
      --unexplored_agent_[static_cast<std::size_t>(inst_->agent_of(arm) - 1)];
  }
  auto slot = static_cast<std::size_t>(inst_->agent_of(arm) - 1);
  N_[slot] += 1;
  agent_sum_[slot] += reward;
  agent_mean_[slot] = agent_sum_[slot] / static_cast<double>(N_[slot]);
  ++t_;
  pending_ = -1;
}

std::vector<std::pair<ArmId, double>> PolicyState::selection_distribution() const {
  std::vector<std::pair<ArmId, double>> out;
  auto effective = [&](std::size_t m) {
    return hyper_.tie == TieBreak::FirstCandidate ? std::size_t{1} : m;
  };
  if (is_flat(kind_)) {
    std::vector<ArmId> cands;
    flat_candidates(cands);
    std::size_t m = effective(cands.size());
    for (std::size_t j = 0; j < m; ++j) out.emplace_back(cands[j], 1.0 / static_cast<double>(m));
    return out;
  }
  std::vector<int> agents;
  phase1_candidates(agents);
  std::size_t m1 = effective(agents.size());
  std::vector<ArmId> arms;
  for (std::size_t i = 0; i < m1; ++i) {
    phase2_candidates(agents[i], arms);
    std::size_t m2 = effective(arms.size());
    double p = 1.0 / (static_cast<double>(m1) * static_cast<double>(m2));
    for (std::size_t j = 0; j < m2; ++j) out.emplace_back(arms[j], p);
  }
  return out;
}

}  // namespace sbandit
