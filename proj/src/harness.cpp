#include "sbandit/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "sbandit/build_info.hpp"

namespace sbandit {

PolicyHyper PolicySpec::resolve(const Instance& instance, const GapSummary& gaps) const {
  PolicyHyper h;
  h.fair_global_clock = fair_global_clock;
  h.tie = tie;
  h.l = l ? *l : static_cast<double>(instance.total_original_count());
  if (L) {
    h.L = *L;
  } else {
    // smallest integer honoring the Theorem-5 precondition L >= 1/c
    double c = gaps.best_fraction;
    h.L = c > 0.0 ? std::max(1.0, std::ceil(1.0 / c - 1e-12)) : 1.0;
  }
  return h;
}

DiscountSequence DiscountSpec::build(long T) const {
  return kind == Kind::Ones ? DiscountSequence::ones(T) : DiscountSequence::inverse_t(T);
}

UtilityFunction UtilitySpec::build() const {
  return kind == Kind::Identity ? UtilityFunction::identity() : UtilityFunction::power(p);
}

void ScenarioConfig::validate() const {
  if (agents.empty()) throw ConfigError(name + ": no agents configured");
  if (reps < 1) throw ConfigError(name + ": reps must be >= 1");
  if (T < static_cast<long>(agents.size()))
    throw ConfigError(name + ": horizon T must be at least the agent count");
  if (sweep_agent < 1 || sweep_agent > static_cast<int>(agents.size()))
    throw ConfigError(name + ": sweep_agent out of range");
}

std::vector<long> checkpoint_rounds(long T) {
  std::set<long> s;
  for (long t = 1; t <= std::min<long>(T, 64); ++t) s.insert(t);
  double g = 64.0;
  while (g < static_cast<double>(T)) {
    g *= 1.15;
    s.insert(std::min(T, static_cast<long>(g)));
  }
  for (long p = 10; p > 0 && p <= T; p *= 10) s.insert(p);
  s.insert(T);
  return {s.begin(), s.end()};
}

EpisodeSeeds episode_seeds(const ScenarioConfig& config, int rep_index) {
  EpisodeSeeds s;
  auto rep = static_cast<std::uint64_t>(rep_index);
  s.root = derive_seed(config.base_seed, rep, policy_name(config.policy.kind));
  s.init = derive_seed(s.root, 0, "init");
  s.agent = derive_seed(s.root, 0, "agent");
  s.arm = derive_seed(s.root, 0, "arm");
  s.reward = config.coupled_rewards
                 ? derive_seed(derive_seed(config.base_seed, rep, "reward"), 0, "reward")
                 : derive_seed(s.root, 0, "reward");
  return s;
}

namespace {

RunResult run_episode_impl(const ScenarioConfig& config, const Instance& inst,
                           const GapSummary& gaps, const PolicyHyper& hyper,
                           const DiscountSequence& gamma, const std::vector<long>& ckpts,
                           int rep_index) {
  EpisodeSeeds seeds = episode_seeds(config, rep_index);
  Rng init_rng(seeds.init), agent_rng(seeds.agent), arm_rng(seeds.arm), reward_rng(seeds.reward);
  PolicyState st(config.policy.kind, inst, hyper, config.T, init_rng);

  auto n_agents = static_cast<std::size_t>(inst.n);
  RunResult rr;
  rr.seed = seeds.root;
  rr.checkpoints = ckpts;
  rr.regret.reserve(ckpts.size());
  rr.agent_revenue.assign(n_agents, {});
  rr.agent_counts.assign(n_agents, {});
  for (std::size_t i = 0; i < n_agents; ++i) {
    rr.agent_revenue[i].reserve(ckpts.size());
    rr.agent_counts[i].reserve(ckpts.size());
  }

  double regret = 0.0;
  std::vector<double> revenue(n_agents, 0.0);
  std::vector<long> counts(n_agents, 0);
  std::size_t ci = 0;
  for (long t = 1; t <= config.T; ++t) {
    ArmId a = st.select(agent_rng, arm_rng);
    const auto& arm = inst.arms[static_cast<std::size_t>(a)];
    int reward = draw_reward(arm, reward_rng);
    st.update(a, reward);
    regret += gaps.per_arm_gap[static_cast<std::size_t>(a)];
    auto slot = static_cast<std::size_t>(arm.agent_id - 1);
    revenue[slot] += gamma.gammas[static_cast<std::size_t>(t - 1)] * reward;
    counts[slot] += 1;
    if (t == ckpts[ci]) {
      rr.regret.push_back(regret);
      for (std::size_t i = 0; i < n_agents; ++i) {
        rr.agent_revenue[i].push_back(revenue[i]);
        rr.agent_counts[i].push_back(counts[i]);
      }
      ++ci;
    }
  }
  return rr;
}

}  // namespace

RunResult run_episode(const ScenarioConfig& config, int rep_index) {
  config.validate();
  Instance inst = config.build();
  GapSummary gaps = summarize_gaps(inst);
  PolicyHyper hyper = config.policy.resolve(inst, gaps);
  DiscountSequence gamma = config.discount.build(config.T);
  auto ckpts = checkpoint_rounds(config.T);
  return run_episode_impl(config, inst, gaps, hyper, gamma, ckpts, rep_index);
}

int harness_thread_count() {
  if (const char* env = std::getenv("SB_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string output_directory(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("SB_OUT")) return env;
  return ".";
}

AggregateResult run_experiment(const ScenarioConfig& config) {
  config.validate();
  auto start = std::chrono::steady_clock::now();
  Instance inst = config.build();
  GapSummary gaps = summarize_gaps(inst);
  PolicyHyper hyper = config.policy.resolve(inst, gaps);
  DiscountSequence gamma = config.discount.build(config.T);
  auto ckpts = checkpoint_rounds(config.T);

  std::vector<RunResult> runs(static_cast<std::size_t>(config.reps));
  int workers = std::min(harness_thread_count(), config.reps);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int rep = w; rep < config.reps; rep += workers)
        runs[static_cast<std::size_t>(rep)] =
            run_episode_impl(config, inst, gaps, hyper, gamma, ckpts, rep);
    });
  }
  for (auto& th : pool) th.join();

  auto n_agents = static_cast<std::size_t>(inst.n);
  auto n_ckpts = ckpts.size();
  AggregateResult agg;
  agg.scenario_name = config.name;
  agg.policy = policy_name(config.policy.kind);
  agg.T = config.T;
  agg.reps = config.reps;
  agg.base_seed = config.base_seed;
  agg.checkpoints = ckpts;
  agg.regret_mean.assign(n_ckpts, 0.0);
  agg.regret_std.assign(n_ckpts, 0.0);
  agg.revenue_mean.assign(n_agents, std::vector<double>(n_ckpts, 0.0));
  agg.revenue_std.assign(n_agents, std::vector<double>(n_ckpts, 0.0));

  auto R = static_cast<double>(config.reps);
  auto reduce = [&](auto getter, std::vector<double>& mean, std::vector<double>& sd) {
    for (std::size_t c = 0; c < n_ckpts; ++c) {
      double sum = 0.0, sumsq = 0.0;
      for (const auto& run : runs) {
        double v = getter(run, c);
        sum += v;
        sumsq += v * v;
      }
      double m = sum / R;
      mean[c] = m;
      sd[c] = config.reps > 1 ? std::sqrt(std::max(0.0, (sumsq - R * m * m) / (R - 1.0))) : 0.0;
    }
  };
  reduce([](const RunResult& r, std::size_t c) { return r.regret[c]; }, agg.regret_mean,
         agg.regret_std);
  agg.episode_revenue.assign(n_agents, std::vector<double>(runs.size(), 0.0));
  for (std::size_t i = 0; i < n_agents; ++i) {
    reduce([i](const RunResult& r, std::size_t c) { return r.agent_revenue[i][c]; },
           agg.revenue_mean[i], agg.revenue_std[i]);
    for (std::size_t rep = 0; rep < runs.size(); ++rep)
      agg.episode_revenue[i][rep] = runs[rep].agent_revenue[i].back();
  }

  agg.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return agg;
}

std::vector<AggregateResult> sweep_replicas(const ScenarioConfig& config,
                                            const std::vector<long>& replica_counts) {
  if (replica_counts.empty()) throw ConfigError("sweep: empty replica axis");
  std::vector<AggregateResult> out;
  for (long k : replica_counts) {
    if (k < 1) throw ConfigError("sweep: replica counts must be >= 1");
    ScenarioConfig c = config;
    auto& prof = c.agents[static_cast<std::size_t>(config.sweep_agent - 1)];
    for (auto& copies : prof.copy_counts) copies = k;
    c.name = config.name + "_k" + std::to_string(k);
    out.push_back(run_experiment(c));
  }
  return out;
}

std::vector<AggregateResult> sweep_policies(const ScenarioConfig& config,
                                            const std::vector<PolicySpec>& policies) {
  if (policies.empty()) throw ConfigError("sweep: empty policy axis");
  std::vector<AggregateResult> out;
  for (const auto& p : policies) {
    ScenarioConfig c = config;
    c.policy = p;
    out.push_back(run_experiment(c));
  }
  return out;
}

std::vector<std::string> preset_names() { return {"fig1", "fig2a", "fig2b", "fig2c", "toy"}; }

ScenarioConfig builtin_preset(const std::string& name) {
  const std::vector<double> single_means = {0.5, 0.6, 0.7, 0.8, 0.9};
  ScenarioConfig c;
  c.name = name;
  if (name == "fig1") {
    for (int i = 0; i < 5; ++i)
      c.agents.push_back(make_profile(i + 1, {single_means[static_cast<std::size_t>(i)]}, {1}));
  } else if (name == "fig2a") {
    for (int i = 0; i < 5; ++i)
      c.agents.push_back(make_profile(i + 1, {single_means[static_cast<std::size_t>(i)]},
                                      {i == 0 ? 1000L : 1L}));
  } else if (name == "fig2b") {
    for (int i = 0; i < 5; ++i)
      c.agents.push_back(make_profile(i + 1, {single_means[static_cast<std::size_t>(i)]},
                                      {i == 4 ? 1L : 1000L}));
  } else if (name == "fig2c") {
    for (int i = 0; i < 5; ++i) {
      std::vector<double> means = {single_means[static_cast<std::size_t>(i)], 0.2, 0.1};
      std::vector<long> copies =
          i < 3 ? std::vector<long>{1000, 1000, 1000} : std::vector<long>{10, 100, 100};
      c.agents.push_back(make_profile(i + 1, means, copies));
    }
    // best-copy coverage is still near-certain at this L while the smaller
    // B_i keeps RH-UCB's within-agent exploration affordable at T = 1e5
    c.policy.L = 10.0;
  } else if (name == "toy") {
    c.agents.push_back(make_profile(1, {0.7}, {1}));
    c.agents.push_back(make_profile(2, {0.5}, {1}));
    c.T = 1000;
    c.reps = 200;
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return c;
}

namespace {

std::vector<std::string> split_values(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ' ' || ch == '\t' || ch == ',') {
      if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail_at(const std::string& origin, int line, const std::string& msg) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

double parse_real(const std::string& origin, int line, const std::string& v) {
  try {
    std::size_t used = 0;
    double x = std::stod(v, &used);
    if (used != v.size()) fail_at(origin, line, "bad number '" + v + "'");
    return x;
  } catch (const std::logic_error&) {
    fail_at(origin, line, "bad number '" + v + "'");
  }
}

long parse_int(const std::string& origin, int line, const std::string& v) {
  try {
    std::size_t used = 0;
    long x = std::stol(v, &used);
    if (used != v.size()) fail_at(origin, line, "bad integer '" + v + "'");
    return x;
  } catch (const std::logic_error&) {
    fail_at(origin, line, "bad integer '" + v + "'");
  }
}

bool parse_bool(const std::string& origin, int line, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail_at(origin, line, "bad boolean '" + v + "'");
}

}  // namespace

ScenarioConfig parse_scenario_text(const std::string& text, const std::string& origin) {
  ScenarioConfig c;
  c.agents.clear();
  std::string section;
  bool used_preset = false;
  std::vector<double> pending_means;
  std::vector<long> pending_copies;
  bool in_agent = false;

  auto flush_agent = [&](int line) {
    if (!in_agent) return;
    if (pending_means.empty()) fail_at(origin, line, "[agent] block missing 'means'");
    if (pending_copies.empty()) pending_copies.assign(pending_means.size(), 1);
    if (pending_copies.size() != pending_means.size())
      fail_at(origin, line, "[agent] means and copies lengths differ");
    c.agents.push_back(
        make_profile(static_cast<int>(c.agents.size()) + 1, pending_means, pending_copies));
    pending_means.clear();
    pending_copies.clear();
    in_agent = false;
  };

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail_at(origin, line, "unterminated section header");
      flush_agent(line);
      section = s.substr(1, s.size() - 2);
      if (section == "agent") {
        if (used_preset) fail_at(origin, line, "cannot mix a preset with [agent] blocks");
        in_agent = true;
      } else if (section != "scenario" && section != "policy" && section != "agents" &&
                 section != "discount" && section != "utility") {
        fail_at(origin, line, "unknown section [" + section + "]");
      }
      continue;
    }
    auto eq = s.find('=');
    if (eq == std::string::npos) fail_at(origin, line, "expected 'key = value'");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty() || value.empty()) fail_at(origin, line, "expected 'key = value'");

    if (section == "scenario") {
      if (key == "name") c.name = value;
      else if (key == "T") c.T = parse_int(origin, line, value);
      else if (key == "reps") c.reps = static_cast<int>(parse_int(origin, line, value));
      else if (key == "seed") c.base_seed = static_cast<std::uint64_t>(parse_int(origin, line, value));
      else if (key == "coupled") c.coupled_rewards = parse_bool(origin, line, value);
      else if (key == "sweep_agent") c.sweep_agent = static_cast<int>(parse_int(origin, line, value));
      else fail_at(origin, line, "unknown key '" + key + "' in [scenario]");
    } else if (section == "policy") {
      if (key == "kind") {
        try {
          c.policy.kind = parse_policy(value);
        } catch (const ConfigError& e) {
          fail_at(origin, line, e.what());
        }
      } else if (key == "L") c.policy.L = parse_real(origin, line, value);
      else if (key == "l") c.policy.l = parse_real(origin, line, value);
      else if (key == "fair_clock") {
        if (value == "local") c.policy.fair_global_clock = false;
        else if (value == "global") c.policy.fair_global_clock = true;
        else fail_at(origin, line, "fair_clock must be local or global");
      } else fail_at(origin, line, "unknown key '" + key + "' in [policy]");
    } else if (section == "agents") {
      if (key == "preset") {
        if (!c.agents.empty()) fail_at(origin, line, "cannot mix a preset with [agent] blocks");
        try {
          c.agents = builtin_preset(value).agents;
        } catch (const ConfigError& e) {
          fail_at(origin, line, e.what());
        }
        used_preset = true;
      } else fail_at(origin, line, "unknown key '" + key + "' in [agents]");
    } else if (section == "agent") {
      if (key == "means") {
        pending_means.clear();
        for (const auto& v : split_values(value))
          pending_means.push_back(parse_real(origin, line, v));
      } else if (key == "copies") {
        pending_copies.clear();
        for (const auto& v : split_values(value))
          pending_copies.push_back(parse_int(origin, line, v));
      } else fail_at(origin, line, "unknown key '" + key + "' in [agent]");
    } else if (section == "discount") {
      if (key == "kind") {
        if (value == "ones") c.discount.kind = DiscountSpec::Kind::Ones;
        else if (value == "inverse_t") c.discount.kind = DiscountSpec::Kind::InverseT;
        else fail_at(origin, line, "discount kind must be ones or inverse_t");
      } else fail_at(origin, line, "unknown key '" + key + "' in [discount]");
    } else if (section == "utility") {
      if (key == "kind") {
        if (value == "identity") c.utility.kind = UtilitySpec::Kind::Identity;
        else if (value == "power") c.utility.kind = UtilitySpec::Kind::Power;
        else fail_at(origin, line, "utility kind must be identity or power");
      } else if (key == "p") c.utility.p = parse_real(origin, line, value);
      else fail_at(origin, line, "unknown key '" + key + "' in [utility]");
    } else {
      fail_at(origin, line, "key outside any section");
    }
  }
  flush_agent(line);
  if (c.agents.empty()) throw ConfigError(origin + ": no agents configured");
  return c;
}

ScenarioConfig parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_result_csv(const AggregateResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "round,mean_regret,std_regret";
  for (std::size_t i = 0; i < result.revenue_mean.size(); ++i)
    out << ",revenue_" << (i + 1) << "_mean,revenue_" << (i + 1) << "_std";
  out << "\n";
  for (std::size_t c = 0; c < result.checkpoints.size(); ++c) {
    out << result.checkpoints[c] << ',' << format_double(result.regret_mean[c]) << ','
        << format_double(result.regret_std[c]);
    for (std::size_t i = 0; i < result.revenue_mean.size(); ++i)
      out << ',' << format_double(result.revenue_mean[i][c]) << ','
          << format_double(result.revenue_std[i][c]);
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

AggregateResult read_result_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error(path + ": empty file");
  std::size_t n_agents = 0;
  {
    std::size_t cols = 1;
    for (char ch : header)
      if (ch == ',') ++cols;
    if (cols < 3 || (cols - 3) % 2 != 0)
      throw std::runtime_error(path + ": unexpected result header");
    n_agents = (cols - 3) / 2;
  }
  AggregateResult r;
  r.revenue_mean.assign(n_agents, {});
  r.revenue_std.assign(n_agents, {});
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::istringstream row(line);
    std::string cell;
    auto next = [&]() -> std::string {
      if (!std::getline(row, cell, ',')) throw std::runtime_error(path + ": short row");
      return cell;
    };
    r.checkpoints.push_back(std::stol(next()));
    r.regret_mean.push_back(std::stod(next()));
    r.regret_std.push_back(std::stod(next()));
    for (std::size_t i = 0; i < n_agents; ++i) {
      r.revenue_mean[i].push_back(std::stod(next()));
      r.revenue_std[i].push_back(std::stod(next()));
    }
  }
  if (!r.checkpoints.empty()) r.T = r.checkpoints.back();
  return r;
}

void write_result_json(const AggregateResult& result, const ScenarioConfig& config,
                       const std::string& path) {
  nlohmann::json j;
  j["scenario"] = {{"name", config.name},
                   {"T", config.T},
                   {"reps", config.reps},
                   {"seed", config.base_seed},
                   {"coupled", config.coupled_rewards}};
  nlohmann::json agents = nlohmann::json::array();
  for (const auto& p : config.agents) {
    nlohmann::json a;
    for (const auto& o : p.originals) a["means"].push_back(o.mean);
    a["copies"] = p.copy_counts;
    agents.push_back(a);
  }
  j["agents"] = agents;
  nlohmann::json pol;
  pol["kind"] = policy_name(config.policy.kind);
  {
    Instance inst = config.build();
    GapSummary gaps = summarize_gaps(inst);
    PolicyHyper h = config.policy.resolve(inst, gaps);
    pol["L"] = h.L;
    pol["l"] = h.l;
    pol["fair_clock"] = h.fair_global_clock ? "global" : "local";
  }
  j["policy"] = pol;
  j["discount"] = config.discount.kind == DiscountSpec::Kind::Ones ? "ones" : "inverse_t";
  j["utility"] =
      config.utility.kind == UtilitySpec::Kind::Identity
          ? nlohmann::json{{"kind", "identity"}}
          : nlohmann::json{{"kind", "power"}, {"p", config.utility.p}};
  nlohmann::json seeds = nlohmann::json::array();
  for (int rep = 0; rep < config.reps; ++rep) seeds.push_back(episode_seeds(config, rep).root);
  j["episode_seeds"] = seeds;
  j["build"] = kGitDescribe;
  j["wall_seconds"] = result.wall_seconds;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

}  // namespace sbandit
