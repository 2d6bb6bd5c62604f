#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sbandit/harness.hpp"
#include "sbandit/oracle.hpp"
#include "sbandit/plot.hpp"

namespace {

using namespace sbandit;

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitVerifyFailed = 3;

struct CommonOpts {
  std::string preset;
  std::string scenario_path;
  std::string policy;
  long T = 0;
  int reps = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double L = 0.0;
  bool L_set = false;
  double l = 0.0;
  bool l_set = false;
  std::string out;
  bool coupled = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_policy = true) {
  cmd->add_option("--preset", o.preset, "builtin scenario preset (see `sbandit presets`)");
  cmd->add_option("--scenario", o.scenario_path, "scenario file path");
  if (with_policy)
    cmd->add_option("--policy", o.policy, "policy: ucb1|fair|sucb|hucb|rhucb|prhucb");
  cmd->add_option("--T", o.T, "horizon override");
  cmd->add_option("--reps", o.reps, "repetition count override");
  cmd->add_option("--seed", o.seed, "base seed override")->each([&](const std::string&) {
    o.seed_set = true;
  });
  cmd->add_option("--L", o.L, "RH-UCB subsample scale override")->each([&](const std::string&) {
    o.L_set = true;
  });
  cmd->add_option("--l", o.l, "S-UCB sampling scale override")->each([&](const std::string&) {
    o.l_set = true;
  });
  cmd->add_option("--out", o.out, "output directory (default SB_OUT or .)");
  cmd->add_flag("--coupled", o.coupled, "share reward randomness across policies");
}

ScenarioConfig load_scenario(const CommonOpts& o) {
  ScenarioConfig c;
  if (!o.preset.empty() && !o.scenario_path.empty())
    throw ConfigError("give either --preset or --scenario, not both");
  if (!o.preset.empty())
    c = builtin_preset(o.preset);
  else if (!o.scenario_path.empty())
    c = parse_scenario_file(o.scenario_path);
  else
    throw ConfigError("one of --preset or --scenario is required");
  if (!o.policy.empty()) c.policy.kind = parse_policy(o.policy);
  if (o.T > 0) c.T = o.T;
  if (o.reps > 0) c.reps = o.reps;
  if (o.seed_set) c.base_seed = o.seed;
  if (o.L_set) c.policy.L = o.L;
  if (o.l_set) c.policy.l = o.l;
  if (o.coupled) c.coupled_rewards = true;
  c.validate();
  return c;
}

std::string result_stem(const std::string& out_dir, const AggregateResult& r) {
  std::filesystem::create_directories(out_dir);
  return out_dir + "/" + r.scenario_name + "_" + r.policy;
}

void persist(const AggregateResult& r, const ScenarioConfig& c, const std::string& out_dir) {
  std::string stem = result_stem(out_dir, r);
  write_result_csv(r, stem + ".csv");
  write_result_json(r, c, stem + ".json");
  std::cout << r.scenario_name << " policy=" << r.policy << " T=" << r.T << " reps=" << r.reps
            << " final regret " << format_double(r.final_regret_mean()) << " +- "
            << format_double(r.final_regret_std()) << "  -> " << stem << ".csv\n";
}

int cmd_simulate(const CommonOpts& o) {
  ScenarioConfig c = load_scenario(o);
  AggregateResult r = run_experiment(c);
  persist(r, c, output_directory(o.out));
  return 0;
}

int cmd_sweep(const CommonOpts& o, const std::vector<long>& replicas,
              const std::vector<std::string>& policies, int sweep_agent) {
  ScenarioConfig c = load_scenario(o);
  if (sweep_agent > 0) c.sweep_agent = sweep_agent;
  std::string out_dir = output_directory(o.out);
  if (!replicas.empty() && !policies.empty())
    throw ConfigError("sweep over one axis at a time: --replicas or --policies");
  if (replicas.empty() && policies.empty())
    throw ConfigError("sweep needs --replicas or --policies");
  if (!replicas.empty()) {
    auto results = sweep_replicas(c, replicas);
    for (std::size_t i = 0; i < results.size(); ++i) {
      ScenarioConfig point = c;
      auto& prof = point.agents[static_cast<std::size_t>(c.sweep_agent - 1)];
      for (auto& copies : prof.copy_counts) copies = replicas[i];
      point.name = results[i].scenario_name;
      persist(results[i], point, out_dir);
      std::cout << "  replicas=" << replicas[i] << " agent " << c.sweep_agent << " revenue "
                << format_double(results[i].final_revenue_mean(c.sweep_agent)) << " +- "
                << format_double(results[i].final_revenue_std(c.sweep_agent));
      if (c.utility.kind != UtilitySpec::Kind::Identity && c.reps >= 2) {
        auto est = expected_utility(
            results[i].episode_revenue[static_cast<std::size_t>(c.sweep_agent - 1)],
            c.utility.build());
        std::cout << "  utility " << format_double(est.mean) << " (95% +- "
                  << format_double(est.ci_half_width) << ")";
      }
      std::cout << "\n";
    }
  } else {
    std::vector<PolicySpec> specs;
    for (const auto& p : policies) {
      PolicySpec s = c.policy;
      s.kind = parse_policy(p);
      specs.push_back(s);
    }
    auto results = sweep_policies(c, specs);
    for (std::size_t i = 0; i < results.size(); ++i) {
      ScenarioConfig point = c;
      point.policy = specs[i];
      persist(results[i], point, out_dir);
    }
  }
  return 0;
}

int cmd_bound(const CommonOpts& o) {
  ScenarioConfig c = load_scenario(o);
  Instance inst = c.build();
  GapSummary gaps = summarize_gaps(inst);
  PolicyHyper hyper = c.policy.resolve(inst, gaps);
  std::cout << "instance '" << c.name << "': " << inst.n << " agents, " << inst.arm_count()
            << " registered arms, mu*=" << format_double(gaps.mu_star)
            << ", c=" << format_double(gaps.best_fraction) << "\n";
  std::cout << "agent  Delta_i     best_mean  |S_i|  best_fraction\n";
  for (int i = 1; i <= inst.n; ++i) {
    auto slot = static_cast<std::size_t>(i - 1);
    std::printf("%5d  %-10g  %-9g  %5ld  %g\n", i, gaps.per_agent_gap[slot],
                gaps.agent_best_mean[slot], inst.agent_arm_count(i),
                gaps.agent_best_fraction[slot]);
  }
  std::cout << "H-UCB regret bound (T=" << c.T << "): " << format_double(hucb_bound(gaps, c.T))
            << "\n";
  std::string zero_gap;
  for (int i = 1; i <= inst.n; ++i)
    if (gaps.per_agent_gap[static_cast<std::size_t>(i - 1)] == 0.0)
      zero_gap += (zero_gap.empty() ? "" : ", ") + std::to_string(i);
  std::cout << "  (zero-gap agents contribute no log term, skipped: " << zero_gap << ")\n";
  auto rb = rhucb_bound(gaps, c.T, hyper.L);
  std::cout << "RH-UCB leading terms (T=" << c.T << ", L=" << format_double(hyper.L)
            << "): " << format_double(rb.leading) << "  (" << rb.remainder_note << ")\n";
  if (!rb.precondition_ok)
    std::cerr << "warning: L=" << format_double(hyper.L) << " is below 1/c="
              << format_double(1.0 / gaps.best_fraction)
              << "; the RH-UCB bound is not guaranteed at this L\n";
  return 0;
}

const char* dominance_str(Dominance d) {
  switch (d) {
    case Dominance::StrictlyDominates: return "strict";
    case Dominance::Dominates: return "weak";
    case Dominance::Incomparable: return "incomparable";
  }
  return "?";
}

int cmd_verify(const CommonOpts& o, int t_max, bool det_ties) {
  ScenarioConfig c;
  if (!o.preset.empty() || !o.scenario_path.empty()) {
    CommonOpts base = o;
    base.policy.clear();
    c = load_scenario(base);
  } else {
    c = builtin_preset("toy");
  }
  long horizon = o.T > 0 ? o.T : t_max;
  Instance inst = c.build();
  GapSummary gaps = summarize_gaps(inst);
  PolicyHyper hyper = c.policy.resolve(inst, gaps);
  if (o.L_set) hyper.L = o.L;
  if (o.l_set) hyper.l = o.l;
  if (det_ties) hyper.tie = TieBreak::FirstCandidate;

  std::string out_dir = output_directory(o.out);
  std::filesystem::create_directories(out_dir);
  std::ofstream text(out_dir + "/certificate.txt");
  nlohmann::json j;
  j["t_max"] = t_max;
  j["horizon"] = horizon;
  j["deterministic_ties"] = det_ties;
  j["instance"] = c.name;

  auto describe = [&](std::ostream& os, const ProofnessReport& rep) {
    for (const auto& a : rep.agents) {
      os << "  agent " << a.agent_id << " duplicated: per-round dominance of duplicated count:";
      for (std::size_t t = 0; t < a.per_round.size(); ++t)
        os << " t" << (t + 1) << "=" << dominance_str(a.per_round[t]);
      os << "  (max CDF gap " << format_double(*std::max_element(a.cdf_distance.begin(),
                                                                 a.cdf_distance.end()))
         << ")\n";
    }
  };

  bool ok = true;
  struct Check {
    PolicyKind kind;
    bool expect_equal;  // else expect strict dominance
  };
  for (Check chk : {Check{PolicyKind::UCB1, false}, Check{PolicyKind::FairUCB1, true},
                    Check{PolicyKind::HUCB, true}, Check{PolicyKind::RHUCB, true}}) {
    auto rep = proneness_certificate(inst, chk.kind, hyper, horizon, t_max);
    bool pass = chk.expect_equal ? rep.all_equal() : rep.all_strictly_dominated();
    ok = ok && pass;
    std::string claim = chk.expect_equal
                            ? "duplication leaves agent-count distributions unchanged"
                            : "duplication strictly helps every agent";
    std::cout << "policy " << policy_name(chk.kind) << ": " << claim << ": "
              << (pass ? "REPRODUCED" : "NOT REPRODUCED") << "\n";
    text << "policy " << policy_name(chk.kind) << ": " << claim << ": "
         << (pass ? "REPRODUCED" : "NOT REPRODUCED") << "\n";
    describe(text, rep);
    nlohmann::json pj;
    pj["policy"] = policy_name(chk.kind);
    pj["claim"] = claim;
    pj["pass"] = pass;
    for (const auto& a : rep.agents) {
      nlohmann::json aj;
      aj["agent"] = a.agent_id;
      for (auto d : a.per_round) aj["dominance"].push_back(dominance_str(d));
      aj["cdf_distance"] = a.cdf_distance;
      pj["agents"].push_back(aj);
    }
    j["policies"].push_back(pj);
  }
  j["pass"] = ok;
  std::ofstream(out_dir + "/certificate.json") << j.dump(2) << "\n";
  text << (ok ? "VERDICT: PASS\n" : "VERDICT: FAIL\n");
  std::cout << (ok ? "VERDICT: PASS" : "VERDICT: FAIL") << "  (certificate in " << out_dir
            << ")\n";
  return ok ? 0 : kExitVerifyFailed;
}

int cmd_plot(const std::vector<std::string>& inputs, const std::string& title,
             const std::string& out_flag) {
  if (inputs.empty()) throw ConfigError("plot needs at least one result CSV (--in)");
  std::vector<PlotSeries> series;
  for (const auto& path : inputs) {
    if (!std::filesystem::exists(path)) throw ConfigError("missing input '" + path + "'");
    AggregateResult r = read_result_csv(path);
    series.push_back(regret_series(r, std::filesystem::path(path).stem().string()));
  }
  std::string out_dir = output_directory(out_flag);
  std::filesystem::create_directories(out_dir);
  std::string stem = out_dir + "/" + (title.empty() ? std::string("regret") : title);
  write_regret_svg(series, title.empty() ? "cumulative regret" : title, stem + ".svg");
  write_tidy_csv(series, stem + "_tidy.csv");
  std::cout << "wrote " << stem << ".svg and " << stem << "_tidy.csv\n";
  return 0;
}

int cmd_presets() {
  for (const auto& name : preset_names()) {
    ScenarioConfig c = builtin_preset(name);
    Instance inst = c.build();
    std::printf("%-6s %d agents, %5d arms, defaults T=%ld reps=%d\n", name.c_str(), inst.n,
                inst.arm_count(), c.T, c.reps);
  }
  std::cout << "fig1: one arm each (0.5..0.9). fig2a: the 0.5-agent registers 1000 copies.\n"
            << "fig2b: every agent but the 0.9-agent registers 1000 copies. fig2c: three\n"
            << "originals per agent (x, 0.2, 0.1) with full and partial replicators.\n"
            << "toy: two agents (0.7, 0.5), the verify default.\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"strategic-replication bandit simulator", "sbandit"};
  app.require_subcommand(1);

  CommonOpts sim_opts;
  auto* sim = app.add_subcommand("simulate", "run one scenario and write result files");
  add_common(sim, sim_opts);

  CommonOpts sweep_opts;
  std::vector<long> sweep_replica_axis;
  std::vector<std::string> sweep_policy_axis;
  int sweep_agent = 0;
  auto* sw = app.add_subcommand("sweep", "run a scenario over a replica-count or policy axis");
  add_common(sw, sweep_opts);
  sw->add_option("--replicas", sweep_replica_axis, "replica counts, e.g. 1,10,100,1000")
      ->delimiter(',');
  sw->add_option("--policies", sweep_policy_axis, "policy list, e.g. ucb1,hucb")->delimiter(',');
  sw->add_option("--sweep-agent", sweep_agent, "agent whose replicas the sweep scales");

  CommonOpts bound_opts;
  auto* bd = app.add_subcommand("bound", "evaluate the closed-form regret bounds");
  add_common(bd, bound_opts);

  CommonOpts verify_opts;
  int t_max = 4;
  bool det_ties = false;
  auto* vf = app.add_subcommand("verify",
                                "exhaustively check replication behavior on a toy instance");
  add_common(vf, verify_opts, false);
  vf->add_option("--tmax", t_max, "enumeration horizon (default 4)");
  vf->add_flag("--det-ties", det_ties, "diagnostic: break ties deterministically");

  std::vector<std::string> plot_inputs;
  std::string plot_title, plot_out;
  auto* pl = app.add_subcommand("plot", "render result CSVs as an SVG plus a tidy CSV");
  pl->add_option("--in", plot_inputs, "result CSV files")->delimiter(',');
  pl->add_option("--title", plot_title, "figure title and output stem");
  pl->add_option("--out", plot_out, "output directory (default SB_OUT or .)");

  auto* pr = app.add_subcommand("presets", "list builtin scenario presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_opts);
    if (sw->parsed()) return cmd_sweep(sweep_opts, sweep_replica_axis, sweep_policy_axis,
                                       sweep_agent);
    if (bd->parsed()) return cmd_bound(bound_opts);
    if (vf->parsed()) return cmd_verify(verify_opts, t_max, det_ties);
    if (pl->parsed()) return cmd_plot(plot_inputs, plot_title, plot_out);
    if (pr->parsed()) return cmd_presets();
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const TooLargeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
