#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "mmw/baselines.hpp"
#include "mmw/core.hpp"
#include "mmw/experiment.hpp"
#include "mmw/loadsolve.hpp"
#include "mmw/oracle.hpp"
#include "mmw/phy.hpp"
#include "mmw/satsolve.hpp"
#include "mmw/scenario.hpp"

namespace {

constexpr const char* kOracleCapEnv = "MMWASSOC_ORACLE_CAP";

struct SolverOverrides {
  double sa_t0 = -1, sa_alpha = -1, sa_tmin = -1, sa_p = -1;
  int sa_q = 0;
  double pg_step = -1, pg_tol = -1;
  int pg_max_iters = -1;

  void apply(mmw::exp::ExperimentConfig& cfg) const {
    if (sa_t0 > 0) cfg.sa.t0 = sa_t0;
    if (sa_alpha > 0) cfg.sa.alpha = sa_alpha;
    if (sa_tmin > 0) cfg.sa.tmin = sa_tmin;
    if (sa_p >= 0) cfg.sa.p = sa_p;
    if (sa_q != 0) cfg.sa.q = sa_q;
    if (pg_step > 0) cfg.relaxed.step_size = pg_step;
    if (pg_tol > 0) cfg.relaxed.utility_tol = pg_tol;
    if (pg_max_iters > 0) cfg.relaxed.max_iters = pg_max_iters;
  }
};

void add_solver_flags(CLI::App* cmd, SolverOverrides& ov) {
  cmd->add_option("--sa-t0", ov.sa_t0, "SA initial temperature");
  cmd->add_option("--sa-alpha", ov.sa_alpha, "SA cooling factor");
  cmd->add_option("--sa-tmin", ov.sa_tmin, "SA minimum temperature");
  cmd->add_option("--sa-p", ov.sa_p, "SA random-move probability");
  cmd->add_option("--sa-q", ov.sa_q, "SA inner moves per temperature");
  cmd->add_option("--pg-step", ov.pg_step, "projected gradient step size");
  cmd->add_option("--pg-tol", ov.pg_tol, "projected gradient utility tolerance");
  cmd->add_option("--pg-max-iters", ov.pg_max_iters, "projected gradient iteration cap");
}

mmw::exp::ExperimentConfig load_or_default(const std::string& path) {
  if (path.empty()) return mmw::exp::default_config();
  return mmw::exp::load_config(path);
}

double oracle_cap(const mmw::exp::ExperimentConfig& cfg, double flag_value) {
  return flag_value > 0 ? flag_value : cfg.oracle_max_candidates;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"client-AP association and airtime allocation for mmWave WLANs"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", out_path, policy, results_path;
  std::string baseline_label, candidate_label, trace_path;
  std::uint64_t seed = 1;
  bool seed_given = false;
  int snapshot = 0, threads = 1;
  bool deterministic = false, timings = false, finite_oracle = false;
  double max_candidates = -1;
  SolverOverrides overrides;

  auto* defaults_cmd = app.add_subcommand("defaults", "print the default configuration as JSON");
  (void)defaults_cmd;

  auto* generate = app.add_subcommand("generate", "generate a topology and write it as CSV");
  generate->add_option("--scenario", config_path, "configuration file");
  generate->add_option("--seed", seed, "scenario seed");
  generate->add_option("--snapshot", snapshot, "mobility snapshot index");
  generate->add_option("--out", out_path, "output CSV path")->required();

  auto* solve = app.add_subcommand("solve", "solve one instance with one policy");
  solve->add_option("--scenario", config_path, "configuration file");
  solve->add_option("--seed", seed, "scenario seed");
  solve->add_option("--snapshot", snapshot, "mobility snapshot index");
  solve->add_option("--policy", policy, "policy name")->required();
  solve->add_option("--trace", trace_path, "write the SA iteration trace CSV here");
  solve->add_flag("--deterministic", deterministic, "deterministic tie-breaking");
  add_solver_flags(solve, overrides);

  auto* oracle_cmd = app.add_subcommand("oracle", "exhaustive-search optimum for one instance");
  oracle_cmd->add_option("--scenario", config_path, "configuration file");
  oracle_cmd->add_option("--seed", seed, "scenario seed");
  oracle_cmd->add_option("--snapshot", snapshot, "mobility snapshot index");
  oracle_cmd->add_flag("--finite", finite_oracle, "finite-load oracle (uses configured demands)");
  oracle_cmd->add_option("--max-candidates", max_candidates,
                         "search size guard (also " + std::string(kOracleCapEnv) + ")");

  auto* run = app.add_subcommand("run", "run the policy x seed grid and write CSV reports");
  run->add_option("--scenario", config_path, "configuration file");
  run->add_option("--out-dir", out_dir, "output directory");
  run->add_option("--threads", threads, "worker threads");
  run->add_option("--seed", seed, "run a single seed instead of the configured list")
      ->each([&](const std::string&) { seed_given = true; });
  run->add_option("--policy", policy, "run a single policy instead of the configured list");
  run->add_flag("--deterministic", deterministic, "deterministic tie-breaking");
  run->add_flag("--timings", timings, "record wall-clock ms in summary.csv");
  add_solver_flags(run, overrides);

  auto* compare_cmd = app.add_subcommand("compare", "paired comparison of two policies");
  compare_cmd->add_option("--results", results_path, "results.csv from a run")->required();
  compare_cmd->add_option("--baseline", baseline_label, "baseline policy label")->required();
  compare_cmd->add_option("--candidate", candidate_label, "candidate policy label")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("defaults")) {
      std::cout << mmw::exp::config_to_json(mmw::exp::default_config());
      return 0;
    }

    mmw::exp::ExperimentConfig cfg = load_or_default(config_path);
    overrides.apply(cfg);
    if (const char* env = std::getenv(kOracleCapEnv))
      cfg.oracle_max_candidates = std::strtod(env, nullptr);

    if (app.got_subcommand("generate")) {
      const mmw::exp::Instance inst = mmw::exp::build_instance(cfg, seed);
      if (snapshot < 0 || snapshot >= static_cast<int>(inst.snapshots.size()))
        throw mmw::exp::ConfigError("snapshot index out of range");
      mmw::Topology topo = inst.topo;
      topo.clients = inst.snapshots[static_cast<std::size_t>(snapshot)];
      mmw::write_topology_csv(out_path, topo);
      return 0;
    }

    if (app.got_subcommand("solve")) {
      cfg.policies = {policy};
      cfg.validate();
      const mmw::exp::Instance inst = mmw::exp::build_instance(cfg, seed);
      if (snapshot < 0 || snapshot >= static_cast<int>(inst.snapshots.size()))
        throw mmw::exp::ConfigError("snapshot index out of range");
      mmw::Topology topo = inst.topo;
      topo.clients = inst.snapshots[static_cast<std::size_t>(snapshot)];
      const mmw::Matrix rates = mmw::phy::rate_matrix(topo, cfg.radio);

      if (policy == "proposed-sawf" && !trace_path.empty()) {
        // Trace run: repeat the cell solve with an explicit trace sink.
        const std::vector<mmw::FrameConfig> frames = mmw::uniform_frames(rates.cols(), cfg.frame);
        mmw::Rng rng(seed);
        auto [x0, sat_report] =
            mmw::satsolve::solve_saturation(rates, frames, cfg.relaxed, rng, deterministic);
        mmw::loadsolve::SAParams sa = cfg.sa;
        sa.seed = seed;
        std::vector<mmw::loadsolve::SATraceRow> trace;
        const auto result = mmw::loadsolve::simulated_annealing(
            x0, rates, frames, inst.demands.bits_per_s(), sa, &trace);
        std::ofstream out(trace_path);
        if (!out) throw std::runtime_error("cannot open " + trace_path);
        out << "iteration,temperature,utility,accepted\n";
        char buf[120];
        for (const auto& row : trace) {
          std::snprintf(buf, sizeof(buf), "%ld,%.10g,%.10g,%d\n", row.iteration, row.temperature,
                        row.utility, row.accepted ? 1 : 0);
          out << buf;
        }
        std::printf("policy %s seed %llu utility %.10g aggregate %.10g iterations %ld\n",
                    policy.c_str(), static_cast<unsigned long long>(seed),
                    result.report.utility_nats, result.report.aggregate_bps,
                    result.report.iterations);
        return 0;
      }

      const mmw::exp::CellResult cell = mmw::exp::solve_policy(
          cfg, policy, topo, rates, inst.demands, seed, snapshot, deterministic);
      std::printf("policy %s seed %llu utility %.10g aggregate %.10g iterations %ld wall_ms %.3f\n",
                  policy.c_str(), static_cast<unsigned long long>(seed), cell.report.utility_nats,
                  cell.report.aggregate_bps, cell.report.iterations,
                  cell.report.wall_time_s * 1e3);
      for (mmw::Index i = 0; i < cell.x.num_clients(); ++i)
        std::printf("client %lld ap %d rate %.10g airtime %.10g throughput %.10g\n",
                    static_cast<long long>(i), cell.x.ap[i], rates(i, cell.x.ap[i]),
                    cell.t(i, cell.x.ap[i]), cell.report.per_client_throughput_bps[i]);
      return 0;
    }

    if (app.got_subcommand("oracle")) {
      const mmw::exp::Instance inst = mmw::exp::build_instance(cfg, seed);
      if (snapshot < 0 || snapshot >= static_cast<int>(inst.snapshots.size()))
        throw mmw::exp::ConfigError("snapshot index out of range");
      mmw::Topology topo = inst.topo;
      topo.clients = inst.snapshots[static_cast<std::size_t>(snapshot)];
      const mmw::Matrix rates = mmw::phy::rate_matrix(topo, cfg.radio);
      const std::vector<mmw::FrameConfig> frames = mmw::uniform_frames(rates.cols(), cfg.frame);
      const double cap = oracle_cap(cfg, max_candidates);
      if (finite_oracle) {
        if (inst.demands.is_saturated())
          throw mmw::exp::ConfigError("finite oracle requires finite demands in the config");
        const auto opt =
            mmw::oracle::exhaustive_finite(rates, frames, inst.demands.bits_per_s(), cap);
        std::printf("oracle finite utility %.10g candidates %.0f\n", opt.utility, opt.candidates);
        for (mmw::Index i = 0; i < opt.x.num_clients(); ++i)
          std::printf("client %lld ap %d\n", static_cast<long long>(i), opt.x.ap[i]);
      } else {
        const auto opt = mmw::oracle::exhaustive_saturation(rates, frames, cap);
        std::printf("oracle saturation utility %.10g candidates %.0f\n", opt.utility, opt.candidates);
        for (mmw::Index i = 0; i < opt.x.num_clients(); ++i)
          std::printf("client %lld ap %d\n", static_cast<long long>(i), opt.x.ap[i]);
      }
      return 0;
    }

    if (app.got_subcommand("run")) {
      if (seed_given) cfg.seeds = {seed};
      if (!policy.empty()) cfg.policies = {policy};
      mmw::exp::RunOptions options;
      options.out_dir = out_dir;
      options.threads = threads;
      options.deterministic = deterministic;
      options.timings = timings;
      mmw::exp::run_experiment(cfg, options);
      return 0;
    }

    if (app.got_subcommand("compare")) {
      const auto result = mmw::exp::compare(results_path, baseline_label, candidate_label);
      std::cout << mmw::exp::format_compare(result);
      return 0;
    }
  } catch (const mmw::exp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const mmw::InfeasibleInstanceError& e) {
    std::cerr << "infeasible instance: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
