#include "mmw/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "mmw/baselines.hpp"
#include "mmw/core.hpp"
#include "mmw/oracle.hpp"

namespace mmw::exp {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const char c : s) {
    h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Solver stream for one (seed, policy, snapshot) cell; depends on nothing else.
std::uint64_t cell_seed(std::uint64_t seed, const std::string& policy, int snapshot) {
  return mix64(mix64(seed ^ fnv1a(policy)) ^ static_cast<std::uint64_t>(snapshot + 1));
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void expect_keys(const json& obj, std::initializer_list<const char*> allowed,
                 const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* k) { return key == k; }) == allowed.end())
      throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

}  // namespace

const std::vector<std::string>& known_policies() {
  static const std::vector<std::string> policies = {
      "snr-ea",    "snr-wf",    "greedy-ea",    "greedy-wf",    "minmax-ea",
      "minmax-wf", "proposed-sat", "proposed-sawf", "oracle-sat", "oracle-finite"};
  return policies;
}

namespace {

bool policy_needs_demands(const std::string& policy) {
  return policy == "snr-wf" || policy == "greedy-wf" || policy == "minmax-wf" ||
         policy == "proposed-sawf" || policy == "oracle-finite";
}

}  // namespace

void ExperimentConfig::validate() const {
  if (scenario.width <= 0.0 || scenario.height <= 0.0) throw ConfigError("scenario.area must be positive");
  if (scenario.ap_rows < 1 || scenario.ap_cols < 1) throw ConfigError("scenario.ap_grid must be at least 1x1");
  if (scenario.num_clients < 1) throw ConfigError("scenario.clients must be >= 1");
  for (const auto& w : scenario.walls) {
    try {
      w.validate();
    } catch (const std::exception& e) {
      throw ConfigError(std::string("scenario.walls: ") + e.what());
    }
  }
  try {
    radio.validate();
    frame.validate();
    relaxed.validate();
    sa.validate();
    if (scenario.mobility.enabled) scenario.mobility.params.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (demands.kind == DemandSpec::Kind::Uniform &&
      !(demands.min_bps > 0.0 && demands.min_bps <= demands.max_bps))
    throw ConfigError("demands require 0 < min_bps <= max_bps");
  if (policies.empty()) throw ConfigError("at least one policy required");
  for (const auto& p : policies) {
    if (std::find(known_policies().begin(), known_policies().end(), p) == known_policies().end())
      throw ConfigError("unknown policy '" + p + "'");
    if (demands.kind == DemandSpec::Kind::Saturated && policy_needs_demands(p))
      throw ConfigError("policy '" + p + "' requires finite demands");
  }
  if (seeds.empty()) throw ConfigError("at least one seed required");
  if (oracle_max_candidates <= 0.0) throw ConfigError("oracle_max_candidates must be positive");
}

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.scenario.name = "sat4";
  cfg.scenario.placement.kind = PlacementSpec::Kind::Pmf;
  cfg.scenario.placement.pmf.components = {{{15.0, 13.0}, 5.0, 1.0}};
  cfg.scenario.placement.pmf.floor_weight = 0.05;
  return cfg;
}

namespace {

ExperimentConfig config_from_json(const json& root) {
  ExperimentConfig cfg = default_config();
  expect_keys(root, {"scenario", "radio", "frame", "demands", "policies", "seeds", "solver",
                     "oracle_max_candidates"},
              "config root");

  if (root.contains("scenario")) {
    const json& s = root.at("scenario");
    expect_keys(s, {"name", "area", "ap_grid", "clients", "placement", "walls", "mobility"},
                "scenario");
    if (s.contains("name")) cfg.scenario.name = s.at("name").get<std::string>();
    if (s.contains("area")) {
      cfg.scenario.width = s.at("area").at(0).get<double>();
      cfg.scenario.height = s.at("area").at(1).get<double>();
    }
    if (s.contains("ap_grid")) {
      cfg.scenario.ap_rows = s.at("ap_grid").at(0).get<int>();
      cfg.scenario.ap_cols = s.at("ap_grid").at(1).get<int>();
    }
    if (s.contains("clients")) cfg.scenario.num_clients = s.at("clients").get<int>();
    if (s.contains("placement")) {
      const json& p = s.at("placement");
      expect_keys(p, {"type", "floor_weight", "components"}, "scenario.placement");
      const std::string type = p.at("type").get<std::string>();
      if (type == "uniform") {
        cfg.scenario.placement.kind = PlacementSpec::Kind::Uniform;
        cfg.scenario.placement.pmf = {};
      } else if (type == "pmf") {
        cfg.scenario.placement.kind = PlacementSpec::Kind::Pmf;
        cfg.scenario.placement.pmf.components.clear();
        if (p.contains("floor_weight"))
          cfg.scenario.placement.pmf.floor_weight = p.at("floor_weight").get<double>();
        for (const json& c : p.at("components")) {
          expect_keys(c, {"center", "sigma", "weight"}, "placement component");
          scenario::GaussianComponent comp;
          comp.center = {c.at("center").at(0).get<double>(), c.at("center").at(1).get<double>()};
          comp.sigma_m = c.at("sigma").get<double>();
          if (c.contains("weight")) comp.weight = c.at("weight").get<double>();
          cfg.scenario.placement.pmf.components.push_back(comp);
        }
      } else {
        throw ConfigError("placement.type must be 'pmf' or 'uniform'");
      }
    }
    if (s.contains("walls")) {
      cfg.scenario.walls.clear();
      for (const json& w : s.at("walls")) {
        expect_keys(w, {"a", "b", "attenuation_db"}, "wall");
        Wall wall;
        wall.a = {w.at("a").at(0).get<double>(), w.at("a").at(1).get<double>()};
        wall.b = {w.at("b").at(0).get<double>(), w.at("b").at(1).get<double>()};
        wall.attenuation_db = w.at("attenuation_db").get<double>();
        cfg.scenario.walls.push_back(wall);
      }
    }
    if (s.contains("mobility")) {
      const json& mo = s.at("mobility");
      expect_keys(mo, {"enabled", "speed_mps", "pause_s", "walk_s", "horizon_s",
                       "snapshot_period_s", "box"},
                  "mobility");
      auto& mp = cfg.scenario.mobility.params;
      cfg.scenario.mobility.enabled = mo.value("enabled", false);
      if (mo.contains("speed_mps")) {
        mp.speed_min_mps = mo.at("speed_mps").at(0).get<double>();
        mp.speed_max_mps = mo.at("speed_mps").at(1).get<double>();
      }
      if (mo.contains("pause_s")) {
        mp.pause_min_s = mo.at("pause_s").at(0).get<double>();
        mp.pause_max_s = mo.at("pause_s").at(1).get<double>();
      }
      if (mo.contains("walk_s")) {
        mp.walk_min_s = mo.at("walk_s").at(0).get<double>();
        mp.walk_max_s = mo.at("walk_s").at(1).get<double>();
      }
      if (mo.contains("horizon_s")) mp.horizon_s = mo.at("horizon_s").get<double>();
      if (mo.contains("snapshot_period_s")) mp.snapshot_period_s = mo.at("snapshot_period_s").get<double>();
      if (mo.contains("box")) {
        mp.box_xmin = mo.at("box").at(0).get<double>();
        mp.box_xmax = mo.at("box").at(1).get<double>();
        mp.box_ymin = mo.at("box").at(2).get<double>();
        mp.box_ymax = mo.at("box").at(3).get<double>();
      }
    }
  }

  if (root.contains("radio")) {
    const json& r = root.at("radio");
    expect_keys(r, {"tx_power_dbm", "antenna_gain_dbi", "carrier_hz", "bandwidth_hz",
                    "noise_figure_db", "min_distance_m", "mcs"},
                "radio");
    if (r.contains("tx_power_dbm")) cfg.radio.tx_power_dbm = r.at("tx_power_dbm").get<double>();
    if (r.contains("antenna_gain_dbi")) cfg.radio.antenna_gain_dbi = r.at("antenna_gain_dbi").get<double>();
    if (r.contains("carrier_hz")) cfg.radio.carrier_hz = r.at("carrier_hz").get<double>();
    if (r.contains("bandwidth_hz")) cfg.radio.bandwidth_hz = r.at("bandwidth_hz").get<double>();
    if (r.contains("noise_figure_db")) cfg.radio.noise_figure_db = r.at("noise_figure_db").get<double>();
    if (r.contains("min_distance_m")) cfg.radio.min_distance_m = r.at("min_distance_m").get<double>();
    if (r.contains("mcs")) {
      const json& mcs = r.at("mcs");
      expect_keys(mcs, {"base_snr_db", "step_db", "table"}, "radio.mcs");
      if (mcs.contains("table")) {
        cfg.radio.mcs_table.clear();
        for (const json& tier : mcs.at("table")) {
          expect_keys(tier, {"min_snr_db", "rate_bps"}, "mcs tier");
          cfg.radio.mcs_table.push_back(
              {tier.at("min_snr_db").get<double>(), tier.at("rate_bps").get<double>()});
        }
      } else {
        cfg.radio.mcs_table =
            phy::default_mcs_table(mcs.value("base_snr_db", 2.0), mcs.value("step_db", 3.0));
      }
    }
  }

  if (root.contains("frame")) {
    const json& f = root.at("frame");
    expect_keys(f, {"superframe_s", "overhead_s"}, "frame");
    if (f.contains("superframe_s")) cfg.frame.superframe_s = f.at("superframe_s").get<double>();
    if (f.contains("overhead_s")) cfg.frame.overhead_s = f.at("overhead_s").get<double>();
  }

  if (root.contains("demands")) {
    const json& d = root.at("demands");
    expect_keys(d, {"mode", "min_bps", "max_bps"}, "demands");
    const std::string mode = d.at("mode").get<std::string>();
    if (mode == "saturated") {
      cfg.demands.kind = DemandSpec::Kind::Saturated;
    } else if (mode == "uniform") {
      cfg.demands.kind = DemandSpec::Kind::Uniform;
      cfg.demands.min_bps = d.at("min_bps").get<double>();
      cfg.demands.max_bps = d.at("max_bps").get<double>();
    } else {
      throw ConfigError("demands.mode must be 'saturated' or 'uniform'");
    }
  }

  if (root.contains("policies")) cfg.policies = root.at("policies").get<std::vector<std::string>>();

  if (root.contains("seeds")) {
    const json& s = root.at("seeds");
    cfg.seeds.clear();
    if (s.is_array()) {
      for (const json& v : s) cfg.seeds.push_back(v.get<std::uint64_t>());
    } else {
      expect_keys(s, {"base", "count"}, "seeds");
      const auto base = s.at("base").get<std::uint64_t>();
      const auto count = s.at("count").get<std::uint64_t>();
      for (std::uint64_t k = 0; k < count; ++k) cfg.seeds.push_back(base + k);
    }
  }

  if (root.contains("solver")) {
    const json& s = root.at("solver");
    expect_keys(s, {"relaxed", "sa"}, "solver");
    if (s.contains("relaxed")) {
      const json& r = s.at("relaxed");
      expect_keys(r, {"step_size", "max_iters", "utility_tol", "projection_tol"}, "solver.relaxed");
      if (r.contains("step_size")) cfg.relaxed.step_size = r.at("step_size").get<double>();
      if (r.contains("max_iters")) cfg.relaxed.max_iters = r.at("max_iters").get<int>();
      if (r.contains("utility_tol")) cfg.relaxed.utility_tol = r.at("utility_tol").get<double>();
      if (r.contains("projection_tol")) cfg.relaxed.projection_tol = r.at("projection_tol").get<double>();
    }
    if (s.contains("sa")) {
      const json& a = s.at("sa");
      expect_keys(a, {"t0", "alpha", "tmin", "p", "q"}, "solver.sa");
      if (a.contains("t0")) cfg.sa.t0 = a.at("t0").get<double>();
      if (a.contains("alpha")) cfg.sa.alpha = a.at("alpha").get<double>();
      if (a.contains("tmin")) cfg.sa.tmin = a.at("tmin").get<double>();
      if (a.contains("p")) cfg.sa.p = a.at("p").get<double>();
      if (a.contains("q")) cfg.sa.q = a.at("q").get<int>();
    }
  }

  if (root.contains("oracle_max_candidates"))
    cfg.oracle_max_candidates = root.at("oracle_max_candidates").get<double>();

  cfg.validate();
  return cfg;
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  try {
    return config_from_json(root);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string config_to_json(const ExperimentConfig& cfg) {
  ordered_json root;
  ordered_json s;
  s["name"] = cfg.scenario.name;
  s["area"] = {cfg.scenario.width, cfg.scenario.height};
  s["ap_grid"] = {cfg.scenario.ap_rows, cfg.scenario.ap_cols};
  s["clients"] = cfg.scenario.num_clients;
  ordered_json placement;
  if (cfg.scenario.placement.kind == PlacementSpec::Kind::Uniform) {
    placement["type"] = "uniform";
  } else {
    placement["type"] = "pmf";
    placement["floor_weight"] = cfg.scenario.placement.pmf.floor_weight;
    placement["components"] = ordered_json::array();
    for (const auto& c : cfg.scenario.placement.pmf.components)
      placement["components"].push_back(
          {{"center", {c.center.x(), c.center.y()}}, {"sigma", c.sigma_m}, {"weight", c.weight}});
  }
  s["placement"] = placement;
  s["walls"] = ordered_json::array();
  for (const auto& w : cfg.scenario.walls)
    s["walls"].push_back({{"a", {w.a.x(), w.a.y()}},
                          {"b", {w.b.x(), w.b.y()}},
                          {"attenuation_db", w.attenuation_db}});
  const auto& mp = cfg.scenario.mobility.params;
  s["mobility"] = {{"enabled", cfg.scenario.mobility.enabled},
                   {"speed_mps", {mp.speed_min_mps, mp.speed_max_mps}},
                   {"pause_s", {mp.pause_min_s, mp.pause_max_s}},
                   {"walk_s", {mp.walk_min_s, mp.walk_max_s}},
                   {"horizon_s", mp.horizon_s},
                   {"snapshot_period_s", mp.snapshot_period_s},
                   {"box", {mp.box_xmin, mp.box_xmax, mp.box_ymin, mp.box_ymax}}};
  root["scenario"] = s;

  ordered_json mcs_table = ordered_json::array();
  for (const auto& tier : cfg.radio.mcs_table)
    mcs_table.push_back({{"min_snr_db", tier.min_snr_db}, {"rate_bps", tier.rate_bps}});
  root["radio"] = {{"tx_power_dbm", cfg.radio.tx_power_dbm},
                   {"antenna_gain_dbi", cfg.radio.antenna_gain_dbi},
                   {"carrier_hz", cfg.radio.carrier_hz},
                   {"bandwidth_hz", cfg.radio.bandwidth_hz},
                   {"noise_figure_db", cfg.radio.noise_figure_db},
                   {"min_distance_m", cfg.radio.min_distance_m},
                   {"mcs", {{"table", mcs_table}}}};
  root["frame"] = {{"superframe_s", cfg.frame.superframe_s}, {"overhead_s", cfg.frame.overhead_s}};
  if (cfg.demands.kind == DemandSpec::Kind::Saturated) {
    root["demands"] = {{"mode", "saturated"}};
  } else {
    root["demands"] = {{"mode", "uniform"}, {"min_bps", cfg.demands.min_bps}, {"max_bps", cfg.demands.max_bps}};
  }
  root["policies"] = cfg.policies;
  root["seeds"] = cfg.seeds;
  root["solver"] = {{"relaxed",
                     {{"step_size", cfg.relaxed.step_size},
                      {"max_iters", cfg.relaxed.max_iters},
                      {"utility_tol", cfg.relaxed.utility_tol},
                      {"projection_tol", cfg.relaxed.projection_tol}}},
                    {"sa",
                     {{"t0", cfg.sa.t0},
                      {"alpha", cfg.sa.alpha},
                      {"tmin", cfg.sa.tmin},
                      {"p", cfg.sa.p},
                      {"q", cfg.sa.q}}}};
  root["oracle_max_candidates"] = cfg.oracle_max_candidates;
  return root.dump(2) + "\n";
}

Instance build_instance(const ExperimentConfig& cfg, std::uint64_t seed) {
  Instance inst;
  inst.topo.width = cfg.scenario.width;
  inst.topo.height = cfg.scenario.height;
  inst.topo.aps = scenario::grid_aps(cfg.scenario.width, cfg.scenario.height, cfg.scenario.ap_rows,
                                     cfg.scenario.ap_cols);
  inst.topo.walls = cfg.scenario.walls;

  const Rng root(seed);
  Rng placement_rng = root.fork(1);
  Rng demand_rng = root.fork(2);
  const Rng mobility_rng = root.fork(3);

  if (cfg.scenario.mobility.enabled) {
    // Mobile runs start from a uniform deployment inside the movement box.
    const auto& mp = cfg.scenario.mobility.params;
    Matrix initial(cfg.scenario.num_clients, 2);
    for (int i = 0; i < cfg.scenario.num_clients; ++i) {
      initial(i, 0) = placement_rng.uniform(mp.box_xmin, mp.box_xmax);
      initial(i, 1) = placement_rng.uniform(mp.box_ymin, mp.box_ymax);
    }
    inst.snapshots = scenario::random_waypoint(initial, mp, mobility_rng);
    inst.topo.clients = inst.snapshots.front();
  } else {
    inst.topo.clients =
        cfg.scenario.placement.kind == PlacementSpec::Kind::Uniform
            ? scenario::sample_clients_uniform(cfg.scenario.width, cfg.scenario.height,
                                               cfg.scenario.num_clients, placement_rng)
            : scenario::sample_clients_pmf(cfg.scenario.placement.pmf, cfg.scenario.width,
                                           cfg.scenario.height, cfg.scenario.num_clients,
                                           placement_rng);
    inst.snapshots = {inst.topo.clients};
  }

  if (cfg.demands.kind == DemandSpec::Kind::Uniform) {
    Vector lambda(cfg.scenario.num_clients);
    for (int i = 0; i < cfg.scenario.num_clients; ++i)
      lambda[i] = demand_rng.uniform(cfg.demands.min_bps, cfg.demands.max_bps);
    inst.demands = Demands::finite(std::move(lambda));
  }
  return inst;
}

CellResult solve_policy(const ExperimentConfig& cfg, const std::string& policy,
                        const Topology& topo, const Matrix& rates, const Demands& demands,
                        std::uint64_t seed, int snapshot, bool deterministic) {
  const bool finite = !demands.is_saturated();
  const Vector demand_bps = finite ? demands.bits_per_s() : Vector();
  const auto start = std::chrono::steady_clock::now();
  Rng rng(cell_seed(seed, policy, snapshot));
  const std::vector<FrameConfig> frames = uniform_frames(rates.cols(), cfg.frame);

  CellResult cell;
  cell.demand_bps = finite ? demand_bps : Vector::Zero(rates.rows());

  // Saturation policies keep their proportional-fair equal split even when
  // demands are finite; water-filled variants are separate policies.
  auto finish_with = [&](Association x, long iterations) {
    cell.x = std::move(x);
    cell.t = equal_airtime(cell.x, frames);
    cell.report.iterations = iterations;
  };

  if (policy == "snr-ea" || policy == "snr-wf") {
    Association x = baselines::associate_snr(rates);
    cell.x = std::move(x);
    cell.t = policy == "snr-wf" ? loadsolve::water_filling(cell.x, rates, frames, demand_bps)
                                : equal_airtime(cell.x, frames);
  } else if (policy == "greedy-ea" || policy == "greedy-wf") {
    Association x = baselines::associate_greedy(topo, rates);
    cell.x = std::move(x);
    cell.t = policy == "greedy-wf"
                 ? loadsolve::water_filling(cell.x, rates, frames, demand_bps)
                 : equal_airtime(cell.x, frames);
  } else if (policy == "minmax-ea" || policy == "minmax-wf") {
    const Vector lam = finite ? demand_bps : Vector::Ones(rates.rows());
    Association x = baselines::associate_minmax_load(rates, lam);
    cell.x = std::move(x);
    cell.t = policy == "minmax-wf"
                 ? loadsolve::water_filling(cell.x, rates, frames, demand_bps)
                 : equal_airtime(cell.x, frames);
  } else if (policy == "proposed-sat") {
    auto [x, report] = satsolve::solve_saturation(rates, frames, cfg.relaxed, rng, deterministic);
    finish_with(std::move(x), report.iterations);
  } else if (policy == "proposed-sawf") {
    auto [x0, sat_report] = satsolve::solve_saturation(rates, frames, cfg.relaxed, rng, deterministic);
    loadsolve::SAParams sa = cfg.sa;
    sa.seed = rng.raw();
    loadsolve::SAResult result =
        loadsolve::simulated_annealing(x0, rates, frames, demand_bps, sa);
    cell.x = std::move(result.x);
    cell.t = std::move(result.t);
    cell.report.iterations = sat_report.iterations + result.report.iterations;
  } else if (policy == "oracle-sat") {
    oracle::SaturationOptimum opt =
        oracle::exhaustive_saturation(rates, frames, cfg.oracle_max_candidates);
    finish_with(std::move(opt.x), 0);
  } else if (policy == "oracle-finite") {
    oracle::FiniteOptimum opt =
        oracle::exhaustive_finite(rates, frames, demand_bps, cfg.oracle_max_candidates);
    cell.x = std::move(opt.x);
    cell.t = std::move(opt.t);
  } else {
    throw ConfigError("unknown policy '" + policy + "'");
  }

  cell.report.per_client_throughput_bps = throughput(cell.x, cell.t, rates, frames);
  if (finite) {
    // A station cannot carry more traffic than it offers; equal-airtime
    // policies may allocate beyond the demand and the surplus goes unused.
    cell.report.per_client_throughput_bps =
        cell.report.per_client_throughput_bps.cwiseMin(demand_bps);
  }
  cell.report.utility_nats = utility(cell.report.per_client_throughput_bps);
  cell.report.aggregate_bps = cell.report.per_client_throughput_bps.sum();
  cell.report.policy_name = policy;
  cell.report.seed = seed;
  cell.report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return cell;
}

namespace {

struct SeedBlock {
  std::string results;
  std::string summary;
};

SeedBlock run_seed(const ExperimentConfig& cfg, std::uint64_t seed, const RunOptions& options) {
  SeedBlock block;
  const Instance inst = build_instance(cfg, seed);
  Topology topo = inst.topo;
  for (int snapshot = 0; snapshot < static_cast<int>(inst.snapshots.size()); ++snapshot) {
    topo.clients = inst.snapshots[static_cast<std::size_t>(snapshot)];
    const Matrix rates = phy::rate_matrix(topo, cfg.radio);
    for (const std::string& policy : cfg.policies) {
      const CellResult cell =
          solve_policy(cfg, policy, topo, rates, inst.demands, seed, snapshot, options.deterministic);
      for (Index i = 0; i < cell.x.num_clients(); ++i) {
        const Index j = cell.x.ap[i];
        const double s = cell.report.per_client_throughput_bps[i];
        const double demand = cell.demand_bps[i];
        const bool satisfied = demand == 0.0 || s >= demand * (1.0 - kFeasTol);
        block.results += cfg.scenario.name + "," + std::to_string(seed) + "," +
                         std::to_string(snapshot) + "," + policy + "," + std::to_string(i) + "," +
                         std::to_string(j) + "," + fmt(rates(i, j)) + "," + fmt(cell.t(i, j)) +
                         "," + fmt(s) + "," + fmt(demand) + "," + (satisfied ? "1" : "0") + "\n";
      }
      // wall_ms stays 0 unless timings were requested: outputs must be
      // reproducible byte for byte across runs and thread counts.
      const double wall_ms = options.timings ? cell.report.wall_time_s * 1e3 : 0.0;
      block.summary += cfg.scenario.name + "," + std::to_string(seed) + "," +
                       std::to_string(snapshot) + "," + policy + "," +
                       fmt(cell.report.utility_nats) + "," + fmt(cell.report.aggregate_bps) + "," +
                       std::to_string(cell.report.iterations) + "," + fmt(wall_ms) + "\n";
    }
  }
  return block;
}

}  // namespace

void run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate();
  if (options.threads < 1) throw ConfigError("threads must be >= 1");
  std::filesystem::create_directories(options.out_dir);

  std::vector<SeedBlock> blocks(cfg.seeds.size());
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::atomic<std::size_t> next{0};
  const int workers = std::min<int>(options.threads, static_cast<int>(cfg.seeds.size()));
  auto worker = [&] {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= cfg.seeds.size()) return;
      try {
        blocks[k] = run_seed(cfg, cfg.seeds[k], options);
      } catch (...) {
        std::scoped_lock lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::ofstream results(std::filesystem::path(options.out_dir) / "results.csv");
  std::ofstream summary(std::filesystem::path(options.out_dir) / "summary.csv");
  if (!results || !summary) throw std::runtime_error("cannot write output files in " + options.out_dir);
  results << "run_id,seed,snapshot,policy,client_id,ap_id,rate_bps,airtime_frac,throughput_bps,"
             "demand_bps,satisfied\n";
  summary << "run_id,seed,snapshot,policy,utility_nats,aggregate_bps,solver_iters,wall_ms\n";
  for (const SeedBlock& block : blocks) {
    results << block.results;
    summary << block.summary;
  }
}

namespace {

struct CsvRow {
  std::uint64_t seed;
  int snapshot;
  std::string policy;
  double throughput;
  double demand;
  int satisfied;
};

std::vector<CsvRow> read_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open results file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty results file: " + path);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) header.push_back(field);
  }
  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ConfigError("results file missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_seed = column("seed"), c_snap = column("snapshot"),
                    c_policy = column("policy"), c_tp = column("throughput_bps"),
                    c_demand = column("demand_bps"), c_sat = column("satisfied");

  std::vector<CsvRow> rows;
  std::vector<std::string> fields;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    fields.clear();
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    CsvRow row;
    row.seed = std::stoull(fields.at(c_seed));
    row.snapshot = std::stoi(fields.at(c_snap));
    row.policy = fields.at(c_policy);
    row.throughput = std::stod(fields.at(c_tp));
    row.demand = std::stod(fields.at(c_demand));
    row.satisfied = std::stoi(fields.at(c_sat));
    rows.push_back(std::move(row));
  }
  return rows;
}

PairedStats paired_stats(std::vector<double> deltas, const CompareOptions& options) {
  PairedStats stats;
  const std::size_t n = deltas.size();
  stats.mean = 0.0;
  for (const double d : deltas) stats.mean += d;
  stats.mean /= static_cast<double>(n);
  std::vector<double> sorted = deltas;
  std::sort(sorted.begin(), sorted.end());
  stats.median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

  Rng rng(options.bootstrap_seed);
  std::vector<double> means(static_cast<std::size_t>(options.bootstrap_draws));
  for (auto& m : means) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      acc += deltas[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1))];
    m = acc / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  const auto pick = [&](double quantile) {
    const auto idx = static_cast<std::size_t>(quantile * (means.size() - 1));
    return means[idx];
  };
  stats.ci_lo = pick(0.025);
  stats.ci_hi = pick(0.975);
  return stats;
}

}  // namespace

CompareResult compare(const std::string& results_csv, const std::string& baseline,
                      const std::string& candidate, const CompareOptions& options) {
  const std::vector<CsvRow> rows = read_results(results_csv);

  // Aggregate per (seed, snapshot, policy); utility from clamped logs since
  // this is a reporting path.
  struct Group {
    double aggregate = 0.0;
    double utility = 0.0;
    long satisfied = 0;
    long demand_rows = 0;
  };
  std::map<std::tuple<std::uint64_t, int, std::string>, Group> groups;
  for (const CsvRow& row : rows) {
    Group& g = groups[{row.seed, row.snapshot, row.policy}];
    g.aggregate += row.throughput;
    g.utility += std::log(std::max(row.throughput, 1.0));
    if (row.demand > 0.0) {
      ++g.demand_rows;
      g.satisfied += row.satisfied;
    }
  }

  // Mean over snapshots to get one value per seed and policy.
  struct SeedValue {
    double aggregate = 0.0, utility = 0.0;
    int snapshots = 0;
  };
  std::map<std::pair<std::uint64_t, std::string>, SeedValue> per_seed;
  long base_sat = 0, base_rows = 0, cand_sat = 0, cand_rows = 0;
  for (const auto& [key, g] : groups) {
    const auto& [seed, snapshot, policy] = key;
    (void)snapshot;
    if (policy != baseline && policy != candidate) continue;
    SeedValue& v = per_seed[{seed, policy}];
    v.aggregate += g.aggregate;
    v.utility += g.utility;
    ++v.snapshots;
    if (policy == baseline) {
      base_sat += g.satisfied;
      base_rows += g.demand_rows;
    } else {
      cand_sat += g.satisfied;
      cand_rows += g.demand_rows;
    }
  }

  std::vector<double> agg_delta, util_delta;
  for (const auto& [key, v] : per_seed) {
    if (key.second != baseline) continue;
    const auto it = per_seed.find({key.first, candidate});
    if (it == per_seed.end()) continue;
    const SeedValue& b = v;
    const SeedValue& c = it->second;
    agg_delta.push_back(c.aggregate / c.snapshots - b.aggregate / b.snapshots);
    util_delta.push_back(c.utility / c.snapshots - b.utility / b.snapshots);
  }
  if (agg_delta.empty())
    throw ConfigError("labels '" + baseline + "' and '" + candidate +
                      "' have no paired seeds in " + results_csv);

  CompareResult result;
  result.baseline = baseline;
  result.candidate = candidate;
  result.num_pairs = static_cast<int>(agg_delta.size());
  result.aggregate_delta_bps = paired_stats(agg_delta, options);
  result.utility_delta_nats = paired_stats(util_delta, options);
  result.baseline_demand_met = base_rows > 0 ? static_cast<double>(base_sat) / base_rows : 1.0;
  result.candidate_demand_met = cand_rows > 0 ? static_cast<double>(cand_sat) / cand_rows : 1.0;
  return result;
}

std::string format_compare(const CompareResult& r) {
  std::ostringstream out;
  out << "paired comparison: " << r.candidate << " - " << r.baseline << " over " << r.num_pairs
      << " seeds\n";
  char buf[160];
  std::snprintf(buf, sizeof(buf), "  aggregate throughput delta [bps]: mean %.6g median %.6g 95%% CI [%.6g, %.6g]\n",
                r.aggregate_delta_bps.mean, r.aggregate_delta_bps.median, r.aggregate_delta_bps.ci_lo,
                r.aggregate_delta_bps.ci_hi);
  out << buf;
  std::snprintf(buf, sizeof(buf), "  utility delta [nats]: mean %.6g median %.6g 95%% CI [%.6g, %.6g]\n",
                r.utility_delta_nats.mean, r.utility_delta_nats.median, r.utility_delta_nats.ci_lo,
                r.utility_delta_nats.ci_hi);
  out << buf;
  std::snprintf(buf, sizeof(buf), "  demand met: %s %.4f, %s %.4f\n", r.baseline.c_str(),
                r.baseline_demand_met, r.candidate.c_str(), r.candidate_demand_met);
  out << buf;
  return out.str();
}

}  // namespace mmw::exp
