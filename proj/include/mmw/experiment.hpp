#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mmw/loadsolve.hpp"
#include "mmw/phy.hpp"
#include "mmw/satsolve.hpp"
#include "mmw/scenario.hpp"
#include "mmw/topology.hpp"
#include "mmw/types.hpp"

namespace mmw::exp {

/// Configuration problems: bad JSON, unknown keys, invalid values. The
/// message carries the parse position or key path.
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PlacementSpec {
  enum class Kind { Pmf, Uniform };
  Kind kind = Kind::Uniform;
  scenario::PlacementPmf pmf;
};

struct MobilitySpec {
  bool enabled = false;
  scenario::MobilityParams params;
};

struct ScenarioSpec {
  std::string name = "scenario";
  double width = 24.0, height = 20.0;
  int ap_rows = 2, ap_cols = 2;
  int num_clients = 10;
  PlacementSpec placement;
  std::vector<Wall> walls;
  MobilitySpec mobility;
};

struct DemandSpec {
  enum class Kind { Saturated, Uniform };
  Kind kind = Kind::Saturated;
  double min_bps = 0.46e9;
  double max_bps = 2.3e9;
};

struct ExperimentConfig {
  ScenarioSpec scenario;
  phy::RadioConfig radio;
  FrameConfig frame;
  DemandSpec demands;
  std::vector<std::string> policies = {"snr-ea", "proposed-sat"};
  std::vector<std::uint64_t> seeds = {1};
  satsolve::RelaxedSolverParams relaxed;
  loadsolve::SAParams sa;
  double oracle_max_candidates = 1e7;

  void validate() const;
};

ExperimentConfig default_config();
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);

const std::vector<std::string>& known_policies();

/// One solved (seed, snapshot, policy) cell.
struct CellResult {
  Association x;
  Matrix t;
  SolveReport report;
  Vector demand_bps;  // zero vector in saturated mode
};

/// Topology (and demands) for one seed; mobility adds one entry per snapshot.
struct Instance {
  Topology topo;
  std::vector<Matrix> snapshots;  // client positions per snapshot
  Demands demands = Demands::saturated();
};

Instance build_instance(const ExperimentConfig& cfg, std::uint64_t seed);

CellResult solve_policy(const ExperimentConfig& cfg, const std::string& policy,
                        const Topology& topo, const Matrix& rates, const Demands& demands,
                        std::uint64_t seed, int snapshot, bool deterministic);

struct RunOptions {
  std::string out_dir = ".";
  int threads = 1;
  bool deterministic = false;
  bool timings = false;  // when off, wall_ms is written as 0 so outputs are reproducible
};

/// Executes the policy x seed x snapshot grid and writes results.csv and
/// summary.csv under out_dir. Row order and content are independent of the
/// thread count.
void run_experiment(const ExperimentConfig& cfg, const RunOptions& options);

struct CompareOptions {
  int bootstrap_draws = 10000;
  std::uint64_t bootstrap_seed = 9001;
};

struct PairedStats {
  double mean = 0.0;
  double median = 0.0;
  double ci_lo = 0.0;  // 95% bootstrap CI of the mean
  double ci_hi = 0.0;
};

struct CompareResult {
  std::string baseline;
  std::string candidate;
  int num_pairs = 0;
  PairedStats aggregate_delta_bps;
  PairedStats utility_delta_nats;
  double baseline_demand_met = 0.0;   // fraction of clients at demand
  double candidate_demand_met = 0.0;
};

/// Per-seed paired comparison of two policy labels in a results CSV.
CompareResult compare(const std::string& results_csv, const std::string& baseline,
                      const std::string& candidate, const CompareOptions& options = {});

std::string format_compare(const CompareResult& r);

}  // namespace mmw::exp
