#pragma once
// Scenario runners behind the `experiment` CLI subcommand. Each one compares
// a small matrix of cluster configurations on the simulator: speculation
// on/off against a straggling node, alternative block distributions, split
// size versus block-bounded splits, removing the slow nodes, and the three
// candidate-store structures on a real mining run.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "apmr/cluster.hpp"
#include "apmr/jobs.hpp"
#include "apmr/runtime.hpp"

namespace apmr {

struct ExperimentArm {
  std::string name;
  double makespan = 0.0;
  JobMetrics metrics;
  std::map<std::string, double> stats;
  std::vector<NodeSpeedRow> node_speeds;
};

struct ExperimentResult {
  std::string experiment;
  std::map<std::string, std::string> params;  // scenario echo, deterministic
  std::vector<ExperimentArm> arms;
  std::string best;   // smallest makespan
  std::string worst;  // largest makespan
};

// Equal map tasks, one per single-core node; one node runs at straggler_speed.
// Arms: speculation-off, speculation-on.
struct SpeculationScenario {
  double straggler_speed = 0.2;
  std::size_t tasks = 4;
  std::size_t task_records = 10;
  double ratio = 1.5;
};
ExperimentResult run_speculation_experiment(const SpeculationScenario& scenario = {});

// One map task per block under each candidate distribution.
struct PlacementArm {
  std::string name;
  BlockPlacement placement;
  int replication_factor = 1;
};
struct PlacementScenario {
  ClusterSpec cluster;  // defaults to the reference cluster
  std::size_t task_records = 20;
  std::optional<CostModel> cost;  // default: record-dominated (no startup, no candidate term)
  std::vector<PlacementArm> arms;
};
ExperimentResult run_placement_experiment(const PlacementScenario& scenario);
// The three bundled distributions over the cluster's first four nodes:
// bd1 avoids one slow node entirely, bd2 touches both, bd3 replicates every
// block everywhere.
std::vector<PlacementArm> stock_block_distributions(const ClusterSpec& cluster);

// Same file once with block-bounded splits and once with a finer line split.
struct SplitScenario {
  std::size_t lines = 60000;
  std::size_t block_lines = 12000;
  std::size_t split_lines = 5000;
  std::optional<ClusterSpec> cluster;  // default: four equal four-slot nodes
};
ExperimentResult run_split_experiment(const SplitScenario& scenario = {});

// Equal map tasks on the full cluster, then with the virtual nodes removed.
struct NodesScenario {
  std::size_t tasks = 12;
  std::size_t task_records = 20;
  std::optional<ClusterSpec> cluster;  // default: reference cluster, record-dominated cost
};
ExperimentResult run_nodes_experiment(const NodesScenario& scenario = {});

// Full mining runs, one per store variant, over the same input and placement;
// the frequent itemsets must be identical, only the simulated times differ.
ExperimentResult run_structures_experiment(const TransactionDatabase& db, MiningConfig base,
                                           const ClusterSpec& cluster);

}  // namespace apmr
