#include "apmr/experiments.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace apmr {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void fill_arm_stats(ExperimentArm& arm, const ClusterSpec& cluster) {
  std::size_t committed_maps = 0, speculative = 0, killed = 0, local = 0, vm_local = 0;
  for (const TaskRecord& r : arm.metrics.records) {
    if (r.speculative) ++speculative;
    if (r.killed) ++killed;
    if (r.kind != TaskKind::Map || r.killed) continue;
    ++committed_maps;
    if (!r.local) continue;
    ++local;
    int ni = cluster.index_of(r.node);
    if (ni >= 0 && cluster.nodes[static_cast<std::size_t>(ni)].kind == NodeKind::Virtual)
      ++vm_local;
  }
  arm.stats["map_tasks"] = static_cast<double>(committed_maps);
  arm.stats["speculative_launches"] = static_cast<double>(speculative);
  arm.stats["killed_attempts"] = static_cast<double>(killed);
  arm.stats["local_map_tasks"] = static_cast<double>(local);
  arm.stats["vm_local_map_tasks"] = static_cast<double>(vm_local);
}

void rank_arms(ExperimentResult& result) {
  if (result.arms.empty()) return;
  const ExperimentArm* best = &result.arms.front();
  const ExperimentArm* worst = &result.arms.front();
  for (const ExperimentArm& arm : result.arms) {
    if (arm.makespan < best->makespan) best = &arm;
    if (arm.makespan > worst->makespan) worst = &arm;
  }
  result.best = best->name;
  result.worst = worst->name;
}

std::vector<SimTask> one_task_per_block(const BlockPlacement& placement, std::size_t records) {
  std::vector<SimTask> tasks;
  for (const auto& [block_id, holders] : placement.holders) {
    SimTask t;
    t.task_id = static_cast<int>(block_id);
    t.block_id = block_id;
    t.records = records;
    tasks.push_back(t);
  }
  return tasks;
}

BlockPlacement round_robin_placement(std::size_t block_count, const ClusterSpec& cluster) {
  BlockPlacement placement;
  for (std::size_t b = 0; b < block_count; ++b)
    placement.holders[b] = {cluster.nodes[b % cluster.nodes.size()].name};
  return placement;
}

}  // namespace

ExperimentResult run_speculation_experiment(const SpeculationScenario& scenario) {
  if (scenario.tasks < 2) throw std::invalid_argument("speculation scenario needs >= 2 tasks");
  if (!(scenario.straggler_speed > 0.0))
    throw std::invalid_argument("straggler speed must be > 0");

  // One single-core node per task; the last node is the straggler. No remote
  // penalty, so the backup's hand-computed duration equals the original's
  // reference time.
  ClusterSpec cluster;
  for (std::size_t i = 0; i + 1 < scenario.tasks; ++i)
    cluster.nodes.push_back({"n" + std::to_string(i + 1), 1, 1.0, NodeKind::Physical});
  cluster.nodes.push_back({"slow", 1, scenario.straggler_speed, NodeKind::Virtual});
  cluster.replication_factor = 1;
  cluster.remote_penalty = 1.0;
  cluster.cost = {0.0, 1.0, 0.0};
  cluster.speculation.ratio = scenario.ratio;
  cluster.seed = 1;

  BlockPlacement placement;
  for (std::size_t i = 0; i < scenario.tasks; ++i)
    placement.holders[i] = {cluster.nodes[i].name};
  std::vector<SimTask> tasks = one_task_per_block(placement, scenario.task_records);

  ExperimentResult result;
  result.experiment = "speculation";
  result.params["tasks"] = std::to_string(scenario.tasks);
  result.params["task_records"] = std::to_string(scenario.task_records);
  result.params["straggler_speed"] = fmt_double(scenario.straggler_speed);
  result.params["ratio"] = fmt_double(scenario.ratio);

  for (bool enabled : {false, true}) {
    ClusterSpec arm_cluster = cluster;
    arm_cluster.speculation.enabled = enabled;
    ExperimentArm arm;
    arm.name = enabled ? "speculation-on" : "speculation-off";
    arm.metrics = plan_schedule(tasks, placement, arm_cluster);
    arm.makespan = arm.metrics.makespan;
    fill_arm_stats(arm, arm_cluster);
    arm.node_speeds = summarize_node_speeds(arm.metrics);
    result.arms.push_back(std::move(arm));
  }
  rank_arms(result);
  return result;
}

std::vector<PlacementArm> stock_block_distributions(const ClusterSpec& cluster) {
  if (cluster.nodes.size() < 4)
    throw std::invalid_argument("stock distributions need at least four nodes");
  const auto& n = cluster.nodes;
  std::vector<PlacementArm> arms(3);

  arms[0].name = "bd1";
  arms[0].replication_factor = 1;
  arms[0].placement.holders = {{0, {n[1].name}}, {1, {n[0].name}}, {2, {n[0].name}},
                               {3, {n[1].name}}, {4, {n[3].name}}};

  arms[1].name = "bd2";
  arms[1].replication_factor = 1;
  arms[1].placement.holders = {{0, {n[0].name}}, {1, {n[3].name}}, {2, {n[1].name}},
                               {3, {n[0].name}}, {4, {n[2].name}}};

  arms[2].name = "bd3";
  arms[2].replication_factor = static_cast<int>(n.size());
  for (std::size_t b = 0; b < 5; ++b) {
    std::vector<std::string> all;
    for (const NodeSpec& node : n) all.push_back(node.name);
    arms[2].placement.holders[b] = std::move(all);
  }
  return arms;
}

ExperimentResult run_placement_experiment(const PlacementScenario& scenario) {
  ClusterSpec cluster = scenario.cluster;
  if (cluster.nodes.empty()) cluster = ClusterConfig::reference_cluster().cluster;
  cluster.cost = scenario.cost.value_or(CostModel{0.0, 1.0, 0.0});
  if (scenario.arms.empty()) throw std::invalid_argument("placement experiment needs placements");

  ExperimentResult result;
  result.experiment = "placement";
  result.params["task_records"] = std::to_string(scenario.task_records);

  for (const PlacementArm& spec : scenario.arms) {
    ClusterSpec arm_cluster = cluster;
    arm_cluster.replication_factor = spec.replication_factor;

    // validate against one single-line block per placement entry
    std::vector<Block> blocks;
    for (const auto& [block_id, holders] : spec.placement.holders)
      blocks.push_back({block_id, block_id, block_id + 1});
    BlockPlacement placement = place_blocks(blocks, arm_cluster, &spec.placement);

    std::vector<SimTask> tasks = one_task_per_block(placement, scenario.task_records);
    ExperimentArm arm;
    arm.name = spec.name;
    arm.metrics = plan_schedule(tasks, placement, arm_cluster);
    arm.makespan = arm.metrics.makespan;
    fill_arm_stats(arm, arm_cluster);
    arm.stats["replication_factor"] = spec.replication_factor;
    arm.node_speeds = summarize_node_speeds(arm.metrics);
    result.arms.push_back(std::move(arm));
  }
  rank_arms(result);
  return result;
}

ExperimentResult run_split_experiment(const SplitScenario& scenario) {
  ClusterSpec cluster;
  if (scenario.cluster) {
    cluster = *scenario.cluster;
  } else {
    for (int i = 1; i <= 4; ++i)
      cluster.nodes.push_back({"n" + std::to_string(i), 4, 1.0, NodeKind::Physical});
    cluster.replication_factor = 1;
    cluster.cost = {0.0, 1.0, 0.0};
    cluster.seed = 7;
  }

  std::vector<Block> blocks = partition_into_blocks(scenario.lines, scenario.block_lines);
  BlockPlacement placement = round_robin_placement(blocks.size(), cluster);

  ExperimentResult result;
  result.experiment = "split";
  result.params["lines"] = std::to_string(scenario.lines);
  result.params["block_lines"] = std::to_string(scenario.block_lines);
  result.params["split_lines"] = std::to_string(scenario.split_lines);

  auto run_arm = [&](const std::string& name, const std::vector<Split>& splits) {
    std::vector<SimTask> tasks;
    for (const Split& s : splits) {
      SimTask t;
      t.task_id = static_cast<int>(s.split_id);
      for (const Block& b : blocks) {
        if (s.begin >= b.begin && s.begin < b.end) t.block_id = b.block_id;
      }
      t.records = s.lines();
      tasks.push_back(t);
    }
    ExperimentArm arm;
    arm.name = name;
    arm.metrics = plan_schedule(tasks, placement, cluster);
    arm.makespan = arm.metrics.makespan;
    fill_arm_stats(arm, cluster);
    arm.node_speeds = summarize_node_speeds(arm.metrics);
    result.arms.push_back(std::move(arm));
  };

  run_arm("block-splits", splits_from_blocks(blocks));
  run_arm("line-splits", make_line_splits(scenario.lines, scenario.split_lines));
  rank_arms(result);

  if (result.arms[1].makespan > 0.0)
    result.params["makespan_ratio"] =
        fmt_double(result.arms[0].makespan / result.arms[1].makespan);
  return result;
}

ExperimentResult run_nodes_experiment(const NodesScenario& scenario) {
  ClusterSpec full;
  if (scenario.cluster) {
    full = *scenario.cluster;
  } else {
    full = ClusterConfig::reference_cluster().cluster;
    full.cost = {0.0, 1.0, 0.0};
  }
  full.replication_factor = 1;

  ClusterSpec physical_only = full;
  physical_only.nodes.clear();
  for (const NodeSpec& n : full.nodes) {
    if (n.kind == NodeKind::Physical) physical_only.nodes.push_back(n);
  }
  if (physical_only.nodes.empty())
    throw std::invalid_argument("nodes experiment needs at least one physical node");

  ExperimentResult result;
  result.experiment = "nodes";
  result.params["tasks"] = std::to_string(scenario.tasks);
  result.params["task_records"] = std::to_string(scenario.task_records);

  auto run_arm = [&](const std::string& name, const ClusterSpec& cluster) {
    BlockPlacement placement = round_robin_placement(scenario.tasks, cluster);
    std::vector<SimTask> tasks = one_task_per_block(placement, scenario.task_records);
    ExperimentArm arm;
    arm.name = name;
    arm.metrics = plan_schedule(tasks, placement, cluster);
    arm.makespan = arm.metrics.makespan;
    fill_arm_stats(arm, cluster);
    arm.stats["slots"] = 0;
    for (const NodeSpec& n : cluster.nodes) arm.stats["slots"] += n.cores;
    arm.node_speeds = summarize_node_speeds(arm.metrics);
    result.arms.push_back(std::move(arm));
  };

  run_arm("all-nodes", full);
  run_arm("physical-only", physical_only);
  rank_arms(result);
  return result;
}

ExperimentResult run_structures_experiment(const TransactionDatabase& db, MiningConfig base,
                                           const ClusterSpec& cluster) {
  ExperimentResult result;
  result.experiment = "structures";
  result.params["min_count"] = std::to_string(base.resolved_min_count(db.transactions.size()));
  result.params["filtered_transactions"] = base.use_filtered_transactions ? "on" : "off";

  std::vector<Block> blocks = partition_into_blocks(db.line_count, base.block_lines);
  BlockPlacement placement = place_blocks(blocks, cluster);

  std::optional<std::string> reference_output;
  bool identical = true;
  for (StoreVariant variant : kStoreVariants) {
    MiningConfig config = base;
    config.variant = variant;
    MiningResult mined = run_apriori(db, config, cluster, placement);

    std::string output = frequent_itemsets_text(mined.levels);
    if (!reference_output) {
      reference_output = output;
    } else if (*reference_output != output) {
      identical = false;
    }

    ExperimentArm arm;
    arm.name = std::string(to_string(variant));
    arm.makespan = mined.total_makespan;
    arm.stats["levels"] = static_cast<double>(
        std::count_if(mined.levels.begin(), mined.levels.end(),
                      [](const FrequentLevel& l) { return !l.empty(); }));
    arm.stats["frequent_itemsets"] = static_cast<double>(mined.frequent_itemsets().size());
    arm.stats["jobs"] = static_cast<double>(mined.jobs.size());
    result.arms.push_back(std::move(arm));
  }
  result.params["outputs_identical"] = identical ? "true" : "false";
  rank_arms(result);
  return result;
}

}  // namespace apmr
