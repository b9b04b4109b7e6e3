#pragma once
// Deterministic simulated MapReduce over a heterogeneous cluster: block
// placement, locality-aware scheduling, map -> combine -> shuffle -> reduce
// execution, speculative execution and a parametric cost model. Simulated
// time is in abstract units; identical inputs always yield identical
// timelines and outputs.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "apmr/cluster.hpp"
#include "apmr/dataset.hpp"
#include "apmr/itemset.hpp"

namespace apmr {

class JobError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TaskKind { Map, Reduce };
std::string_view to_string(TaskKind k);

struct TaskRecord {
  int task_id = 0;
  int attempt = 0;  // 0 = original, 1 = speculative backup
  TaskKind kind = TaskKind::Map;
  std::string node;
  double start = 0.0;
  double end = 0.0;
  bool speculative = false;
  bool killed = false;
  bool local = false;
};

struct NodeAggregate {
  std::string name;
  NodeKind kind = NodeKind::Physical;
  std::size_t map_tasks = 0;        // committed map attempts on this node
  double mean_map_duration = 0.0;   // over committed map attempts
  double busy_time = 0.0;           // slot occupancy, killed attempts included
};

struct JobMetrics {
  std::vector<TaskRecord> records;  // sorted by (task_id, attempt)
  double makespan = 0.0;            // max committed end - min start
  std::vector<NodeAggregate> per_node;
};

struct NodeSpeedRow {
  std::string name;
  NodeKind kind = NodeKind::Physical;
  std::size_t map_tasks = 0;
  double mean_map_duration = 0.0;
};

// Per-node mean duration of committed map attempts, slowest node first.
// Killed attempts are excluded; nodes that committed no map task are omitted.
std::vector<NodeSpeedRow> summarize_node_speeds(const JobMetrics& metrics);

// Shuffle partitioner: byte sum of the key's canonical space-separated
// decimal rendering, mod the reducer count. Stable across platforms.
std::size_t partition_key(const Itemset& key, std::size_t reducers);

// (startup + alpha*records + beta*records*candidates) / speed_factor, times
// remote_penalty when not local.
double estimate_task_duration(std::size_t records, std::size_t candidates, const NodeSpec& node,
                              bool is_local, const CostModel& cost, double remote_penalty);

struct SimTask {
  int task_id = 0;
  std::optional<std::size_t> block_id;  // nullopt: not locality-bound (reduce)
  std::size_t records = 0;
};

struct ScheduleOptions {
  TaskKind kind = TaskKind::Map;
  std::size_t candidates = 0;
  double earliest_start = 0.0;
  std::optional<CostModel> cost;  // defaults to the cluster's
};

// Event-driven assignment in simulated time. Free slots on replica holders
// take precedence (ties: node declaration order, then task id); otherwise a
// task may run remote at the remote penalty on the first free node. When
// every block is held by every node, all map tasks are pinned to the first
// node and overflow into waves of its core count. Reduce tasks carry no
// locality and are spread round-robin. A running task with a completed
// sibling becomes a straggler once its elapsed time reaches
// speculation.ratio x the median completed duration; it gets at most one
// backup, on the fastest idle node other than its own, and the earliest
// finisher commits while the loser is marked killed.
JobMetrics plan_schedule(std::span<const SimTask> tasks, const BlockPlacement& placement,
                         const ClusterSpec& cluster, const ScheduleOptions& options = {});

struct KeyValue {
  Itemset key;
  std::uint64_t value = 0;

  friend bool operator==(const KeyValue&, const KeyValue&) = default;
};

class Emitter {
 public:
  void emit(Itemset key, std::uint64_t value) { pairs_.push_back({std::move(key), value}); }
  std::vector<KeyValue> take() { return std::move(pairs_); }

 private:
  std::vector<KeyValue> pairs_;
};

// `first_line` is the 0-based index of lines.front() in the whole job input,
// for error messages.
using MapFn = std::function<void(std::span<const std::string> lines, std::size_t first_line,
                                 Emitter& out)>;
using ReduceFn =
    std::function<std::optional<KeyValue>(const Itemset& key, std::span<const std::uint64_t> values)>;

struct JobSpec {
  std::string name;
  MapFn map;
  ReduceFn reduce;
  ReduceFn combine;               // empty function: no combiner
  std::size_t reducers = 1;
  std::size_t candidates = 0;     // cost-model input (cached candidate count)
  std::optional<CostModel> cost;  // defaults to the cluster's
};

struct JobInput {
  std::span<const std::string> lines;
  std::vector<Split> splits;
  std::vector<Block> blocks;
};

struct JobResult {
  std::vector<KeyValue> output;  // sorted by key
  JobMetrics metrics;
};

// Executes map tasks per plan_schedule, applies the combiner exactly once per
// map task grouped by key, shuffles by partition_key, and reduces each
// partition with keys in ascending order after every map task has finished.
// The reduced output is a pure function of (map, combine, reduce, lines):
// placement, split boundaries and speculation never change it.
JobResult run_job(const JobSpec& job, const JobInput& input, const BlockPlacement& placement,
                  const ClusterSpec& cluster);

}  // namespace apmr
