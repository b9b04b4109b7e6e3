#include "apmr/runtime.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <set>

namespace apmr {

std::string_view to_string(TaskKind k) { return k == TaskKind::Map ? "map" : "reduce"; }

std::size_t partition_key(const Itemset& key, std::size_t reducers) {
  std::string rendered = format_itemset(key);
  std::size_t sum = 0;
  for (unsigned char c : rendered) sum += c;
  return sum % reducers;
}

double estimate_task_duration(std::size_t records, std::size_t candidates, const NodeSpec& node,
                              bool is_local, const CostModel& cost, double remote_penalty) {
  double work = cost.startup + cost.alpha * static_cast<double>(records) +
                cost.beta * static_cast<double>(records) * static_cast<double>(candidates);
  double duration = work / node.speed_factor;
  if (!is_local) duration *= remote_penalty;
  return duration;
}

std::vector<NodeSpeedRow> summarize_node_speeds(const JobMetrics& metrics) {
  struct Acc {
    NodeKind kind = NodeKind::Physical;
    std::size_t tasks = 0;
    double total = 0.0;
  };
  std::map<std::string, Acc> acc;
  for (const TaskRecord& r : metrics.records) {
    if (r.kind != TaskKind::Map || r.killed) continue;
    auto& a = acc[r.node];
    ++a.tasks;
    a.total += r.end - r.start;
  }
  for (const NodeAggregate& n : metrics.per_node) {
    auto it = acc.find(n.name);
    if (it != acc.end()) it->second.kind = n.kind;
  }

  std::vector<NodeSpeedRow> rows;
  rows.reserve(acc.size());
  for (const auto& [name, a] : acc)
    rows.push_back({name, a.kind, a.tasks, a.total / static_cast<double>(a.tasks)});
  std::stable_sort(rows.begin(), rows.end(), [](const NodeSpeedRow& a, const NodeSpeedRow& b) {
    if (a.mean_map_duration != b.mean_map_duration) return a.mean_map_duration > b.mean_map_duration;
    return a.name < b.name;
  });
  return rows;
}

namespace {

struct Attempt {
  std::size_t task_index = 0;
  int attempt_no = 0;
  int node = 0;
  double start = 0.0;
  double end = 0.0;
  bool speculative = false;
  bool local = false;
};

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

std::vector<NodeAggregate> aggregate_per_node(const std::vector<TaskRecord>& records,
                                              const ClusterSpec& cluster) {
  std::vector<NodeAggregate> out;
  out.reserve(cluster.nodes.size());
  for (const NodeSpec& n : cluster.nodes) {
    NodeAggregate agg;
    agg.name = n.name;
    agg.kind = n.kind;
    double map_total = 0.0;
    for (const TaskRecord& r : records) {
      if (r.node != n.name) continue;
      agg.busy_time += r.end - r.start;
      if (r.kind == TaskKind::Map && !r.killed) {
        ++agg.map_tasks;
        map_total += r.end - r.start;
      }
    }
    if (agg.map_tasks > 0) agg.mean_map_duration = map_total / static_cast<double>(agg.map_tasks);
    out.push_back(std::move(agg));
  }
  return out;
}

}  // namespace

JobMetrics plan_schedule(std::span<const SimTask> tasks, const BlockPlacement& placement,
                         const ClusterSpec& cluster, const ScheduleOptions& options) {
  cluster.validate();
  JobMetrics metrics;
  if (tasks.empty()) return metrics;

  const std::size_t n = cluster.nodes.size();
  const CostModel cost = options.cost.value_or(cluster.cost);
  const SpeculationPolicy spec = cluster.speculation;

  // Task order is by task_id throughout.
  std::vector<std::size_t> order(tasks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return tasks[a].task_id < tasks[b].task_id; });

  // local_on[task][node]
  std::vector<std::vector<char>> local_on(tasks.size(), std::vector<char>(n, 0));
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (!tasks[i].block_id) continue;
    auto it = placement.holders.find(*tasks[i].block_id);
    if (it == placement.holders.end() || it->second.empty())
      throw JobError("task " + std::to_string(tasks[i].task_id) + ": block " +
                     std::to_string(*tasks[i].block_id) + " has no placed replica");
    for (const std::string& name : it->second) {
      int ni = cluster.index_of(name);
      if (ni < 0) throw JobError("placement names unknown node '" + name + "'");
      local_on[i][static_cast<std::size_t>(ni)] = 1;
    }
  }

  // Full replication pins every map task onto the first declared node.
  bool pathology = options.kind == TaskKind::Map;
  for (std::size_t i = 0; i < tasks.size() && pathology; ++i) {
    if (!tasks[i].block_id) {
      pathology = false;
      break;
    }
    for (std::size_t ni = 0; ni < n; ++ni) {
      if (!local_on[i][ni]) {
        pathology = false;
        break;
      }
    }
  }

  std::vector<int> free_slots(n);
  for (std::size_t ni = 0; ni < n; ++ni) free_slots[ni] = cluster.nodes[ni].cores;

  std::deque<std::size_t> pending(order.begin(), order.end());
  std::vector<Attempt> running;
  std::vector<char> committed(tasks.size(), 0);
  std::vector<char> has_backup(tasks.size(), 0);
  std::vector<double> completed_durations;
  std::set<double> checks;
  std::vector<TaskRecord> records;

  auto duration_on = [&](std::size_t ti, std::size_t ni, bool local) {
    double penalty = options.kind == TaskKind::Reduce ? 1.0 : cluster.remote_penalty;
    return estimate_task_duration(tasks[ti].records, options.candidates, cluster.nodes[ni],
                                  options.kind == TaskKind::Reduce ? true : local, cost, penalty);
  };

  auto launch = [&](std::size_t ti, std::size_t ni, int attempt_no, bool speculative, bool local,
                    double now) {
    Attempt a;
    a.task_index = ti;
    a.attempt_no = attempt_no;
    a.node = static_cast<int>(ni);
    a.start = now;
    a.end = now + duration_on(ti, ni, local);
    a.speculative = speculative;
    a.local = local;
    running.push_back(a);
    --free_slots[ni];
  };

  auto assign = [&](double now) {
    if (pending.empty()) return;
    if (pathology) {
      while (free_slots[0] > 0 && !pending.empty()) {
        launch(pending.front(), 0, 0, false, true, now);
        pending.pop_front();
      }
      return;
    }
    if (options.kind == TaskKind::Map) {
      // data-local first: nodes in declaration order, tasks in id order
      for (std::size_t ni = 0; ni < n; ++ni) {
        while (free_slots[ni] > 0) {
          auto it = std::find_if(pending.begin(), pending.end(),
                                 [&](std::size_t ti) { return local_on[ti][ni] != 0; });
          if (it == pending.end()) break;
          launch(*it, ni, 0, false, true, now);
          pending.erase(it);
        }
      }
      // remaining tasks may run remote on the first free node
      for (auto it = pending.begin(); it != pending.end();) {
        std::size_t target = n;
        for (std::size_t ni = 0; ni < n; ++ni) {
          if (free_slots[ni] > 0) {
            target = ni;
            break;
          }
        }
        if (target == n) break;
        launch(*it, target, 0, false, false, now);
        it = pending.erase(it);
      }
    } else {
      // reduce tasks carry no locality; spread round-robin by task id
      for (auto it = pending.begin(); it != pending.end();) {
        std::size_t start = static_cast<std::size_t>(tasks[*it].task_id) % n;
        std::size_t target = n;
        for (std::size_t step = 0; step < n; ++step) {
          std::size_t ni = (start + step) % n;
          if (free_slots[ni] > 0) {
            target = ni;
            break;
          }
        }
        if (target == n) break;
        launch(*it, target, 0, false, false, now);
        it = pending.erase(it);
      }
    }
  };

  auto speculate = [&](double now) {
    if (!spec.enabled || !pending.empty() || completed_durations.empty()) return;
    double threshold = spec.ratio * median_of(completed_durations);
    // stable order: ascending task id (running holds at most one original per task)
    std::vector<std::size_t> idx(running.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return tasks[running[a].task_index].task_id < tasks[running[b].task_index].task_id;
    });
    for (std::size_t i : idx) {
      const Attempt& a = running[i];
      if (a.speculative || has_backup[a.task_index] || committed[a.task_index]) continue;
      double elapsed = now - a.start;
      if (elapsed + 1e-9 < threshold) {
        double check_at = a.start + threshold;
        if (check_at > now) checks.insert(check_at);
        continue;
      }
      // fastest idle node other than the straggler's own
      std::size_t best = n;
      for (std::size_t ni = 0; ni < n; ++ni) {
        if (free_slots[ni] <= 0 || ni == static_cast<std::size_t>(a.node)) continue;
        if (best == n || cluster.nodes[ni].speed_factor > cluster.nodes[best].speed_factor) best = ni;
      }
      if (best == n) continue;  // retry at the next event
      bool local = local_on[a.task_index][best] != 0;
      launch(a.task_index, best, 1, true, local, now);
      has_backup[a.task_index] = 1;
    }
  };

  auto record_of = [&](const Attempt& a, double end, bool killed) {
    TaskRecord r;
    r.task_id = tasks[a.task_index].task_id;
    r.attempt = a.attempt_no;
    r.kind = options.kind;
    r.node = cluster.nodes[static_cast<std::size_t>(a.node)].name;
    r.start = a.start;
    r.end = end;
    r.speculative = a.speculative;
    r.killed = killed;
    r.local = options.kind == TaskKind::Map && a.local;
    return r;
  };

  double now = options.earliest_start;
  assign(now);
  speculate(now);

  while (!running.empty() || !pending.empty()) {
    if (running.empty())
      throw JobError("scheduler stalled with " + std::to_string(pending.size()) + " pending tasks");

    double next = std::numeric_limits<double>::infinity();
    for (const Attempt& a : running) next = std::min(next, a.end);
    if (!checks.empty()) next = std::min(next, *checks.begin());
    now = next;
    while (!checks.empty() && *checks.begin() <= now) checks.erase(checks.begin());

    // pull every attempt finishing now, in (task id, attempt) order
    std::vector<Attempt> done;
    for (std::size_t i = running.size(); i-- > 0;) {
      if (running[i].end == now) {
        done.push_back(running[i]);
        running.erase(running.begin() + static_cast<std::ptrdiff_t>(i));
      }
    }
    std::sort(done.begin(), done.end(), [&](const Attempt& a, const Attempt& b) {
      int ta = tasks[a.task_index].task_id;
      int tb = tasks[b.task_index].task_id;
      if (ta != tb) return ta < tb;
      return a.attempt_no < b.attempt_no;
    });

    for (const Attempt& a : done) {
      ++free_slots[a.node];
      if (committed[a.task_index]) {
        // simultaneous loser of an already-committed task
        records.push_back(record_of(a, now, true));
        continue;
      }
      committed[a.task_index] = 1;
      records.push_back(record_of(a, a.end, false));
      completed_durations.push_back(a.end - a.start);
      // the losing attempt is killed the moment the winner commits
      for (std::size_t i = running.size(); i-- > 0;) {
        if (running[i].task_index == a.task_index) {
          records.push_back(record_of(running[i], now, true));
          ++free_slots[running[i].node];
          running.erase(running.begin() + static_cast<std::ptrdiff_t>(i));
        }
      }
    }

    assign(now);
    speculate(now);
  }

  std::sort(records.begin(), records.end(), [](const TaskRecord& a, const TaskRecord& b) {
    if (a.task_id != b.task_id) return a.task_id < b.task_id;
    return a.attempt < b.attempt;
  });

  double min_start = std::numeric_limits<double>::infinity();
  double max_end = 0.0;
  for (const TaskRecord& r : records) {
    min_start = std::min(min_start, r.start);
    if (!r.killed) max_end = std::max(max_end, r.end);
  }
  metrics.records = std::move(records);
  metrics.makespan = metrics.records.empty() ? 0.0 : max_end - min_start;
  metrics.per_node = aggregate_per_node(metrics.records, cluster);
  return metrics;
}

namespace {

std::size_t owning_block(const std::vector<Block>& blocks, const Split& split) {
  for (const Block& b : blocks) {
    if (split.begin >= b.begin && split.begin < b.end) return b.block_id;
  }
  throw JobError("split " + std::to_string(split.split_id) + " lies outside all blocks");
}

// key -> values in (map task id, key) order
using Partition = std::map<Itemset, std::vector<std::uint64_t>>;

}  // namespace

JobResult run_job(const JobSpec& job, const JobInput& input, const BlockPlacement& placement,
                  const ClusterSpec& cluster) {
  if (!job.map || !job.reduce) throw JobError(job.name + ": map and reduce must be set");
  if (job.reducers < 1) throw JobError(job.name + ": reducer count must be >= 1");

  // map phase timeline
  std::vector<SimTask> map_tasks;
  map_tasks.reserve(input.splits.size());
  for (const Split& s : input.splits) {
    SimTask t;
    t.task_id = static_cast<int>(s.split_id);
    t.block_id = owning_block(input.blocks, s);
    t.records = s.lines();
    map_tasks.push_back(t);
  }
  ScheduleOptions map_options;
  map_options.kind = TaskKind::Map;
  map_options.candidates = job.candidates;
  map_options.cost = job.cost;
  JobMetrics map_metrics = plan_schedule(map_tasks, placement, cluster, map_options);

  // map execution: once per logical task; attempts are replays of the same
  // pure function, so the simulated copies never diverge
  std::vector<std::vector<KeyValue>> task_output(input.splits.size());
  for (std::size_t si = 0; si < input.splits.size(); ++si) {
    const Split& s = input.splits[si];
    Emitter emitter;
    try {
      job.map(input.lines.subspan(s.begin, s.lines()), s.begin, emitter);
    } catch (const std::exception& e) {
      throw JobError(job.name + ": map task " + std::to_string(s.split_id) + ": " + e.what());
    }
    auto pairs = emitter.take();
    std::sort(pairs.begin(), pairs.end(), [](const KeyValue& a, const KeyValue& b) {
      if (a.key != b.key) return a.key < b.key;
      return a.value < b.value;
    });
    if (job.combine) {
      std::vector<KeyValue> combined;
      std::size_t i = 0;
      while (i < pairs.size()) {
        std::size_t j = i;
        std::vector<std::uint64_t> values;
        while (j < pairs.size() && pairs[j].key == pairs[i].key) values.push_back(pairs[j++].value);
        std::optional<KeyValue> out;
        try {
          out = job.combine(pairs[i].key, values);
        } catch (const std::exception& e) {
          throw JobError(job.name + ": combine on map task " + std::to_string(s.split_id) + ": " +
                         e.what());
        }
        if (out) combined.push_back(std::move(*out));
        i = j;
      }
      pairs = std::move(combined);
    }
    task_output[si] = std::move(pairs);
  }

  // shuffle
  std::vector<Partition> partitions(job.reducers);
  for (const auto& pairs : task_output) {
    for (const KeyValue& kv : pairs)
      partitions[partition_key(kv.key, job.reducers)][kv.key].push_back(kv.value);
  }

  // reduce phase starts only after the last map attempt committed
  double barrier = 0.0;
  for (const TaskRecord& r : map_metrics.records) {
    if (!r.killed) barrier = std::max(barrier, r.end);
  }
  std::vector<SimTask> reduce_tasks;
  reduce_tasks.reserve(job.reducers);
  for (std::size_t r = 0; r < job.reducers; ++r) {
    SimTask t;
    t.task_id = static_cast<int>(r);
    t.block_id = std::nullopt;
    t.records = partitions[r].size();
    reduce_tasks.push_back(t);
  }
  ScheduleOptions reduce_options;
  reduce_options.kind = TaskKind::Reduce;
  reduce_options.earliest_start = barrier;
  reduce_options.cost = job.cost;
  JobMetrics reduce_metrics = plan_schedule(reduce_tasks, placement, cluster, reduce_options);

  // reduce execution, keys ascending within each partition
  JobResult result;
  for (std::size_t r = 0; r < job.reducers; ++r) {
    for (const auto& [key, values] : partitions[r]) {
      std::optional<KeyValue> out;
      try {
        out = job.reduce(key, values);
      } catch (const std::exception& e) {
        throw JobError(job.name + ": reduce task " + std::to_string(r) + " key (" +
                       format_itemset(key) + "): " + e.what());
      }
      if (out) result.output.push_back(std::move(*out));
    }
  }
  std::sort(result.output.begin(), result.output.end(),
            [](const KeyValue& a, const KeyValue& b) { return a.key < b.key; });

  JobMetrics merged;
  merged.records = map_metrics.records;
  merged.records.insert(merged.records.end(), reduce_metrics.records.begin(),
                        reduce_metrics.records.end());
  double min_start = std::numeric_limits<double>::infinity();
  double max_end = 0.0;
  for (const TaskRecord& r : merged.records) {
    min_start = std::min(min_start, r.start);
    if (!r.killed) max_end = std::max(max_end, r.end);
  }
  merged.makespan = merged.records.empty() ? 0.0 : max_end - min_start;
  merged.per_node = aggregate_per_node(merged.records, cluster);
  result.metrics = std::move(merged);
  return result;
}

}  // namespace apmr
