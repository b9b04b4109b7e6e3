#include "apmr/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace apmr {

using nlohmann::json;

double round2(double x) { return std::round(x * 100.0) / 100.0; }

std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file for digest: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return fnv1a64_hex(buffer.str());
}

namespace {

json placement_json(const BlockPlacement& placement) {
  json j = json::object();
  for (const auto& [block_id, holders] : placement.holders) j[std::to_string(block_id)] = holders;
  return j;
}

json cluster_json(const ClusterSpec& cluster) {
  json nodes = json::array();
  for (const NodeSpec& n : cluster.nodes) {
    nodes.push_back({{"name", n.name},
                     {"cores", n.cores},
                     {"speed", n.speed_factor},
                     {"kind", std::string(to_string(n.kind))}});
  }
  return {{"nodes", std::move(nodes)},
          {"replication", cluster.replication_factor},
          {"speculation", {{"enabled", cluster.speculation.enabled},
                           {"ratio", cluster.speculation.ratio}}},
          {"remote_penalty", cluster.remote_penalty},
          {"cost", {{"startup", cluster.cost.startup},
                    {"alpha", cluster.cost.alpha},
                    {"beta", cluster.cost.beta}}},
          {"seed", cluster.seed}};
}

json manifest_json(const RunManifest& manifest) {
  json j;
  j["tool_version"] = manifest.tool_version;
  j["command"] = manifest.command;
  j["input"] = {{"path", manifest.input_path},
                {"digest", manifest.input_digest},
                {"transactions", manifest.transactions}};
  if (manifest.mining) {
    const MiningManifest& m = *manifest.mining;
    json mining = {{"min_support", m.min_support},
                   {"min_count", m.min_count},
                   {"variant", m.variant},
                   {"filtered_transactions", m.filtered_transactions},
                   {"combiner", m.combiner},
                   {"reducers", m.reducers},
                   {"block_lines", m.block_lines}};
    if (m.split_lines) mining["split_lines"] = *m.split_lines;
    j["mining"] = std::move(mining);
  }
  j["cluster"] = cluster_json(manifest.cluster);
  if (manifest.placement) j["placement"] = placement_json(*manifest.placement);
  if (!manifest.params.empty()) j["params"] = manifest.params;
  return j;
}

json task_json(const TaskRecord& r) {
  return {{"id", r.task_id},
          {"attempt", r.attempt},
          {"kind", std::string(to_string(r.kind))},
          {"node", r.node},
          {"start", round2(r.start)},
          {"end", round2(r.end)},
          {"speculative", r.speculative},
          {"killed", r.killed},
          {"local", r.local}};
}

json metrics_json(const JobMetrics& metrics) {
  json tasks = json::array();
  for (const TaskRecord& r : metrics.records) tasks.push_back(task_json(r));
  json per_node = json::array();
  for (const NodeAggregate& n : metrics.per_node) {
    per_node.push_back({{"name", n.name},
                        {"kind", std::string(to_string(n.kind))},
                        {"map_tasks", n.map_tasks},
                        {"mean_map_duration", round2(n.mean_map_duration)},
                        {"busy_time", round2(n.busy_time)}});
  }
  return {{"tasks", std::move(tasks)}, {"per_node", std::move(per_node)}};
}

json node_speeds_json(const std::vector<NodeSpeedRow>& rows) {
  json j = json::array();
  for (const NodeSpeedRow& row : rows) {
    j.push_back({{"name", row.name},
                 {"kind", std::string(to_string(row.kind))},
                 {"map_tasks", row.map_tasks},
                 {"mean_map_duration", round2(row.mean_map_duration)}});
  }
  return j;
}

void append_task_rows(std::ostringstream& out, const std::string& job,
                      const JobMetrics& metrics) {
  for (const TaskRecord& r : metrics.records) {
    char times[64];
    std::snprintf(times, sizeof(times), "%.2f,%.2f", r.start, r.end);
    out << job << ',' << r.task_id << ',' << r.attempt << ',' << to_string(r.kind) << ','
        << r.node << ',' << times << ',' << (r.speculative ? 1 : 0) << ',' << (r.killed ? 1 : 0)
        << ',' << (r.local ? 1 : 0) << '\n';
  }
}

constexpr const char* kCsvHeader = "job,id,attempt,kind,node,start,end,speculative,killed,local\n";

std::string csv_prefix(const RunManifest& manifest) {
  return "# manifest " + manifest_json(manifest).dump() + "\n" + kCsvHeader;
}

}  // namespace

std::string mine_report_json(const RunManifest& manifest, const MiningResult& result) {
  json j;
  j["manifest"] = manifest_json(manifest);
  j["min_count"] = result.min_count;

  json levels = json::array();
  for (const FrequentLevel& level : result.levels)
    levels.push_back({{"k", level.k}, {"itemsets", level.size()}});
  j["levels"] = std::move(levels);

  json jobs = json::array();
  for (const JobRun& job : result.jobs) {
    json entry = metrics_json(job.metrics);
    entry["name"] = job.name;
    entry["makespan"] = round2(job.metrics.makespan);
    entry["map_tasks"] = job.map_tasks;
    entry["apriori_gen_calls"] = job.apriori_gen_calls;
    jobs.push_back(std::move(entry));
  }
  j["jobs"] = std::move(jobs);
  j["total_makespan"] = round2(result.total_makespan);
  return j.dump(2) + "\n";
}

std::string experiment_report_json(const RunManifest& manifest, const ExperimentResult& result) {
  json j;
  j["manifest"] = manifest_json(manifest);
  j["experiment"] = result.experiment;
  if (!result.params.empty()) j["params"] = result.params;

  json arms = json::array();
  for (const ExperimentArm& arm : result.arms) {
    json entry;
    entry["name"] = arm.name;
    entry["makespan"] = round2(arm.makespan);
    json stats = json::object();
    for (const auto& [key, value] : arm.stats) stats[key] = round2(value);
    entry["stats"] = std::move(stats);
    if (!arm.node_speeds.empty()) entry["node_speeds"] = node_speeds_json(arm.node_speeds);
    if (!arm.metrics.records.empty()) {
      json m = metrics_json(arm.metrics);
      entry["tasks"] = std::move(m["tasks"]);
      entry["per_node"] = std::move(m["per_node"]);
    }
    arms.push_back(std::move(entry));
  }
  j["arms"] = std::move(arms);
  j["best"] = result.best;
  j["worst"] = result.worst;
  return j.dump(2) + "\n";
}

std::string mine_report_csv(const RunManifest& manifest, const MiningResult& result) {
  std::ostringstream out;
  out << csv_prefix(manifest);
  for (const JobRun& job : result.jobs) append_task_rows(out, job.name, job.metrics);
  return out.str();
}

std::string experiment_report_csv(const RunManifest& manifest, const ExperimentResult& result) {
  std::ostringstream out;
  out << csv_prefix(manifest);
  for (const ExperimentArm& arm : result.arms) append_task_rows(out, arm.name, arm.metrics);
  return out.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out << content;
  if (!out) throw std::runtime_error("failed writing file: " + path.string());
}

}  // namespace apmr
