#include "apmr/cluster.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

namespace apmr {

using nlohmann::json;

std::string_view to_string(NodeKind k) {
  return k == NodeKind::Physical ? "physical" : "virtual";
}

int ClusterSpec::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

void ClusterSpec::validate() const {
  if (nodes.empty()) throw ConfigError("cluster has no nodes");
  std::set<std::string> names;
  for (const NodeSpec& n : nodes) {
    if (n.name.empty()) throw ConfigError("node name must be non-empty");
    if (!names.insert(n.name).second) throw ConfigError("duplicate node name: " + n.name);
    if (n.cores < 1) throw ConfigError("node " + n.name + ": cores must be >= 1");
    if (!(n.speed_factor > 0.0)) throw ConfigError("node " + n.name + ": speed must be > 0");
  }
  if (replication_factor < 1) throw ConfigError("replication factor must be >= 1");
  if (replication_factor > static_cast<int>(nodes.size()))
    throw ConfigError("replication factor " + std::to_string(replication_factor) +
                      " exceeds node count " + std::to_string(nodes.size()));
  if (!(speculation.ratio > 0.0)) throw ConfigError("speculation ratio must be > 0");
  if (!(remote_penalty > 0.0)) throw ConfigError("remote penalty must be > 0");
  if (cost.startup < 0.0 || cost.alpha < 0.0 || cost.beta < 0.0)
    throw ConfigError("cost constants must be non-negative");
}

BlockPlacement BlockPlacement::restricted_to(std::size_t block_count) const {
  BlockPlacement out;
  for (const auto& [block_id, nodes] : holders) {
    if (block_id < block_count) out.holders.emplace(block_id, nodes);
  }
  return out;
}

namespace {

void validate_placement(const BlockPlacement& placement, std::span<const Block> blocks,
                        const ClusterSpec& cluster) {
  for (const Block& b : blocks) {
    auto it = placement.holders.find(b.block_id);
    if (it == placement.holders.end())
      throw ConfigError("placement missing block " + std::to_string(b.block_id));
    const auto& holders = it->second;
    if (holders.size() != static_cast<std::size_t>(cluster.replication_factor))
      throw ConfigError("block " + std::to_string(b.block_id) + " has " +
                        std::to_string(holders.size()) + " replicas, expected " +
                        std::to_string(cluster.replication_factor));
    std::set<std::string> distinct;
    for (const std::string& name : holders) {
      if (cluster.index_of(name) < 0)
        throw ConfigError("placement names unknown node '" + name + "'");
      if (!distinct.insert(name).second)
        throw ConfigError("block " + std::to_string(b.block_id) + " lists node '" + name +
                          "' twice");
    }
  }
}

}  // namespace

BlockPlacement place_blocks(std::span<const Block> blocks, const ClusterSpec& cluster,
                            const BlockPlacement* explicit_placement) {
  cluster.validate();
  if (explicit_placement) {
    validate_placement(*explicit_placement, blocks, cluster);
    return *explicit_placement;
  }

  // Partial Fisher-Yates with an explicit modulo draw keeps the layout a pure
  // function of the seed, independent of the standard library's distributions.
  std::mt19937_64 gen(cluster.seed);
  const std::size_t n = cluster.nodes.size();
  const std::size_t rf = static_cast<std::size_t>(cluster.replication_factor);
  BlockPlacement placement;
  for (const Block& b : blocks) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::vector<std::string> holders;
    holders.reserve(rf);
    for (std::size_t i = 0; i < rf; ++i) {
      std::size_t j = i + static_cast<std::size_t>(gen() % (n - i));
      std::swap(order[i], order[j]);
      holders.push_back(cluster.nodes[order[i]].name);
    }
    placement.holders.emplace(b.block_id, std::move(holders));
  }
  return placement;
}

namespace {

NodeKind parse_kind(const std::string& text) {
  if (text == "physical") return NodeKind::Physical;
  if (text == "virtual") return NodeKind::Virtual;
  throw ConfigError("node kind must be 'physical' or 'virtual', got '" + text + "'");
}

BlockPlacement placement_from_json(const json& j) {
  BlockPlacement placement;
  for (const auto& [key, value] : j.items()) {
    std::size_t block_id = 0;
    try {
      std::size_t pos = 0;
      block_id = std::stoul(key, &pos);
      if (pos != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw ConfigError("placement block id must be a non-negative integer, got '" + key + "'");
    }
    std::vector<std::string> holders;
    for (const auto& node : value) holders.push_back(node.get<std::string>());
    placement.holders.emplace(block_id, std::move(holders));
  }
  return placement;
}

}  // namespace

ClusterConfig parse_cluster_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid cluster JSON: ") + e.what());
  }

  ClusterConfig config;
  try {
    if (j.contains("nodes")) {
      for (const auto& node : j["nodes"]) {
        NodeSpec spec;
        spec.name = node.at("name").get<std::string>();
        spec.cores = node.value("cores", 1);
        spec.speed_factor = node.value("speed", 1.0);
        spec.kind = parse_kind(node.value("kind", std::string("physical")));
        config.cluster.nodes.push_back(std::move(spec));
      }
    }
    config.cluster.replication_factor = j.value("replication", 3);
    if (j.contains("speculation")) {
      config.cluster.speculation.enabled = j["speculation"].value("enabled", true);
      config.cluster.speculation.ratio = j["speculation"].value("ratio", 1.5);
    }
    config.cluster.remote_penalty = j.value("remote_penalty", 1.1);
    if (j.contains("cost")) {
      config.cluster.cost.startup = j["cost"].value("startup", 2.0);
      config.cluster.cost.alpha = j["cost"].value("alpha", 1.0);
      config.cluster.cost.beta = j["cost"].value("beta", 0.001);
    }
    config.cluster.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("block_lines")) config.block_lines = j["block_lines"].get<std::size_t>();
    if (j.contains("split_lines")) config.split_lines = j["split_lines"].get<std::size_t>();
    if (j.contains("placement")) config.placement = placement_from_json(j["placement"]);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid cluster config: ") + e.what());
  }
  config.cluster.validate();
  return config;
}

ClusterConfig load_cluster_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open cluster file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_cluster_config(buffer.str());
}

BlockPlacement load_placement(const std::filesystem::path& path, std::optional<int>* replication) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open placement file: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid placement JSON: ") + e.what());
  }
  try {
    if (j.contains("blocks")) {
      if (replication && j.contains("replication")) *replication = j["replication"].get<int>();
      return placement_from_json(j["blocks"]);
    }
    return placement_from_json(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid placement file: ") + e.what());
  }
}

ClusterConfig ClusterConfig::reference_cluster() {
  ClusterConfig config;
  config.cluster.nodes = {
      {"DN1", 4, 1.0, NodeKind::Physical},
      {"DN2", 4, 1.0, NodeKind::Physical},
      {"DN3", 4, 0.67, NodeKind::Virtual},
      {"DN4", 4, 0.67, NodeKind::Virtual},
  };
  config.cluster.replication_factor = 3;
  config.cluster.speculation = {true, 1.5};
  config.cluster.remote_penalty = 1.1;
  config.cluster.cost = {2.0, 1.0, 0.001};
  config.cluster.seed = 42;
  return config;
}

}  // namespace apmr
