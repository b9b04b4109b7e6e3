#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "apmr/dataset.hpp"

namespace apmr {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class NodeKind { Physical, Virtual };
std::string_view to_string(NodeKind k);

struct NodeSpec {
  std::string name;
  int cores = 1;              // concurrent task slots
  double speed_factor = 1.0;  // 1.0 = reference hardware, smaller is slower
  NodeKind kind = NodeKind::Physical;
};

struct CostModel {
  double startup = 2.0;
  double alpha = 1.0;    // per input record
  double beta = 0.001;   // per record x candidate
};

struct SpeculationPolicy {
  bool enabled = true;
  double ratio = 1.5;  // straggler threshold vs median completed duration
};

struct ClusterSpec {
  std::vector<NodeSpec> nodes;
  int replication_factor = 3;
  SpeculationPolicy speculation;
  double remote_penalty = 1.1;
  CostModel cost;
  std::uint64_t seed = 0;

  int index_of(std::string_view name) const;  // -1 when unknown
  void validate() const;                      // throws ConfigError
};

// block id -> distinct replica-holder node names.
struct BlockPlacement {
  std::map<std::size_t, std::vector<std::string>> holders;

  bool covers(std::size_t block_id) const { return holders.contains(block_id); }
  // Keeps only blocks with id < block_count; used when a derived file has
  // fewer blocks than the file the placement was written for.
  BlockPlacement restricted_to(std::size_t block_count) const;
};

// With an explicit placement, validates it against the blocks and cluster and
// returns it verbatim. Otherwise draws replication_factor distinct holders
// per block from a generator seeded with the cluster seed, so one seed always
// yields one layout. Throws ConfigError on invalid placements or
// replication_factor > node count.
BlockPlacement place_blocks(std::span<const Block> blocks, const ClusterSpec& cluster,
                            const BlockPlacement* explicit_placement = nullptr);

// The cluster file: nodes, replication, optional block/split granularity,
// speculation, cost constants, seed, optional explicit placement.
struct ClusterConfig {
  ClusterSpec cluster;
  std::optional<std::size_t> block_lines;
  std::optional<std::size_t> split_lines;
  std::optional<BlockPlacement> placement;

  // Two reference-speed physical data nodes plus two slower virtual ones,
  // four slots each.
  static ClusterConfig reference_cluster();
};

ClusterConfig parse_cluster_config(const std::string& json_text);
ClusterConfig load_cluster_config(const std::filesystem::path& path);

// A placement file is either a bare {"<block_id>": ["node", ...]} object or
// {"replication": R, "blocks": {...}}; a replication override, when present,
// is written to *replication.
BlockPlacement load_placement(const std::filesystem::path& path,
                              std::optional<int>* replication = nullptr);

}  // namespace apmr
