// apriori-mr: frequent itemset mining on a deterministic simulated MapReduce
// cluster, plus a set of cluster-tuning experiments.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "apmr/cluster.hpp"
#include "apmr/experiments.hpp"
#include "apmr/jobs.hpp"
#include "apmr/oracle.hpp"
#include "apmr/report.hpp"
#include "apmr/runtime.hpp"

namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::string cluster_path;
  std::optional<std::uint64_t> seed;
  std::string report_path;
  std::string format = "json";
};

struct MineFlags {
  CommonFlags common;
  std::string input;
  std::string min_support = "2";
  std::string variant = "trie";
  std::string filtered = "off";
  std::string placement_path;
  std::optional<std::size_t> block_lines;
  std::optional<std::size_t> split_lines;
  std::optional<std::size_t> reducers;
  std::string speculation;  // "", "on", "off"
  bool oracle_check = false;
};

struct ExperimentFlags {
  CommonFlags common;
  std::string name;
  std::string placements;  // comma-separated file list
  double straggler_speed = 0.2;
  double ratio = 1.5;
  std::optional<std::size_t> tasks;
  std::optional<std::size_t> task_records;
  std::size_t lines = 60000;
  std::size_t block_lines = 12000;
  std::size_t split_lines = 5000;
  std::string input;
  std::string min_support = "2";
  std::string filtered = "off";
};

// A token with a decimal point is a fraction of the transaction count; a bare
// integer is an absolute count. "1" therefore means one transaction, "1.0"
// means all of them.
std::variant<std::uint64_t, double> parse_min_support(const std::string& text) {
  try {
    if (text.find('.') != std::string::npos) {
      std::size_t pos = 0;
      double fraction = std::stod(text, &pos);
      if (pos != text.size()) throw UsageError("");
      if (!(fraction > 0.0) || fraction > 1.0)
        throw UsageError("--min-support fraction must be in (0, 1], got " + text);
      return fraction;
    }
    std::size_t pos = 0;
    unsigned long long count = std::stoull(text, &pos);
    if (pos != text.size() || count < 1) throw UsageError("");
    return std::uint64_t{count};
  } catch (const UsageError& e) {
    if (*e.what()) throw;
    throw UsageError("--min-support must be a positive count or a fraction, got '" + text + "'");
  } catch (const std::exception&) {
    throw UsageError("--min-support must be a positive count or a fraction, got '" + text + "'");
  }
}

bool parse_on_off(const std::string& text, const std::string& flag) {
  if (text == "on") return true;
  if (text == "off") return false;
  throw UsageError(flag + " must be 'on' or 'off', got '" + text + "'");
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag_seed,
                           std::uint64_t cluster_seed) {
  if (flag_seed) return *flag_seed;
  if (const char* env = std::getenv("APRIORI_MR_SEED")) {
    try {
      std::size_t pos = 0;
      unsigned long long value = std::stoull(env, &pos);
      if (pos != std::string(env).size()) throw std::invalid_argument(env);
      return value;
    } catch (const std::exception&) {
      throw UsageError(std::string("APRIORI_MR_SEED must be an unsigned integer, got '") + env +
                       "'");
    }
  }
  return cluster_seed;
}

apmr::ClusterConfig resolve_cluster(const CommonFlags& common) {
  if (common.cluster_path.empty()) return apmr::ClusterConfig::reference_cluster();
  return apmr::load_cluster_config(common.cluster_path);
}

std::string check_format(const std::string& format) {
  if (format != "json" && format != "csv")
    throw UsageError("--format must be 'json' or 'csv', got '" + format + "'");
  return format;
}

fs::path itemsets_path_for(const fs::path& report_path) {
  fs::path p = report_path;
  p.replace_extension();
  p += "_itemsets.txt";
  return p;
}

int run_mine(const MineFlags& flags) {
  auto min_support = parse_min_support(flags.min_support);
  auto variant = apmr::store_variant_from_string(flags.variant);
  if (!variant)
    throw UsageError("--variant must be one of trie, hashtree, httrie; got '" + flags.variant +
                     "'");
  bool ft = parse_on_off(flags.filtered, "--filtered-transactions");
  std::string format = check_format(flags.common.format);

  apmr::ClusterConfig cluster_config = resolve_cluster(flags.common);
  apmr::ClusterSpec cluster = cluster_config.cluster;
  if (!flags.speculation.empty())
    cluster.speculation.enabled = parse_on_off(flags.speculation, "--speculation");
  cluster.seed = resolve_seed(flags.common.seed, cluster.seed);

  apmr::TransactionDatabase db = apmr::load_transaction_file(flags.input);
  if (db.transactions.empty()) throw std::runtime_error("input has no transactions");

  apmr::MiningConfig config;
  config.min_support = min_support;
  config.variant = *variant;
  config.use_filtered_transactions = ft;
  config.reducers = flags.reducers.value_or(4);
  config.block_lines = flags.block_lines
                           ? *flags.block_lines
                           : cluster_config.block_lines.value_or(12000);
  // Split precedence: an explicit split size wins; a user-chosen block size
  // makes blocks the splits; otherwise aim for twelve map tasks.
  if (flags.split_lines) {
    config.split_lines = *flags.split_lines;
  } else if (cluster_config.split_lines) {
    config.split_lines = *cluster_config.split_lines;
  } else if (!flags.block_lines && !cluster_config.block_lines) {
    config.split_lines = (db.line_count + 11) / 12;
  }

  std::vector<apmr::Block> blocks = apmr::partition_into_blocks(db.line_count, config.block_lines);
  std::optional<apmr::BlockPlacement> explicit_placement = cluster_config.placement;
  if (!flags.placement_path.empty()) {
    std::optional<int> replication;
    explicit_placement = apmr::load_placement(flags.placement_path, &replication);
    if (replication) cluster.replication_factor = *replication;
  }
  apmr::BlockPlacement placement = apmr::place_blocks(
      blocks, cluster, explicit_placement ? &*explicit_placement : nullptr);

  apmr::MiningResult result = apmr::run_apriori(db, config, cluster, placement);

  std::string level_summary;
  for (const apmr::FrequentLevel& level : result.levels) {
    if (!level_summary.empty()) level_summary += ' ';
    level_summary += "L" + std::to_string(level.k) + "=" + std::to_string(level.size());
  }
  std::cout << level_summary << "\n";
  std::cout << "min_count=" << result.min_count
            << " frequent_itemsets=" << result.frequent_itemsets().size()
            << " jobs=" << result.jobs.size() << " total_makespan=" << apmr::round2(result.total_makespan)
            << "\n";

  if (flags.oracle_check) {
    apmr::SupportTable expected = apmr::brute_force_frequent(db, result.min_count);
    bool match = apmr::levels_match(expected, result.levels);
    std::cout << "oracle: " << (match ? "MATCH" : "MISMATCH") << "\n";
    if (!match) return 1;
  }

  apmr::RunManifest manifest;
  manifest.command = "mine";
  manifest.input_path = flags.input;
  manifest.input_digest = apmr::file_digest(flags.input);
  manifest.transactions = db.transactions.size();
  apmr::MiningManifest mining;
  mining.min_support = flags.min_support;
  mining.min_count = result.min_count;
  mining.variant = std::string(apmr::to_string(config.variant));
  mining.filtered_transactions = ft;
  mining.combiner = config.use_combiner;
  mining.reducers = config.reducers;
  mining.block_lines = config.block_lines;
  mining.split_lines = config.split_lines;
  manifest.mining = mining;
  manifest.cluster = cluster;
  manifest.placement = placement;

  fs::path report_path = flags.common.report_path.empty()
                             ? fs::path("apriori-mr-report." + format)
                             : fs::path(flags.common.report_path);
  std::string report = format == "json" ? apmr::mine_report_json(manifest, result)
                                        : apmr::mine_report_csv(manifest, result);
  apmr::write_text_file(report_path, report);

  fs::path itemsets_path = itemsets_path_for(report_path);
  apmr::write_text_file(itemsets_path, apmr::frequent_itemsets_text(result.levels));

  std::cout << "report: " << report_path.string() << "\n";
  std::cout << "itemsets: " << itemsets_path.string() << "\n";
  return 0;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string::npos) {
      if (start < text.size()) out.push_back(text.substr(start));
      break;
    }
    if (comma > start) out.push_back(text.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

int run_experiment(const ExperimentFlags& flags) {
  std::string format = check_format(flags.common.format);
  apmr::ClusterConfig cluster_config = resolve_cluster(flags.common);
  apmr::ClusterSpec cluster = cluster_config.cluster;
  cluster.seed = resolve_seed(flags.common.seed, cluster.seed);

  apmr::ExperimentResult result;
  apmr::RunManifest manifest;
  manifest.command = "experiment " + flags.name;
  manifest.cluster = cluster;

  if (flags.name == "speculation") {
    apmr::SpeculationScenario scenario;
    scenario.straggler_speed = flags.straggler_speed;
    scenario.ratio = flags.ratio;
    if (flags.tasks) scenario.tasks = *flags.tasks;
    if (flags.task_records) scenario.task_records = *flags.task_records;
    result = apmr::run_speculation_experiment(scenario);
  } else if (flags.name == "placement") {
    apmr::PlacementScenario scenario;
    scenario.cluster = cluster;
    if (flags.task_records) scenario.task_records = *flags.task_records;
    if (flags.placements.empty()) {
      scenario.arms = apmr::stock_block_distributions(cluster);
    } else {
      for (const std::string& path : split_list(flags.placements)) {
        apmr::PlacementArm arm;
        arm.name = fs::path(path).stem().string();
        std::optional<int> replication;
        arm.placement = apmr::load_placement(path, &replication);
        arm.replication_factor = replication.value_or(1);
        scenario.arms.push_back(std::move(arm));
      }
    }
    result = apmr::run_placement_experiment(scenario);
  } else if (flags.name == "split") {
    apmr::SplitScenario scenario;
    scenario.lines = flags.lines;
    scenario.block_lines = flags.block_lines;
    scenario.split_lines = flags.split_lines;
    if (!flags.common.cluster_path.empty()) scenario.cluster = cluster;
    result = apmr::run_split_experiment(scenario);
  } else if (flags.name == "nodes") {
    apmr::NodesScenario scenario;
    if (flags.tasks) scenario.tasks = *flags.tasks;
    if (flags.task_records) scenario.task_records = *flags.task_records;
    if (!flags.common.cluster_path.empty()) scenario.cluster = cluster;
    result = apmr::run_nodes_experiment(scenario);
  } else if (flags.name == "structures") {
    if (flags.input.empty()) throw UsageError("experiment structures requires --input");
    apmr::TransactionDatabase db = apmr::load_transaction_file(flags.input);
    apmr::MiningConfig base;
    base.min_support = parse_min_support(flags.min_support);
    base.use_filtered_transactions = parse_on_off(flags.filtered, "--filtered-transactions");
    result = apmr::run_structures_experiment(db, base, cluster);
    manifest.input_path = flags.input;
    manifest.input_digest = apmr::file_digest(flags.input);
    manifest.transactions = db.transactions.size();
  } else {
    throw UsageError("unknown experiment '" + flags.name + "'");
  }

  manifest.params = result.params;

  std::cout << "experiment: " << result.experiment << "\n";
  for (const apmr::ExperimentArm& arm : result.arms)
    std::cout << "  " << arm.name << ": makespan=" << apmr::round2(arm.makespan) << "\n";
  std::cout << "best: " << result.best << "  worst: " << result.worst << "\n";

  fs::path report_path = flags.common.report_path.empty()
                             ? fs::path("apriori-mr-experiment." + format)
                             : fs::path(flags.common.report_path);
  std::string report = format == "json" ? apmr::experiment_report_json(manifest, result)
                                        : apmr::experiment_report_csv(manifest, result);
  apmr::write_text_file(report_path, report);
  std::cout << "report: " << report_path.string() << "\n";
  return 0;
}

void add_common_flags(CLI::App* cmd, CommonFlags& common) {
  cmd->add_option("--cluster", common.cluster_path, "Cluster spec JSON file");
  cmd->add_option("--seed", common.seed, "Placement seed (falls back to APRIORI_MR_SEED, then the cluster file)");
  cmd->add_option("--report", common.report_path, "Report output path");
  cmd->add_option("--format", common.format, "Report format: json or csv");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequent itemset mining on a simulated MapReduce cluster"};
  app.require_subcommand(1);

  MineFlags mine;
  CLI::App* mine_cmd = app.add_subcommand("mine", "Mine frequent itemsets from a transaction file");
  mine_cmd->add_option("--input", mine.input, "Transaction file, one space-separated transaction per line")
      ->required();
  mine_cmd->add_option("--min-support", mine.min_support,
                       "Absolute count (e.g. 2) or fraction of transactions (e.g. 0.5)");
  mine_cmd->add_option("--variant", mine.variant, "Candidate store: trie, hashtree or httrie");
  mine_cmd->add_option("--filtered-transactions", mine.filtered,
                       "Rewrite the input as weighted filtered transactions first: on or off");
  mine_cmd->add_option("--placement", mine.placement_path, "Explicit block placement JSON file");
  mine_cmd->add_option("--block-lines", mine.block_lines, "Lines per stored block");
  mine_cmd->add_option("--split-lines", mine.split_lines, "Lines per map task");
  mine_cmd->add_option("--reducers", mine.reducers, "Reduce task count (default 4)");
  mine_cmd->add_option("--speculation", mine.speculation, "Override the cluster's speculation: on or off");
  mine_cmd->add_flag("--oracle-check", mine.oracle_check,
                     "Verify the result against the brute-force reference miner");
  add_common_flags(mine_cmd, mine.common);

  ExperimentFlags experiment;
  CLI::App* exp_cmd = app.add_subcommand("experiment", "Run a cluster-tuning experiment");
  exp_cmd->add_option("name", experiment.name,
                      "One of: speculation, placement, split, nodes, structures")
      ->required();
  exp_cmd->add_option("--placements", experiment.placements,
                      "Comma-separated placement JSON files (placement experiment)");
  exp_cmd->add_option("--straggler-speed", experiment.straggler_speed,
                      "Speed factor of the slow node (speculation experiment)");
  exp_cmd->add_option("--ratio", experiment.ratio, "Straggler threshold ratio");
  exp_cmd->add_option("--tasks", experiment.tasks, "Map task count (nodes experiment)");
  exp_cmd->add_option("--task-records", experiment.task_records, "Records per map task");
  exp_cmd->add_option("--lines", experiment.lines, "Synthetic input lines (split experiment)");
  exp_cmd->add_option("--block-lines", experiment.block_lines, "Lines per block (split experiment)");
  exp_cmd->add_option("--split-lines", experiment.split_lines, "Lines per split (split experiment)");
  exp_cmd->add_option("--input", experiment.input, "Transaction file (structures experiment)");
  exp_cmd->add_option("--min-support", experiment.min_support, "Support threshold (structures experiment)");
  exp_cmd->add_option("--filtered-transactions", experiment.filtered,
                      "Filtered transactions on/off (structures experiment)");
  add_common_flags(exp_cmd, experiment.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (mine_cmd->parsed()) return run_mine(mine);
    if (exp_cmd->parsed()) return run_experiment(experiment);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
