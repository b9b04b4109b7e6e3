#pragma once
// Report serialisation. JSON reports have sorted keys and durations fixed to
// two decimals; CSV flattens the task table. Every report embeds the run
// manifest, and equal manifests must produce byte-identical files.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "apmr/cluster.hpp"
#include "apmr/experiments.hpp"
#include "apmr/jobs.hpp"

namespace apmr {

inline constexpr std::string_view kToolVersion = "0.1.0";

struct MiningManifest {
  std::string min_support;  // as given on the command line
  std::uint64_t min_count = 0;
  std::string variant;
  bool filtered_transactions = false;
  bool combiner = true;
  std::size_t reducers = 0;
  std::size_t block_lines = 0;
  std::optional<std::size_t> split_lines;
};

struct RunManifest {
  std::string tool_version{kToolVersion};
  std::string command;  // "mine" or "experiment <name>"
  std::string input_path;
  std::string input_digest;  // fnv1a-64 hex of the input bytes; empty when synthetic
  std::size_t transactions = 0;
  std::optional<MiningManifest> mining;
  ClusterSpec cluster;
  std::optional<BlockPlacement> placement;
  std::map<std::string, std::string> params;  // experiment scenario echo
};

double round2(double x);

std::string fnv1a64_hex(std::string_view bytes);
// Digest of the whole file contents. Throws std::runtime_error when unreadable.
std::string file_digest(const std::filesystem::path& path);

std::string mine_report_json(const RunManifest& manifest, const MiningResult& result);
std::string experiment_report_json(const RunManifest& manifest, const ExperimentResult& result);

// One row per task record; the manifest rides along as a leading comment line.
std::string mine_report_csv(const RunManifest& manifest, const MiningResult& result);
std::string experiment_report_csv(const RunManifest& manifest, const ExperimentResult& result);

void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace apmr
