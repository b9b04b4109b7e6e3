#pragma once
// The Apriori job chain on the simulated runtime. Job1 counts single items,
// the optional transaction-filtering job materialises weighted transactions
// that replace the raw input, and Job2 is iterated for k = 2, 3, ... until a
// level comes back empty. Candidate generation runs once per map task, never
// once per input line.

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "apmr/candidate_store.hpp"
#include "apmr/cluster.hpp"
#include "apmr/dataset.hpp"
#include "apmr/itemset.hpp"
#include "apmr/runtime.hpp"

namespace apmr {

struct MiningConfig {
  // Absolute count >= 1, or fraction of the transaction count in (0, 1].
  std::variant<std::uint64_t, double> min_support = std::uint64_t{2};
  StoreVariant variant = StoreVariant::Trie;
  bool use_filtered_transactions = false;
  bool use_combiner = true;
  std::size_t reducers = 4;
  std::size_t block_lines = 12000;
  std::optional<std::size_t> split_lines;  // absent: splits follow block boundaries

  // Fractions round up, and the result is at least 1. Throws
  // std::invalid_argument on a zero count or a fraction outside (0, 1].
  std::uint64_t resolved_min_count(std::size_t transaction_count) const;
};

struct JobRun {
  std::string name;
  JobMetrics metrics;
  std::size_t map_tasks = 0;
  std::uint64_t apriori_gen_calls = 0;  // in-map-task invocations (Job2 only)
};

struct MiningResult {
  std::vector<FrequentLevel> levels;  // k = 1.., including the terminating empty level
  std::vector<JobRun> jobs;
  double total_makespan = 0.0;  // jobs run as a chain; sum of job makespans
  std::uint64_t min_count = 0;
  std::vector<WeightedTransaction> filtered_transactions;  // populated when the FT job ran

  // Non-empty levels flattened to (itemset, support), ascending k then key.
  std::vector<KeyValue> frequent_itemsets() const;
};

// --- job building blocks, exposed for tests and reuse ---

// Emits ((item), 1) for every item of every transaction on the split.
void one_itemset_map(std::span<const std::string> lines, std::size_t first_line, Emitter& out);

// Sums the values; with min_count present, emits only when the sum reaches it.
std::optional<KeyValue> sum_reduce(const Itemset& key, std::span<const std::uint64_t> values,
                                   std::optional<std::uint64_t> min_count);
ReduceFn make_sum_reducer(std::optional<std::uint64_t> min_count);

// Subsequence of t containing exactly the items present in the 1-itemset store.
Itemset filter_transaction(const CandidateStore& frequent_items, const Itemset& t);

// Emits (filtered transaction, 1) per raw line; empty filtered transactions
// are dropped. The level travels by value, standing in for a distributed
// cache; each task builds its own store from it.
MapFn ft_map(FrequentLevel l1, StoreVariant variant);

// For k >= 2. Each task generates the candidates from the cached previous
// level exactly once, builds the store, then emits (candidate, weight) for
// every candidate contained in each line's itemset. With weighted_input the
// lines carry a trailing occurrence count, otherwise weight 1 is implied.
MapFn k_itemset_map(FrequentLevel prev, StoreVariant variant, bool weighted_input,
                    std::atomic<std::uint64_t>* gen_calls = nullptr);

// The full driver. The given placement covers the raw input's blocks; when
// the FT job rewrites the input, the placement restricted to the smaller
// block count is reused for the remaining jobs. Frequent itemsets are
// independent of the store variant and of the FT flag.
MiningResult run_apriori(const TransactionDatabase& db, const MiningConfig& config,
                         const ClusterSpec& cluster, const BlockPlacement& placement);

// One line per itemset: ascending items, space-separated, TAB, support count;
// levels concatenated in increasing k, lexicographic within a level.
void write_frequent_itemsets(std::ostream& out, std::span<const FrequentLevel> levels);
std::string frequent_itemsets_text(std::span<const FrequentLevel> levels);

}  // namespace apmr
