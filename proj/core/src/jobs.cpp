#include "apmr/jobs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace apmr {

std::uint64_t MiningConfig::resolved_min_count(std::size_t transaction_count) const {
  if (std::holds_alternative<std::uint64_t>(min_support)) {
    std::uint64_t count = std::get<std::uint64_t>(min_support);
    if (count < 1) throw std::invalid_argument("minimum support count must be >= 1");
    return count;
  }
  double fraction = std::get<double>(min_support);
  if (!(fraction > 0.0) || fraction > 1.0)
    throw std::invalid_argument("minimum support fraction must be in (0, 1], got " +
                                std::to_string(fraction));
  auto count = static_cast<std::uint64_t>(
      std::ceil(fraction * static_cast<double>(transaction_count)));
  return std::max<std::uint64_t>(count, 1);
}

std::vector<KeyValue> MiningResult::frequent_itemsets() const {
  std::vector<KeyValue> out;
  for (const FrequentLevel& level : levels) {
    for (const auto& [itemset, count] : level.entries) out.push_back({itemset, count});
  }
  return out;
}

void one_itemset_map(std::span<const std::string> lines, std::size_t first_line, Emitter& out) {
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::optional<WeightedTransaction> wt;
    try {
      wt = parse_transaction_line(lines[i]);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(first_line + i + 1) + ": " + e.what());
    }
    if (!wt) continue;
    for (Item item : wt->items) out.emit({item}, 1);
  }
}

std::optional<KeyValue> sum_reduce(const Itemset& key, std::span<const std::uint64_t> values,
                                   std::optional<std::uint64_t> min_count) {
  std::uint64_t sum = std::accumulate(values.begin(), values.end(), std::uint64_t{0});
  if (min_count && sum < *min_count) return std::nullopt;
  return KeyValue{key, sum};
}

ReduceFn make_sum_reducer(std::optional<std::uint64_t> min_count) {
  return [min_count](const Itemset& key, std::span<const std::uint64_t> values) {
    return sum_reduce(key, values, min_count);
  };
}

Itemset filter_transaction(const CandidateStore& frequent_items, const Itemset& t) {
  Itemset filtered;
  Itemset probe(1);
  for (Item item : t) {
    probe[0] = item;
    if (frequent_items.contains(probe)) filtered.push_back(item);
  }
  return filtered;
}

MapFn ft_map(FrequentLevel l1, StoreVariant variant) {
  return [l1 = std::move(l1), variant](std::span<const std::string> lines, std::size_t first_line,
                                       Emitter& out) {
    std::vector<Itemset> frequent;
    frequent.reserve(l1.entries.size());
    for (const auto& [itemset, count] : l1.entries) frequent.push_back(itemset);
    CandidateStore store = CandidateStore::build(frequent, variant);

    for (std::size_t i = 0; i < lines.size(); ++i) {
      std::optional<WeightedTransaction> wt;
      try {
        wt = parse_transaction_line(lines[i]);
      } catch (const ParseError& e) {
        throw ParseError("line " + std::to_string(first_line + i + 1) + ": " + e.what());
      }
      if (!wt) continue;
      Itemset filtered = filter_transaction(store, wt->items);
      if (filtered.empty()) continue;  // cannot support any candidate of k >= 2
      out.emit(std::move(filtered), 1);
    }
  };
}

MapFn k_itemset_map(FrequentLevel prev, StoreVariant variant, bool weighted_input,
                    std::atomic<std::uint64_t>* gen_calls) {
  return [prev = std::move(prev), variant, weighted_input, gen_calls](
             std::span<const std::string> lines, std::size_t first_line, Emitter& out) {
    // candidate generation is input-independent: run it once per task, before
    // any line is consumed
    if (gen_calls) gen_calls->fetch_add(1, std::memory_order_relaxed);
    std::vector<Itemset> candidates = apriori_gen(prev);
    CandidateStore store = CandidateStore::build(candidates, variant);

    for (std::size_t i = 0; i < lines.size(); ++i) {
      WeightedTransaction wt;
      try {
        if (weighted_input) {
          wt = decode_weighted_transaction(lines[i]);
        } else {
          auto parsed = parse_transaction_line(lines[i]);
          if (!parsed) continue;
          wt = std::move(*parsed);
        }
      } catch (const ParseError& e) {
        throw ParseError("line " + std::to_string(first_line + i + 1) + ": " + e.what());
      }
      for (Itemset& c : store.subset_match(wt.items)) out.emit(std::move(c), wt.weight);
    }
  };
}

namespace {

FrequentLevel level_from_output(int k, const std::vector<KeyValue>& output) {
  FrequentLevel level;
  level.k = k;
  for (const KeyValue& kv : output) level.entries.emplace(kv.key, kv.value);
  return level;
}

std::vector<Split> resolve_splits(std::size_t line_count, const MiningConfig& config,
                                  const std::vector<Block>& blocks) {
  if (config.split_lines) return make_line_splits(line_count, *config.split_lines);
  return splits_from_blocks(blocks);
}

}  // namespace

MiningResult run_apriori(const TransactionDatabase& db, const MiningConfig& config,
                         const ClusterSpec& cluster, const BlockPlacement& placement) {
  if (db.transactions.empty()) throw std::invalid_argument("transaction database is empty");

  MiningResult result;
  result.min_count = config.resolved_min_count(db.transactions.size());

  const std::vector<std::string> raw = raw_lines(db);
  const std::vector<Block> raw_blocks = partition_into_blocks(raw.size(), config.block_lines);
  const std::vector<Split> raw_splits = resolve_splits(raw.size(), config, raw_blocks);
  const ReduceFn combiner = config.use_combiner ? make_sum_reducer(std::nullopt) : ReduceFn{};

  // Job1: frequent single items
  JobSpec job1;
  job1.name = "job1";
  job1.map = one_itemset_map;
  job1.reduce = make_sum_reducer(result.min_count);
  job1.combine = combiner;
  job1.reducers = config.reducers;
  JobResult r1 = run_job(job1, {raw, raw_splits, raw_blocks}, placement, cluster);
  result.jobs.push_back({"job1", std::move(r1.metrics), raw_splits.size(), 0});
  result.levels.push_back(level_from_output(1, r1.output));

  std::vector<std::string> lines = raw;
  std::vector<Block> blocks = raw_blocks;
  std::vector<Split> splits = raw_splits;
  BlockPlacement active_placement = placement;
  bool weighted = false;

  if (!result.levels.back().empty() && config.use_filtered_transactions) {
    // JobFT: rewrite the input as filtered transactions with occurrence counts
    JobSpec jobft;
    jobft.name = "jobft";
    jobft.map = ft_map(result.levels.back(), config.variant);
    jobft.reduce = make_sum_reducer(std::nullopt);
    jobft.combine = combiner;
    jobft.reducers = config.reducers;
    jobft.candidates = result.levels.back().size();
    JobResult rft = run_job(jobft, {raw, raw_splits, raw_blocks}, placement, cluster);
    result.jobs.push_back({"jobft", std::move(rft.metrics), raw_splits.size(), 0});

    lines.clear();
    for (const KeyValue& kv : rft.output) {
      result.filtered_transactions.push_back({kv.key, kv.value});
      lines.push_back(encode_weighted_transaction(result.filtered_transactions.back()));
    }
    weighted = true;
    blocks = partition_into_blocks(lines.size(), config.block_lines);
    splits = resolve_splits(lines.size(), config, blocks);
    // the rewritten file never has more blocks than the original, so the
    // original layout restricted to the new block count still covers it
    active_placement = placement.restricted_to(blocks.size());
  }

  // Job2, iterated while the previous level is non-empty
  while (!result.levels.back().empty()) {
    const FrequentLevel& prev = result.levels.back();
    const int k = prev.k + 1;
    const std::size_t candidate_count = apriori_gen(prev).size();  // cost-model input only

    std::atomic<std::uint64_t> gen_calls{0};
    JobSpec job2;
    job2.name = "job2-k" + std::to_string(k);
    job2.map = k_itemset_map(prev, config.variant, weighted, &gen_calls);
    job2.reduce = make_sum_reducer(result.min_count);
    job2.combine = combiner;
    job2.reducers = config.reducers;
    job2.candidates = candidate_count;
    JobResult r2 = run_job(job2, {lines, splits, blocks}, active_placement, cluster);
    result.jobs.push_back({job2.name, std::move(r2.metrics), splits.size(),
                           gen_calls.load(std::memory_order_relaxed)});
    result.levels.push_back(level_from_output(k, r2.output));
  }

  for (const JobRun& job : result.jobs) result.total_makespan += job.metrics.makespan;
  return result;
}

void write_frequent_itemsets(std::ostream& out, std::span<const FrequentLevel> levels) {
  for (const FrequentLevel& level : levels) {
    for (const auto& [itemset, count] : level.entries)
      out << format_itemset(itemset) << '\t' << count << '\n';
  }
}

std::string frequent_itemsets_text(std::span<const FrequentLevel> levels) {
  std::ostringstream out;
  write_frequent_itemsets(out, levels);
  return out.str();
}

}  // namespace apmr
