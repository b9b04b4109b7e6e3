#include "apmr/oracle.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <stdexcept>

namespace apmr {

std::uint64_t support_of(const Itemset& c, const TransactionDatabase& db) {
  std::uint64_t total = 0;
  for (const WeightedTransaction& wt : db.transactions) {
    if (is_subset(c, wt.items)) total += wt.weight;
  }
  return total;
}

SupportTable brute_force_frequent(const TransactionDatabase& db, std::uint64_t min_count) {
  if (min_count < 1) throw std::invalid_argument("min_count must be >= 1");

  std::set<Item> universe_set;
  std::size_t longest = 0;
  for (const WeightedTransaction& wt : db.transactions) {
    universe_set.insert(wt.items.begin(), wt.items.end());
    longest = std::max(longest, wt.items.size());
  }
  if (universe_set.size() > 20)
    throw std::invalid_argument(
        "item universe has " + std::to_string(universe_set.size()) +
        " items; the brute-force oracle refuses more than 20 (use a smaller fixture)");

  const std::vector<Item> universe(universe_set.begin(), universe_set.end());
  const std::size_t u = universe.size();

  // bitmask per transaction over the universe index
  std::vector<std::pair<std::uint32_t, std::uint64_t>> masks;
  masks.reserve(db.transactions.size());
  for (const WeightedTransaction& wt : db.transactions) {
    std::uint32_t mask = 0;
    for (Item item : wt.items) {
      std::size_t pos = static_cast<std::size_t>(
          std::lower_bound(universe.begin(), universe.end(), item) - universe.begin());
      mask |= (std::uint32_t{1} << pos);
    }
    masks.emplace_back(mask, wt.weight);
  }

  // Subsets longer than the longest transaction have support 0; skip them.
  SupportTable table;
  const std::uint32_t limit = u >= 32 ? 0xFFFFFFFFu : (std::uint32_t{1} << u) - 1;
  for (std::uint32_t subset = 1; subset <= limit; ++subset) {
    if (static_cast<std::size_t>(std::popcount(subset)) > longest) continue;
    std::uint64_t support = 0;
    for (const auto& [mask, weight] : masks) {
      if ((mask & subset) == subset) support += weight;
    }
    if (support < min_count) continue;
    Itemset itemset;
    for (std::size_t pos = 0; pos < u; ++pos) {
      if (subset & (std::uint32_t{1} << pos)) itemset.push_back(universe[pos]);
    }
    table.counts.emplace(std::move(itemset), support);
  }
  return table;
}

bool levels_match(const SupportTable& table, std::span<const FrequentLevel> levels) {
  std::map<Itemset, std::uint64_t> merged;
  for (const FrequentLevel& level : levels) {
    for (const auto& [itemset, count] : level.entries) merged.emplace(itemset, count);
  }
  return merged == table.counts;
}

TransactionDatabase db4() {
  TransactionDatabase db;
  db.transactions = {
      {{1, 2, 3}, 1},
      {{1, 2, 4}, 1},
      {{1, 3}, 1},
      {{2, 4}, 1},
  };
  db.line_count = db.transactions.size();
  return db;
}

}  // namespace apmr
