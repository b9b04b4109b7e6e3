#pragma once
// Deliberately naive reference miner: enumerates candidate itemsets over the
// observed item universe and counts support by scanning every transaction.
// Ground truth for tests and for the CLI's --oracle-check.

#include <cstdint>
#include <map>
#include <span>

#include "apmr/dataset.hpp"
#include "apmr/itemset.hpp"

namespace apmr {

struct SupportTable {
  std::map<Itemset, std::uint64_t> counts;  // every itemset with support >= threshold

  friend bool operator==(const SupportTable&, const SupportTable&) = default;
};

// Sum of weights of the transactions containing c.
std::uint64_t support_of(const Itemset& c, const TransactionDatabase& db);

// Enumerates all subsets of the observed item universe up to the longest
// transaction's length. Refuses universes above 20 items; min_count must be
// >= 1 (std::invalid_argument otherwise).
SupportTable brute_force_frequent(const TransactionDatabase& db, std::uint64_t min_count);

// True iff the non-empty levels, merged, equal the table exactly.
bool levels_match(const SupportTable& table, std::span<const FrequentLevel> levels);

// Shared fixture: transactions (1,2,3), (1,2,4), (1,3), (2,4), weight 1 each.
TransactionDatabase db4();

}  // namespace apmr
