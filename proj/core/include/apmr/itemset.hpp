#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace apmr {

using Item = std::uint32_t;

// Canonical itemset: strictly ascending item ids, no duplicates.
using Itemset = std::vector<Item>;

bool is_canonical(const Itemset& s);

// Sorts and deduplicates. Throws std::invalid_argument on a negative or
// out-of-range id.
Itemset make_itemset(std::span<const long long> raw_ids);
Itemset make_itemset(std::initializer_list<long long> raw_ids);

// True iff every item of `a` occurs in `b`. Ordered merge over canonical sets.
bool is_subset(const Itemset& a, const Itemset& b);

// Join rule for candidate generation: both inputs share length k-1 >= 1;
// yields a k-itemset when the first k-2 items agree and a's last item is
// smaller than b's. Throws std::invalid_argument on a length mismatch.
std::optional<Itemset> join_step(const Itemset& a, const Itemset& b);

// Frequent k-itemsets with their support counts, keyed lexicographically.
struct FrequentLevel {
  int k = 0;
  std::map<Itemset, std::uint64_t> entries;

  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
};

// Candidate generation: join over ordered pairs of prev's keys, then prune
// every candidate that has an infrequent (k-1)-subset. Output is canonical,
// duplicate-free and lexicographically sorted; empty prev yields no output.
std::vector<Itemset> apriori_gen(const FrequentLevel& prev);

// Space-separated decimal rendering, e.g. (1,2,3) -> "1 2 3".
std::string format_itemset(const Itemset& s);

}  // namespace apmr
