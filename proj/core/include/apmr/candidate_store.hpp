#pragma once
// Three interchangeable containers for one level's candidate itemsets: a
// prefix trie, a classical hash tree, and a trie whose per-node child lookup
// is a hash table. All three expose the same membership / enumeration /
// subset-matching contract and must agree with the brute-force subset filter.
// Stores are immutable after build and safe for concurrent read-only matching.

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "apmr/itemset.hpp"

namespace apmr {

enum class StoreVariant { Trie, HashTree, HashTableTrie };

inline constexpr std::array<StoreVariant, 3> kStoreVariants = {
    StoreVariant::Trie, StoreVariant::HashTree, StoreVariant::HashTableTrie};

std::string_view to_string(StoreVariant v);
// Accepts "trie", "hashtree", "httrie".
std::optional<StoreVariant> store_variant_from_string(std::string_view name);

struct HashTreeParams {
  std::size_t fanout = 8;         // interior nodes route item at depth d by item % fanout
  std::size_t leaf_capacity = 16; // leaves split when they exceed this, while items remain
};

// Filled by subset_match when the caller passes it. `descended` records the
// child labels the walk stepped into; a correct walk never descends on an
// item absent from the transaction.
struct MatchStats {
  std::size_t nodes_visited = 0;
  std::vector<Item> descended;
};

class CandidateStore {
 public:
  CandidateStore() = default;  // empty store, k = 0

  // All itemsets must share one length; duplicate inputs collapse.
  // Throws std::invalid_argument on mixed lengths.
  static CandidateStore build(std::span<const Itemset> itemsets, StoreVariant variant,
                              HashTreeParams params = {});

  // Length mismatch returns false, it is not an error.
  bool contains(const Itemset& x) const;

  // Exactly the stored itemsets contained in `transaction`, lexicographic.
  std::vector<Itemset> subset_match(const Itemset& transaction, MatchStats* stats = nullptr) const;

  // All stored itemsets, lexicographic.
  std::vector<Itemset> enumerate() const;

  std::size_t size() const;
  std::size_t k() const;
  StoreVariant variant() const { return variant_; }

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  StoreVariant variant_ = StoreVariant::Trie;
};

}  // namespace apmr
