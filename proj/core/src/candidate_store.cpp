#include "apmr/candidate_store.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace apmr {

std::string_view to_string(StoreVariant v) {
  switch (v) {
    case StoreVariant::Trie: return "trie";
    case StoreVariant::HashTree: return "hashtree";
    case StoreVariant::HashTableTrie: return "httrie";
  }
  return "?";
}

std::optional<StoreVariant> store_variant_from_string(std::string_view name) {
  if (name == "trie") return StoreVariant::Trie;
  if (name == "hashtree") return StoreVariant::HashTree;
  if (name == "httrie") return StoreVariant::HashTableTrie;
  return std::nullopt;
}

struct CandidateStore::Impl {
  std::size_t k = 0;
  std::size_t count = 0;

  virtual ~Impl() = default;
  virtual bool contains(const Itemset& x) const = 0;
  virtual void match(const Itemset& t, std::vector<Itemset>& out, MatchStats* stats) const = 0;
  virtual void enumerate(std::vector<Itemset>& out) const = 0;
};

namespace {

void note_visit(MatchStats* stats) {
  if (stats) ++stats->nodes_visited;
}

void note_descent(MatchStats* stats, Item item) {
  if (stats) stats->descended.push_back(item);
}

// --- prefix trie, children in ascending order -------------------------------

struct TrieNode {
  std::vector<std::pair<Item, std::unique_ptr<TrieNode>>> children;
  bool terminal = false;

  TrieNode* child(Item item) const {
    auto it = std::lower_bound(children.begin(), children.end(), item,
                               [](const auto& c, Item v) { return c.first < v; });
    return (it != children.end() && it->first == item) ? it->second.get() : nullptr;
  }

  TrieNode& child_or_create(Item item) {
    auto it = std::lower_bound(children.begin(), children.end(), item,
                               [](const auto& c, Item v) { return c.first < v; });
    if (it == children.end() || it->first != item)
      it = children.insert(it, {item, std::make_unique<TrieNode>()});
    return *it->second;
  }
};

struct TrieStore final : CandidateStore::Impl {
  TrieNode root;

  void insert(const Itemset& s) {
    TrieNode* node = &root;
    for (Item item : s) node = &node->child_or_create(item);
    node->terminal = true;
  }

  bool contains(const Itemset& x) const override {
    if (x.size() != k || count == 0) return false;
    const TrieNode* node = &root;
    for (Item item : x) {
      node = node->child(item);
      if (!node) return false;
    }
    return node->terminal;
  }

  // Walk transaction positions in order; only children labelled with a
  // transaction item are ever descended into.
  void match_rec(const TrieNode& node, const Itemset& t, std::size_t from, Itemset& prefix,
                 std::vector<Itemset>& out, MatchStats* stats) const {
    note_visit(stats);
    if (node.terminal) out.push_back(prefix);
    for (std::size_t p = from; p < t.size(); ++p) {
      if (const TrieNode* next = node.child(t[p])) {
        note_descent(stats, t[p]);
        prefix.push_back(t[p]);
        match_rec(*next, t, p + 1, prefix, out, stats);
        prefix.pop_back();
      }
    }
  }

  void match(const Itemset& t, std::vector<Itemset>& out, MatchStats* stats) const override {
    if (count == 0) return;
    Itemset prefix;
    match_rec(root, t, 0, prefix, out, stats);
  }

  void enum_rec(const TrieNode& node, Itemset& prefix, std::vector<Itemset>& out) const {
    if (node.terminal) out.push_back(prefix);
    for (const auto& [item, child] : node.children) {
      prefix.push_back(item);
      enum_rec(*child, prefix, out);
      prefix.pop_back();
    }
  }

  void enumerate(std::vector<Itemset>& out) const override {
    Itemset prefix;
    enum_rec(root, prefix, out);
  }
};

// --- trie with hash-indexed children ----------------------------------------

struct HashTrieNode {
  std::unordered_map<Item, std::unique_ptr<HashTrieNode>> children;
  bool terminal = false;
};

struct HashTableTrieStore final : CandidateStore::Impl {
  HashTrieNode root;

  void insert(const Itemset& s) {
    HashTrieNode* node = &root;
    for (Item item : s) {
      auto& slot = node->children[item];
      if (!slot) slot = std::make_unique<HashTrieNode>();
      node = slot.get();
    }
    node->terminal = true;
  }

  bool contains(const Itemset& x) const override {
    if (x.size() != k || count == 0) return false;
    const HashTrieNode* node = &root;
    for (Item item : x) {
      auto it = node->children.find(item);
      if (it == node->children.end()) return false;
      node = it->second.get();
    }
    return node->terminal;
  }

  void match_rec(const HashTrieNode& node, const Itemset& t, std::size_t from, Itemset& prefix,
                 std::vector<Itemset>& out, MatchStats* stats) const {
    note_visit(stats);
    if (node.terminal) out.push_back(prefix);
    for (std::size_t p = from; p < t.size(); ++p) {
      auto it = node.children.find(t[p]);
      if (it == node.children.end()) continue;
      note_descent(stats, t[p]);
      prefix.push_back(t[p]);
      match_rec(*it->second, t, p + 1, prefix, out, stats);
      prefix.pop_back();
    }
  }

  void match(const Itemset& t, std::vector<Itemset>& out, MatchStats* stats) const override {
    if (count == 0) return;
    Itemset prefix;
    match_rec(root, t, 0, prefix, out, stats);
  }

  // Hash maps have no useful iteration order; sort the labels per node so the
  // enumeration stays lexicographic.
  void enum_rec(const HashTrieNode& node, Itemset& prefix, std::vector<Itemset>& out) const {
    if (node.terminal) out.push_back(prefix);
    std::vector<Item> labels;
    labels.reserve(node.children.size());
    for (const auto& [item, child] : node.children) labels.push_back(item);
    std::sort(labels.begin(), labels.end());
    for (Item item : labels) {
      prefix.push_back(item);
      enum_rec(*node.children.at(item), prefix, out);
      prefix.pop_back();
    }
  }

  void enumerate(std::vector<Itemset>& out) const override {
    Itemset prefix;
    enum_rec(root, prefix, out);
  }
};

// --- hash tree ---------------------------------------------------------------

struct HashTreeNode {
  bool leaf = true;
  std::vector<Itemset> bucket;
  std::vector<std::unique_ptr<HashTreeNode>> kids;  // fanout entries when interior
};

struct HashTreeStore final : CandidateStore::Impl {
  HashTreeNode root;
  HashTreeParams params;

  std::size_t route(Item item) const { return item % params.fanout; }

  // A leaf splits once it exceeds leaf_capacity, unless all k items are
  // already consumed at this depth; then it simply overflows.
  void insert(HashTreeNode& node, const Itemset& s, std::size_t depth) {
    if (!node.leaf) {
      auto& kid = node.kids[route(s[depth])];
      if (!kid) kid = std::make_unique<HashTreeNode>();
      insert(*kid, s, depth + 1);
      return;
    }
    node.bucket.push_back(s);
    if (node.bucket.size() > params.leaf_capacity && depth < k) {
      node.leaf = false;
      node.kids.resize(params.fanout);
      std::vector<Itemset> pending = std::move(node.bucket);
      node.bucket.clear();
      for (auto& itemset : pending) {
        auto& kid = node.kids[route(itemset[depth])];
        if (!kid) kid = std::make_unique<HashTreeNode>();
        insert(*kid, itemset, depth + 1);
      }
    }
  }

  bool contains(const Itemset& x) const override {
    if (x.size() != k || count == 0) return false;
    const HashTreeNode* node = &root;
    std::size_t depth = 0;
    while (!node->leaf) {
      node = node->kids[route(x[depth])].get();
      if (!node) return false;
      ++depth;
    }
    return std::find(node->bucket.begin(), node->bucket.end(), x) != node->bucket.end();
  }

  // Distinct hash paths can land on the same leaf, so results are collected
  // into a set.
  void match_rec(const HashTreeNode& node, const Itemset& t, std::size_t from,
                 std::set<Itemset>& out, MatchStats* stats) const {
    note_visit(stats);
    if (node.leaf) {
      for (const Itemset& c : node.bucket) {
        if (is_subset(c, t)) out.insert(c);
      }
      return;
    }
    for (std::size_t p = from; p < t.size(); ++p) {
      if (const HashTreeNode* kid = node.kids[route(t[p])].get()) {
        note_descent(stats, t[p]);
        match_rec(*kid, t, p + 1, out, stats);
      }
    }
  }

  void match(const Itemset& t, std::vector<Itemset>& out, MatchStats* stats) const override {
    if (count == 0) return;
    std::set<Itemset> found;
    match_rec(root, t, 0, found, stats);
    out.assign(found.begin(), found.end());
  }

  void enum_rec(const HashTreeNode& node, std::vector<Itemset>& out) const {
    if (node.leaf) {
      out.insert(out.end(), node.bucket.begin(), node.bucket.end());
      return;
    }
    for (const auto& kid : node.kids) {
      if (kid) enum_rec(*kid, out);
    }
  }

  void enumerate(std::vector<Itemset>& out) const override {
    enum_rec(root, out);
    std::sort(out.begin(), out.end());
  }
};

}  // namespace

CandidateStore CandidateStore::build(std::span<const Itemset> itemsets, StoreVariant variant,
                                     HashTreeParams params) {
  if (params.fanout == 0) throw std::invalid_argument("hash tree fanout must be >= 1");
  if (params.leaf_capacity == 0) throw std::invalid_argument("hash tree leaf capacity must be >= 1");

  std::set<Itemset> distinct;
  std::size_t k = itemsets.empty() ? 0 : itemsets.front().size();
  for (const Itemset& s : itemsets) {
    if (s.size() != k)
      throw std::invalid_argument("candidate store requires itemsets of one length, got " +
                                  std::to_string(s.size()) + " and " + std::to_string(k));
    distinct.insert(s);
  }

  CandidateStore store;
  store.variant_ = variant;
  switch (variant) {
    case StoreVariant::Trie: {
      auto impl = std::make_shared<TrieStore>();
      for (const Itemset& s : distinct) impl->insert(s);
      impl->k = k;
      impl->count = distinct.size();
      store.impl_ = std::move(impl);
      break;
    }
    case StoreVariant::HashTableTrie: {
      auto impl = std::make_shared<HashTableTrieStore>();
      for (const Itemset& s : distinct) impl->insert(s);
      impl->k = k;
      impl->count = distinct.size();
      store.impl_ = std::move(impl);
      break;
    }
    case StoreVariant::HashTree: {
      auto impl = std::make_shared<HashTreeStore>();
      impl->params = params;
      impl->k = k;
      for (const Itemset& s : distinct) impl->insert(impl->root, s, 0);
      impl->count = distinct.size();
      store.impl_ = std::move(impl);
      break;
    }
  }
  return store;
}

bool CandidateStore::contains(const Itemset& x) const {
  return impl_ && impl_->contains(x);
}

std::vector<Itemset> CandidateStore::subset_match(const Itemset& transaction,
                                                  MatchStats* stats) const {
  std::vector<Itemset> out;
  if (impl_) impl_->match(transaction, out, stats);
  return out;
}

std::vector<Itemset> CandidateStore::enumerate() const {
  std::vector<Itemset> out;
  if (impl_) impl_->enumerate(out);
  return out;
}

std::size_t CandidateStore::size() const { return impl_ ? impl_->count : 0; }

std::size_t CandidateStore::k() const { return impl_ ? impl_->k : 0; }

}  // namespace apmr
