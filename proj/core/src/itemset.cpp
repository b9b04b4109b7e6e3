#include "apmr/itemset.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace apmr {

bool is_canonical(const Itemset& s) {
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i - 1] >= s[i]) return false;
  }
  return true;
}

Itemset make_itemset(std::span<const long long> raw_ids) {
  Itemset out;
  out.reserve(raw_ids.size());
  for (long long id : raw_ids) {
    if (id < 0) throw std::invalid_argument("item id must be non-negative, got " + std::to_string(id));
    if (id > static_cast<long long>(std::numeric_limits<Item>::max()))
      throw std::invalid_argument("item id out of range: " + std::to_string(id));
    out.push_back(static_cast<Item>(id));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Itemset make_itemset(std::initializer_list<long long> raw_ids) {
  return make_itemset(std::span<const long long>(raw_ids.begin(), raw_ids.size()));
}

bool is_subset(const Itemset& a, const Itemset& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::optional<Itemset> join_step(const Itemset& a, const Itemset& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("join_step: itemsets must have equal length");
  if (a.empty()) throw std::invalid_argument("join_step: itemsets must be non-empty");
  if (!std::equal(a.begin(), a.end() - 1, b.begin())) return std::nullopt;
  if (a.back() >= b.back()) return std::nullopt;
  Itemset joined = a;
  joined.push_back(b.back());
  return joined;
}

std::vector<Itemset> apriori_gen(const FrequentLevel& prev) {
  std::vector<Itemset> keys;
  keys.reserve(prev.entries.size());
  for (const auto& [itemset, count] : prev.entries) keys.push_back(itemset);

  std::vector<Itemset> out;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    for (std::size_t j = i + 1; j < keys.size(); ++j) {
      // keys are sorted, so once the (k-2)-prefix diverges no later key joins
      if (!std::equal(keys[i].begin(), keys[i].end() - 1, keys[j].begin())) break;
      auto candidate = join_step(keys[i], keys[j]);
      if (!candidate) continue;

      bool keep = true;
      Itemset sub;
      sub.reserve(candidate->size() - 1);
      for (std::size_t omit = 0; omit < candidate->size() && keep; ++omit) {
        sub.clear();
        for (std::size_t p = 0; p < candidate->size(); ++p) {
          if (p != omit) sub.push_back((*candidate)[p]);
        }
        keep = prev.entries.contains(sub);
      }
      if (keep) out.push_back(std::move(*candidate));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string format_itemset(const Itemset& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(s[i]);
  }
  return out;
}

}  // namespace apmr
