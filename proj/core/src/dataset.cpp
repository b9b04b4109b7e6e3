#include "apmr/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

namespace apmr {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f'; }

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

long long parse_integer_token(std::string_view token) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    throw ParseError("non-integer token '" + std::string(token) + "'");
  return value;
}

}  // namespace

std::optional<WeightedTransaction> parse_transaction_line(std::string_view line,
                                                          std::size_t* duplicates) {
  auto tokens = split_tokens(line);
  if (tokens.empty()) return std::nullopt;

  std::vector<long long> ids;
  ids.reserve(tokens.size());
  for (auto token : tokens) ids.push_back(parse_integer_token(token));

  WeightedTransaction wt;
  try {
    wt.items = make_itemset(ids);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  if (duplicates && wt.items.size() != ids.size()) ++*duplicates;
  wt.weight = 1;
  return wt;
}

TransactionDatabase parse_transactions(std::istream& in) {
  TransactionDatabase db;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t dups = 0;
    std::optional<WeightedTransaction> wt;
    try {
      wt = parse_transaction_line(line, &dups);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!wt) {
      ++db.blank_lines;
      continue;
    }
    if (dups) ++db.lines_with_duplicates;
    db.transactions.push_back(std::move(*wt));
  }
  db.line_count = db.transactions.size();
  return db;
}

TransactionDatabase load_transaction_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open transaction file: " + path.string());
  return parse_transactions(in);
}

std::vector<Block> partition_into_blocks(std::size_t line_count, std::size_t block_lines) {
  if (block_lines == 0) throw std::invalid_argument("block_lines must be >= 1");
  std::vector<Block> blocks;
  for (std::size_t begin = 0; begin < line_count; begin += block_lines) {
    std::size_t end = std::min(line_count, begin + block_lines);
    blocks.push_back({blocks.size(), begin, end});
  }
  return blocks;
}

std::vector<Split> make_line_splits(std::size_t line_count, std::size_t lines_per_split) {
  if (lines_per_split == 0) throw std::invalid_argument("lines_per_split must be >= 1");
  std::vector<Split> splits;
  for (std::size_t begin = 0; begin < line_count; begin += lines_per_split) {
    std::size_t end = std::min(line_count, begin + lines_per_split);
    splits.push_back({splits.size(), begin, end});
  }
  return splits;
}

std::vector<Split> splits_from_blocks(std::span<const Block> blocks) {
  std::vector<Split> splits;
  splits.reserve(blocks.size());
  for (const Block& b : blocks) splits.push_back({b.block_id, b.begin, b.end});
  return splits;
}

std::string encode_weighted_transaction(const WeightedTransaction& wt) {
  std::string line = format_itemset(wt.items);
  if (!line.empty()) line += ' ';
  line += std::to_string(wt.weight);
  return line;
}

WeightedTransaction decode_weighted_transaction(std::string_view line) {
  auto tokens = split_tokens(line);
  if (tokens.size() < 2)
    throw ParseError("weighted transaction needs at least one item and a weight, got '" +
                     std::string(line) + "'");
  std::vector<long long> ids;
  ids.reserve(tokens.size() - 1);
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) ids.push_back(parse_integer_token(tokens[i]));
  long long weight = parse_integer_token(tokens.back());
  if (weight < 1) throw ParseError("weight must be >= 1, got " + std::to_string(weight));

  WeightedTransaction wt;
  try {
    wt.items = make_itemset(ids);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  wt.weight = static_cast<std::uint64_t>(weight);
  return wt;
}

std::string encode_raw_transaction(const Itemset& items) { return format_itemset(items); }

std::vector<std::string> raw_lines(const TransactionDatabase& db) {
  std::vector<std::string> lines;
  lines.reserve(db.transactions.size());
  for (const auto& wt : db.transactions) lines.push_back(encode_raw_transaction(wt.items));
  return lines;
}

}  // namespace apmr
