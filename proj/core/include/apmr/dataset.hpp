#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "apmr/itemset.hpp"

namespace apmr {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A transaction with its occurrence count. Raw ingest carries weight 1; the
// transaction-filtering job folds duplicates into larger weights.
struct WeightedTransaction {
  Itemset items;
  std::uint64_t weight = 1;

  friend bool operator==(const WeightedTransaction&, const WeightedTransaction&) = default;
};

struct TransactionDatabase {
  std::vector<WeightedTransaction> transactions;  // one per non-blank line, file order
  std::size_t line_count = 0;                     // non-blank lines
  std::size_t blank_lines = 0;                    // tolerated, counted
  std::size_t lines_with_duplicates = 0;          // tolerated, deduplicated, counted
};

// Contiguous line ranges. Blocks model the placement units of the stored file;
// splits define map tasks. Both partition [0, line_count).
struct Block {
  std::size_t block_id = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t lines() const { return end - begin; }
};

struct Split {
  std::size_t split_id = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t lines() const { return end - begin; }
};

// nullopt for a blank line. Duplicate items within the line collapse and
// increment *duplicates when given. Throws ParseError on a non-integer or
// negative token.
std::optional<WeightedTransaction> parse_transaction_line(std::string_view line,
                                                          std::size_t* duplicates = nullptr);

// Parse errors are annotated with the 1-based line number.
TransactionDatabase parse_transactions(std::istream& in);
TransactionDatabase load_transaction_file(const std::filesystem::path& path);

// ceil(line_count / block_lines) contiguous blocks, last may be short.
// block_lines = 0 throws std::invalid_argument. Same contract for splits.
std::vector<Block> partition_into_blocks(std::size_t line_count, std::size_t block_lines);
std::vector<Split> make_line_splits(std::size_t line_count, std::size_t lines_per_split);
std::vector<Split> splits_from_blocks(std::span<const Block> blocks);

// Weighted line format is positional: ascending items, then the weight as the
// final token. "1 4 2" is itemset (1,4) with weight 2.
std::string encode_weighted_transaction(const WeightedTransaction& wt);
// Throws ParseError on fewer than two tokens or weight < 1.
WeightedTransaction decode_weighted_transaction(std::string_view line);

// Raw line for a transaction: items only, no weight column.
std::string encode_raw_transaction(const Itemset& items);
std::vector<std::string> raw_lines(const TransactionDatabase& db);

}  // namespace apmr
