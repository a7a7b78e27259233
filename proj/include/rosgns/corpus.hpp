#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rosgns {

using Count = std::int64_t;
using Index = std::int32_t;

// Dense token <-> index bijection. Indices are 0..size()-1.
class TokenIndex {
 public:
  TokenIndex() = default;
  explicit TokenIndex(std::vector<std::string> tokens);

  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  const std::string& token(Index i) const { return tokens_.at(static_cast<std::size_t>(i)); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  // -1 when absent.
  Index find(std::string_view token) const;
  bool contains(std::string_view token) const { return find(token) >= 0; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, Index> index_of_;
};

// Filtered vocabulary: every token occurs strictly more than min_count times.
// Ordered by descending count, ties broken lexicographically.
class Vocabulary {
 public:
  Vocabulary() = default;
  // Validates ordering and the min_count invariant.
  Vocabulary(std::vector<std::string> tokens, std::vector<Count> counts, Count min_count);

  std::size_t size() const { return index_.size(); }
  bool empty() const { return index_.empty(); }
  Count min_count() const { return min_count_; }
  const TokenIndex& index() const { return index_; }
  const std::string& token(Index i) const { return index_.token(i); }
  Index find(std::string_view token) const { return index_.find(token); }
  Count count(Index i) const { return counts_.at(static_cast<std::size_t>(i)); }
  const std::vector<Count>& counts() const { return counts_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.min_count_ == b.min_count_ && a.counts_ == b.counts_ &&
           a.index_.tokens() == b.index_.tokens();
  }

 private:
  TokenIndex index_;
  std::vector<Count> counts_;
  Count min_count_ = 0;
};

struct PairCount {
  Index word;
  Index context;
  Count count;

  friend bool operator==(const PairCount&, const PairCount&) = default;
};

// Sparse co-occurrence counts #(w,c) with derived marginals #(w), #(c) and
// total |D|. Stored row-major (CSR), columns ascending within each row, no
// explicit zeros.
class CooccurrenceStats {
 public:
  CooccurrenceStats() = default;
  // Duplicate (w,c) entries are summed; zero counts are dropped.
  CooccurrenceStats(std::size_t words, std::size_t contexts, int window,
                    std::vector<PairCount> pairs);

  std::size_t words() const { return word_marginals_.size(); }
  std::size_t contexts() const { return context_marginals_.size(); }
  int window() const { return window_; }
  Count total() const { return total_; }
  std::size_t nonzeros() const { return values_.size(); }

  Count word_marginal(Index w) const { return word_marginals_[static_cast<std::size_t>(w)]; }
  Count context_marginal(Index c) const { return context_marginals_[static_cast<std::size_t>(c)]; }
  const std::vector<Count>& word_marginals() const { return word_marginals_; }
  const std::vector<Count>& context_marginals() const { return context_marginals_; }

  // Observed contexts of row w (ascending) and their counts.
  std::span<const Index> row_contexts(Index w) const;
  std::span<const Count> row_counts(Index w) const;

  // O(log nnz_row) lookup; 0 when unobserved.
  Count count(Index w, Index c) const;

  // Row-major triples.
  std::vector<PairCount> triples() const;

  friend bool operator==(const CooccurrenceStats& a, const CooccurrenceStats& b) {
    return a.window_ == b.window_ && a.total_ == b.total_ &&
           a.row_offsets_ == b.row_offsets_ && a.columns_ == b.columns_ &&
           a.values_ == b.values_ && a.word_marginals_ == b.word_marginals_ &&
           a.context_marginals_ == b.context_marginals_;
  }

 private:
  int window_ = 0;
  Count total_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<Index> columns_;
  std::vector<Count> values_;
  std::vector<Count> word_marginals_;
  std::vector<Count> context_marginals_;
};

// Lowercase, replace every non-alphanumeric character with a space, split on
// whitespace. Only ASCII letters and digits count as alphanumeric; any
// non-ASCII code point (and every invalid UTF-8 byte) acts as a separator.
std::vector<std::string> tokenize(std::string_view text);
// Throws IoError naming `source` when the stream fails.
std::vector<std::string> tokenize(std::istream& in, const std::string& source);
std::vector<std::string> tokenize_file(const std::string& path);

// Keeps tokens with frequency > min_count.
Vocabulary build_vocabulary(std::span<const std::string> tokens, Count min_count);

// Drops out-of-vocabulary tokens, then maps the rest to indices.
std::vector<Index> to_indices(std::span<const std::string> tokens, const TokenIndex& index);

// OOV tokens are removed before windowing, so windows close over the gaps.
// Contexts are the L positions on each side.
CooccurrenceStats count_cooccurrences(std::span<const std::string> tokens,
                                      const Vocabulary& vocab, int window);
CooccurrenceStats count_cooccurrences(std::span<const Index> sequence,
                                      std::size_t vocab_size, int window);

// Vocabulary plus statistics, as persisted in a stats file (V_W = V_C).
struct CorpusStats {
  Vocabulary vocab;
  CooccurrenceStats cooc;
};

// Line-based stats file:
//
//   rosgns-cooc 1
//   n <n>  m <m>  window <L>  min_count <t>  total <|D|>  nnz <nnz>   (one per line)
//   vocab
//   <token> <count>            n lines, index order
//   pairs
//   <w> <c> <count>            nnz lines, row-major
void save_stats(const CorpusStats& stats, std::ostream& out);
void save_stats(const CorpusStats& stats, const std::string& path);
CorpusStats load_stats(std::istream& in, const std::string& source);
CorpusStats load_stats(const std::string& path);

}  // namespace rosgns
