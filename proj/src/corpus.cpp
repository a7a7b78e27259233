#include "rosgns/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <iterator>
#include <sstream>

#include "rosgns/errors.hpp"

namespace rosgns {

TokenIndex::TokenIndex(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  index_of_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    auto [it, inserted] = index_of_.emplace(tokens_[i], static_cast<Index>(i));
    if (!inserted) {
      throw ContractViolation("duplicate token in index: '" + tokens_[i] + "'");
    }
  }
}

Index TokenIndex::find(std::string_view token) const {
  auto it = index_of_.find(std::string(token));
  return it == index_of_.end() ? -1 : it->second;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::vector<Count> counts,
                       Count min_count)
    : counts_(std::move(counts)), min_count_(min_count) {
  if (tokens.size() != counts_.size()) {
    throw ContractViolation("vocabulary: token/count length mismatch");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (counts_[i] <= min_count_) {
      throw ContractViolation("vocabulary: count of '" + tokens[i] +
                              "' does not exceed min_count");
    }
    if (i > 0) {
      bool ordered = counts_[i - 1] > counts_[i] ||
                     (counts_[i - 1] == counts_[i] && tokens[i - 1] < tokens[i]);
      if (!ordered) {
        throw ContractViolation("vocabulary: tokens not in (count desc, token asc) order at '" +
                                tokens[i] + "'");
      }
    }
  }
  index_ = TokenIndex(std::move(tokens));
}

CooccurrenceStats::CooccurrenceStats(std::size_t words, std::size_t contexts, int window,
                                     std::vector<PairCount> pairs)
    : window_(window), word_marginals_(words, 0), context_marginals_(contexts, 0) {
  if (window < 1) throw ContractViolation("window must be >= 1");
  for (const auto& p : pairs) {
    if (p.word < 0 || static_cast<std::size_t>(p.word) >= words || p.context < 0 ||
        static_cast<std::size_t>(p.context) >= contexts) {
      throw ContractViolation("pair index out of range");
    }
    if (p.count < 0) throw ContractViolation("negative pair count");
  }
  std::sort(pairs.begin(), pairs.end(), [](const PairCount& a, const PairCount& b) {
    return a.word != b.word ? a.word < b.word : a.context < b.context;
  });

  row_offsets_.assign(words + 1, 0);
  for (std::size_t i = 0; i < pairs.size();) {
    const PairCount& head = pairs[i];
    Count sum = 0;
    for (; i < pairs.size() && pairs[i].word == head.word && pairs[i].context == head.context;
         ++i) {
      sum += pairs[i].count;
    }
    if (sum == 0) continue;
    columns_.push_back(head.context);
    values_.push_back(sum);
    ++row_offsets_[static_cast<std::size_t>(head.word) + 1];
    word_marginals_[static_cast<std::size_t>(head.word)] += sum;
    context_marginals_[static_cast<std::size_t>(head.context)] += sum;
    total_ += sum;
  }
  for (std::size_t w = 0; w < words; ++w) row_offsets_[w + 1] += row_offsets_[w];
}

std::span<const Index> CooccurrenceStats::row_contexts(Index w) const {
  auto row = static_cast<std::size_t>(w);
  return {columns_.data() + row_offsets_[row], row_offsets_[row + 1] - row_offsets_[row]};
}

std::span<const Count> CooccurrenceStats::row_counts(Index w) const {
  auto row = static_cast<std::size_t>(w);
  return {values_.data() + row_offsets_[row], row_offsets_[row + 1] - row_offsets_[row]};
}

Count CooccurrenceStats::count(Index w, Index c) const {
  auto cols = row_contexts(w);
  auto it = std::lower_bound(cols.begin(), cols.end(), c);
  if (it == cols.end() || *it != c) return 0;
  return row_counts(w)[static_cast<std::size_t>(it - cols.begin())];
}

std::vector<PairCount> CooccurrenceStats::triples() const {
  std::vector<PairCount> out;
  out.reserve(values_.size());
  for (std::size_t w = 0; w < words(); ++w) {
    for (std::size_t j = row_offsets_[w]; j < row_offsets_[w + 1]; ++j) {
      out.push_back({static_cast<Index>(w), columns_[j], values_[j]});
    }
  }
  return out;
}

namespace {

bool is_ascii_alnum(unsigned char ch) {
  return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9');
}

// Appends tokens of `text` to `out`. `pending` carries a token cut by a chunk
// boundary; bytes >= 0x80 never belong to a token, so chunking at any byte
// offset is safe.
void tokenize_into(std::string_view text, std::string& pending, std::vector<std::string>& out) {
  for (char raw : text) {
    auto ch = static_cast<unsigned char>(raw);
    if (is_ascii_alnum(ch)) {
      pending.push_back(static_cast<char>(ch >= 'A' && ch <= 'Z' ? ch - 'A' + 'a' : ch));
    } else if (!pending.empty()) {
      out.push_back(std::move(pending));
      pending.clear();
    }
  }
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string pending;
  tokenize_into(text, pending, out);
  if (!pending.empty()) out.push_back(std::move(pending));
  return out;
}

std::vector<std::string> tokenize(std::istream& in, const std::string& source) {
  std::vector<std::string> out;
  std::string pending;
  std::vector<char> buffer(1 << 16);
  while (in) {
    in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    tokenize_into({buffer.data(), static_cast<std::size_t>(in.gcount())}, pending, out);
  }
  if (in.bad()) throw IoError("read error on " + source);
  if (!pending.empty()) out.push_back(std::move(pending));
  return out;
}

std::vector<std::string> tokenize_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file: " + path);
  return tokenize(in, path);
}

Vocabulary build_vocabulary(std::span<const std::string> tokens, Count min_count) {
  if (min_count < 1) throw ContractViolation("min_count must be >= 1");
  std::unordered_map<std::string_view, Count> freq;
  for (const auto& t : tokens) ++freq[t];

  std::vector<std::pair<std::string_view, Count>> kept;
  for (const auto& [token, count] : freq) {
    if (count > min_count) kept.emplace_back(token, count);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });

  std::vector<std::string> names;
  std::vector<Count> counts;
  names.reserve(kept.size());
  counts.reserve(kept.size());
  for (const auto& [token, count] : kept) {
    names.emplace_back(token);
    counts.push_back(count);
  }
  return Vocabulary(std::move(names), std::move(counts), min_count);
}

std::vector<Index> to_indices(std::span<const std::string> tokens, const TokenIndex& index) {
  std::vector<Index> seq;
  seq.reserve(tokens.size());
  for (const auto& t : tokens) {
    Index i = index.find(t);
    if (i >= 0) seq.push_back(i);
  }
  return seq;
}

CooccurrenceStats count_cooccurrences(std::span<const Index> sequence, std::size_t vocab_size,
                                      int window) {
  if (window < 1) throw ContractViolation("window must be >= 1");
  if (vocab_size == 0) throw ContractViolation("vocabulary is empty");

  std::unordered_map<std::uint64_t, Count> counts;
  const auto len = static_cast<std::ptrdiff_t>(sequence.size());
  for (std::ptrdiff_t i = 0; i < len; ++i) {
    const auto w = static_cast<std::uint64_t>(sequence[static_cast<std::size_t>(i)]);
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - window);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(len - 1, i + window);
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
      if (j == i) continue;
      const auto c = static_cast<std::uint64_t>(sequence[static_cast<std::size_t>(j)]);
      ++counts[(w << 32) | c];
    }
  }

  std::vector<PairCount> pairs;
  pairs.reserve(counts.size());
  for (const auto& [key, count] : counts) {
    pairs.push_back({static_cast<Index>(key >> 32), static_cast<Index>(key & 0xffffffffu), count});
  }
  return CooccurrenceStats(vocab_size, vocab_size, window, std::move(pairs));
}

CooccurrenceStats count_cooccurrences(std::span<const std::string> tokens,
                                      const Vocabulary& vocab, int window) {
  auto seq = to_indices(tokens, vocab.index());
  return count_cooccurrences(seq, vocab.size(), window);
}

}  // namespace rosgns
