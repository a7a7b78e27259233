#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rosgns/embeddings.hpp"

namespace rosgns {

struct SimilarityPair {
  std::string first;
  std::string second;
  double score;
};

struct SimilarityDataset {
  std::string name;
  std::vector<SimilarityPair> pairs;
  // Repeated unordered pairs dropped at load time (first occurrence wins).
  std::size_t duplicates_dropped = 0;
};

struct EvalReport {
  std::string dataset;
  double spearman = 0.0;
  std::size_t pairs_used = 0;
  std::size_t pairs_total = 0;
};

// "word1 word2 score" per line, separated by spaces, tabs or commas. Lines
// starting with '#' are comments; one header line (non-numeric score) is
// tolerated before the first row. Tokens are lowercased.
// Throws ParseError on a bad row and on a file without rows.
SimilarityDataset load_dataset(std::istream& in, const std::string& name,
                               const std::string& source);
SimilarityDataset load_dataset(const std::string& path, const std::string& name);

// Ranks with ties sharing the average rank (1-based).
std::vector<double> average_ranks(std::span<const double> values);

// Pearson correlation of the average-rank vectors.
// Throws UndefinedCorrelation for fewer than 2 points or zero rank variance.
double spearman(std::span<const double> xs, std::span<const double> ys);

// Spearman between cosine similarities and human scores over the pairs whose
// words are both in the vocabulary. Throws UndefinedCorrelation (carrying the
// OOV accounting) when fewer than 2 pairs are usable.
EvalReport evaluate(const EmbeddingSet& set, const SimilarityDataset& dataset);

}  // namespace rosgns
