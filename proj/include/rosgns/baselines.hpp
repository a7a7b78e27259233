#pragma once

#include <Eigen/SparseCore>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "rosgns/corpus.hpp"
#include "rosgns/manifold.hpp"
#include "rosgns/sgns.hpp"

namespace rosgns {

// Shifted positive PMI: max(log(#(w,c) |D| / (#(w) #(c))) - log k, 0) over
// observed pairs. Only strictly positive entries are stored.
struct SppmiMatrix {
  Eigen::SparseMatrix<double, Eigen::RowMajor> entries;
  int shift = 1;
};

SppmiMatrix sppmi(const CooccurrenceStats& stats, int k);

// Same layout as the stats pairs block, with real values:
//   rosgns-sppmi 1 / n / m / k / nnz / pairs / "<w> <c> <value>" lines.
void save_sppmi(const SppmiMatrix& matrix, std::ostream& out);

// Truncated rank-d SVD of the SPPMI matrix.
LowRankFactors svd_sppmi_factors(const CooccurrenceStats& stats, int rank, int k);

// Gaussian factors W0, C0 drawn from `seed`, turned into a manifold point
// whose product has Frobenius norm `target_norm`.
LowRankFactors random_factors(std::size_t words, std::size_t contexts, int rank,
                              std::uint64_t seed, double target_norm);

struct EmbeddingPair {
  Matrix W;  // n x d word vectors
  Matrix C;  // m x d context vectors
};

struct SgdOptions {
  int epochs = 5;
  std::uint64_t seed = 1;
  double learning_rate = 0.025;
  int window = 5;
  // Starting point; drawn from sgd_initial_embeddings(seed) when empty.
  std::optional<EmbeddingPair> initial;
};

// Every entry uniform in [-0.5/d, 0.5/d], W first, then C.
EmbeddingPair sgd_initial_embeddings(std::size_t words, std::size_t contexts, int dimension,
                                     std::uint64_t seed);

// One stochastic step for a positive pair (word, context) and its sampled
// negatives. Ascends log sigmoid(<w,c>) + sum log sigmoid(-<w,c'>): the
// context rows are updated in turn, the word row once at the end.
void sgd_pair_update(EmbeddingPair& emb, Index word, Index context,
                     std::span<const Index> negatives, double learning_rate);

// Streams (w, c) pairs over the OOV-filtered corpus with window L, drawing
// config.negative_samples negatives per pair from P_D(c) = #(c)/|D|.
// Deterministic for a fixed seed.
EmbeddingPair sgd_sgns_train(std::span<const std::string> tokens, const Vocabulary& vocab,
                             const SgnsConfig& config, const SgdOptions& options);

}  // namespace rosgns
