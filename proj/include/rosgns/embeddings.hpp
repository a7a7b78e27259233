#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rosgns/corpus.hpp"
#include "rosgns/manifold.hpp"

namespace rosgns {

// How the singular values are split between word and context vectors when
// X = U' Sigma V'^T is turned into W C^T.
enum class Scaling {
  SqrtSigma,  // W = U' sqrt(Sigma), C = V' sqrt(Sigma); default
  Sigma,      // W = U' Sigma, C = V'; W W^T = X X^T
  None,       // W = U', C = V' Sigma
};

std::string_view to_string(Scaling scaling);
Scaling parse_scaling(std::string_view text);

struct Provenance {
  std::string method;  // ro-sgns | svd-sppmi | sgd-sgns | ...
  std::string config;  // free-form single-line config snapshot
};

// Word vectors bound to a token index. Immutable after construction.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  // Throws ContractViolation on a row count mismatch or non-finite entries.
  EmbeddingSet(TokenIndex tokens, DenseMatrix vectors, Provenance provenance = {});

  std::size_t size() const { return tokens_.size(); }
  Eigen::Index dimension() const { return vectors_.cols(); }
  const TokenIndex& tokens() const { return tokens_; }
  const DenseMatrix& vectors() const { return vectors_; }
  const Provenance& provenance() const { return provenance_; }
  std::span<const double> vector(Index i) const;

 private:
  TokenIndex tokens_;
  DenseMatrix vectors_;
  Provenance provenance_;
};

struct ExtractedEmbeddings {
  Matrix W;
  Matrix C;
  Vector singular_values;  // descending
};

// SVD of X = U S V^T through the d x d core S. Column signs are fixed so that
// the largest-magnitude entry of each left singular vector is non-negative.
// Zero singular values give zero embedding columns.
ExtractedEmbeddings extract_embeddings(const LowRankFactors& factors,
                                       Scaling scaling = Scaling::SqrtSigma);

// Cosine of the angle between a and b; 0 when either has zero norm.
double cosine_similarity(std::span<const double> a, std::span<const double> b);
double cosine_similarity(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b);

struct Neighbor {
  std::string token;
  double cosine;
};

// All other words by descending cosine to the query (ties by index), sliced
// to [offset, offset + count). Throws NotFound for an OOV query, with the
// closest spellings in the message.
std::vector<Neighbor> nearest_neighbors(const EmbeddingSet& set, std::string_view query,
                                        std::size_t count, std::size_t offset = 0);

// Up to `limit` vocabulary tokens closest to `query` by edit distance.
std::vector<std::string> closest_spellings(const TokenIndex& tokens, std::string_view query,
                                           std::size_t limit = 5);

// Text format: "n d" on the first line, an optional "#"-prefixed comment line
// carrying the provenance, then "token v1 ... vd" per word in index order.
void save_embeddings(const EmbeddingSet& set, std::ostream& out);
void save_embeddings(const EmbeddingSet& set, const std::string& path);
EmbeddingSet load_embeddings(std::istream& in, const std::string& source);
EmbeddingSet load_embeddings(const std::string& path);

}  // namespace rosgns
