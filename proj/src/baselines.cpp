#include "rosgns/baselines.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <vector>

#include "rosgns/errors.hpp"
#include "text_io.hpp"

namespace rosgns {

SppmiMatrix sppmi(const CooccurrenceStats& stats, int k) {
  if (k < 1) throw ContractViolation("SPPMI shift k must be >= 1");
  if (stats.total() == 0) throw DegenerateCorpus("corpus has no word-context pairs (|D| = 0)");

  const double total = static_cast<double>(stats.total());
  const double log_shift = std::log(static_cast<double>(k));
  std::vector<Eigen::Triplet<double>> entries;
  for (std::size_t w = 0; w < stats.words(); ++w) {
    const auto wi = static_cast<Index>(w);
    const double word_count = static_cast<double>(stats.word_marginal(wi));
    auto cols = stats.row_contexts(wi);
    auto counts = stats.row_counts(wi);
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const double ratio = static_cast<double>(counts[j]) * total /
                           (word_count * static_cast<double>(stats.context_marginal(cols[j])));
      const double value = std::log(ratio) - log_shift;
      if (value > 0.0) entries.emplace_back(wi, cols[j], value);
    }
  }

  SppmiMatrix out;
  out.shift = k;
  out.entries.resize(static_cast<Eigen::Index>(stats.words()),
                     static_cast<Eigen::Index>(stats.contexts()));
  out.entries.setFromTriplets(entries.begin(), entries.end());
  out.entries.makeCompressed();
  return out;
}

void save_sppmi(const SppmiMatrix& matrix, std::ostream& out) {
  out << "rosgns-sppmi 1\n"
      << "n " << matrix.entries.rows() << '\n'
      << "m " << matrix.entries.cols() << '\n'
      << "k " << matrix.shift << '\n'
      << "nnz " << matrix.entries.nonZeros() << '\n'
      << "pairs\n";
  for (Eigen::Index w = 0; w < matrix.entries.outerSize(); ++w) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(matrix.entries, w); it;
         ++it) {
      out << it.row() << ' ' << it.col() << ' ' << detail::format_exact(it.value()) << '\n';
    }
  }
  if (!out) throw IoError("write error while saving SPPMI matrix");
}

LowRankFactors svd_sppmi_factors(const CooccurrenceStats& stats, int rank, int k) {
  const SppmiMatrix matrix = sppmi(stats, k);
  const DenseMatrix dense = matrix.entries.toDense();
  return retract_svd(dense, rank);
}

LowRankFactors random_factors(std::size_t words, std::size_t contexts, int rank,
                              std::uint64_t seed, double target_norm) {
  if (rank < 1) throw ContractViolation("rank must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix w0(static_cast<Eigen::Index>(words), rank);
  Matrix c0(static_cast<Eigen::Index>(contexts), rank);
  for (Eigen::Index r = 0; r < w0.rows(); ++r) {
    for (Eigen::Index c = 0; c < rank; ++c) w0(r, c) = normal(rng);
  }
  for (Eigen::Index r = 0; r < c0.rows(); ++r) {
    for (Eigen::Index c = 0; c < rank; ++c) c0(r, c) = normal(rng);
  }
  LowRankFactors point = from_product(w0, c0);
  // ||U S V^T||_F = ||S||_F for orthonormal U, V.
  const double norm = point.S.norm();
  if (norm > 0.0) point.S *= target_norm / norm;
  return point;
}

EmbeddingPair sgd_initial_embeddings(std::size_t words, std::size_t contexts, int dimension,
                                     std::uint64_t seed) {
  if (dimension < 1) throw ContractViolation("dimension must be >= 1");
  std::mt19937_64 rng(seed);
  const double half_width = 0.5 / dimension;
  std::uniform_real_distribution<double> uniform(-half_width, half_width);
  EmbeddingPair emb;
  emb.W.resize(static_cast<Eigen::Index>(words), dimension);
  emb.C.resize(static_cast<Eigen::Index>(contexts), dimension);
  for (Eigen::Index r = 0; r < emb.W.rows(); ++r) {
    for (Eigen::Index c = 0; c < dimension; ++c) emb.W(r, c) = uniform(rng);
  }
  for (Eigen::Index r = 0; r < emb.C.rows(); ++r) {
    for (Eigen::Index c = 0; c < dimension; ++c) emb.C(r, c) = uniform(rng);
  }
  return emb;
}

void sgd_pair_update(EmbeddingPair& emb, Index word, Index context,
                     std::span<const Index> negatives, double learning_rate) {
  const Vector word_vec = emb.W.row(word).transpose();
  Vector word_step = Vector::Zero(emb.W.cols());

  auto apply = [&](Index target, double label) {
    const double score = word_vec.dot(emb.C.row(target));
    const double g = learning_rate * (label - sigmoid(score));
    word_step += g * emb.C.row(target).transpose();
    emb.C.row(target) += g * word_vec.transpose();
  };
  apply(context, 1.0);
  for (Index negative : negatives) apply(negative, 0.0);
  emb.W.row(word) += word_step.transpose();
}

EmbeddingPair sgd_sgns_train(std::span<const std::string> tokens, const Vocabulary& vocab,
                             const SgnsConfig& config, const SgdOptions& options) {
  if (vocab.empty()) throw ContractViolation("vocabulary is empty");
  config.validate();
  if (options.window < 1) throw ContractViolation("window must be >= 1");
  if (options.epochs < 0) throw ContractViolation("epochs must be >= 0");
  if (!(options.learning_rate > 0.0)) throw ContractViolation("learning rate must be positive");

  const std::size_t n = vocab.size();
  const int d = config.dimension;
  EmbeddingPair emb = options.initial ? *options.initial
                                      : sgd_initial_embeddings(n, n, d, options.seed);
  if (static_cast<std::size_t>(emb.W.rows()) != n || static_cast<std::size_t>(emb.C.rows()) != n ||
      emb.W.cols() != d || emb.C.cols() != d) {
    throw ContractViolation("initial embeddings do not match vocabulary size and dimension");
  }
  if (options.epochs == 0) return emb;

  const std::vector<Index> seq = to_indices(tokens, vocab.index());
  const auto len = static_cast<std::ptrdiff_t>(seq.size());
  const std::ptrdiff_t window = options.window;

  // #(c): how many positions see position j as a context.
  std::vector<double> context_marginal(n, 0.0);
  for (std::ptrdiff_t j = 0; j < len; ++j) {
    const auto seen = std::min(j, window) + std::min(len - 1 - j, window);
    context_marginal[static_cast<std::size_t>(seq[static_cast<std::size_t>(j)])] +=
        static_cast<double>(seen);
  }
  bool any_pairs = false;
  for (double v : context_marginal) any_pairs = any_pairs || v > 0.0;
  if (!any_pairs) return emb;

  std::mt19937_64 rng(options.seed ^ 0x9e3779b97f4a7c15ULL);
  std::discrete_distribution<Index> negative_dist(context_marginal.begin(), context_marginal.end());
  std::vector<Index> negatives(static_cast<std::size_t>(config.negative_samples));

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    for (std::ptrdiff_t i = 0; i < len; ++i) {
      const Index w = seq[static_cast<std::size_t>(i)];
      const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - window);
      const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(len - 1, i + window);
      for (std::ptrdiff_t j = lo; j <= hi; ++j) {
        if (j == i) continue;
        for (auto& neg : negatives) neg = negative_dist(rng);
        sgd_pair_update(emb, w, seq[static_cast<std::size_t>(j)], negatives,
                        options.learning_rate);
      }
    }
  }
  return emb;
}

}  // namespace rosgns
