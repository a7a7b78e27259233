#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "rosgns/baselines.hpp"
#include "rosgns/errors.hpp"

using namespace rosgns;

namespace {

// 2x2 table with #(0,0)=pair, #(0)=#(0)=8 on both sides and |D|=16.
CooccurrenceStats spot_stats(Count pair) {
  const Count rest = 8 - pair;
  std::vector<PairCount> cells{{0, 0, pair}};
  if (rest > 0) {
    cells.push_back({0, 1, rest});
    cells.push_back({1, 0, rest});
  }
  cells.push_back({1, 1, 8 - rest});
  return CooccurrenceStats(2, 2, 1, cells);
}

double entry(const SppmiMatrix& m, Index w, Index c) { return m.entries.coeff(w, c); }

std::string corpus_text() {
  std::mt19937_64 rng(99);
  std::discrete_distribution<int> pick({30, 20, 15, 10, 8, 6, 5, 3, 2, 1});
  std::string text;
  for (int i = 0; i < 4000; ++i) text += "w" + std::to_string(pick(rng)) + " ";
  return text;
}

}  // namespace

TEST(Sppmi, LogOneIsZero) {
  const auto stats = spot_stats(4);
  ASSERT_EQ(stats.word_marginal(0), 8);
  ASSERT_EQ(stats.context_marginal(0), 8);
  ASSERT_EQ(stats.total(), 16);
  EXPECT_EQ(entry(sppmi(stats, 1), 0, 0), 0.0);
}

TEST(Sppmi, ShiftClampsAtZero) { EXPECT_EQ(entry(sppmi(spot_stats(4), 2), 0, 0), 0.0); }

TEST(Sppmi, LogTwoCase) {
  const auto stats = spot_stats(8);
  ASSERT_EQ(stats.word_marginal(0), 8);
  ASSERT_EQ(stats.total(), 16);
  EXPECT_NEAR(entry(sppmi(stats, 1), 0, 0), std::log(2.0), 1e-12);
}

TEST(Sppmi, SparsityAndMonotoneShift) {
  std::mt19937_64 rng(1);
  const auto stats = oracle::random_stats(rng, 12, 10, 40, 0.4);
  const SppmiMatrix k1 = sppmi(stats, 1);
  EXPECT_LE(static_cast<std::size_t>(k1.entries.nonZeros()), stats.nonzeros());
  const DenseMatrix d1 = k1.entries.toDense();
  const DenseMatrix d5 = sppmi(stats, 5).entries.toDense();
  for (Index w = 0; w < 12; ++w) {
    for (Index c = 0; c < 10; ++c) {
      EXPECT_LE(d5(w, c), d1(w, c));
      if (d1(w, c) > 0.0) EXPECT_GT(stats.count(w, c), 0);
    }
  }
}

TEST(Sppmi, MatchesDirectFormula) {
  std::mt19937_64 rng(2);
  const auto stats = oracle::random_stats(rng, 6, 7, 30, 0.7);
  const DenseMatrix got = sppmi(stats, 3).entries.toDense();
  for (Index w = 0; w < 6; ++w) {
    for (Index c = 0; c < 7; ++c) {
      const double a = static_cast<double>(stats.count(w, c));
      double expected = 0.0;
      if (a > 0) {
        const double pmi = std::log(a * static_cast<double>(stats.total()) /
                                    (static_cast<double>(stats.word_marginal(w)) *
                                     static_cast<double>(stats.context_marginal(c))));
        expected = std::max(pmi - std::log(3.0), 0.0);
      }
      EXPECT_NEAR(got(w, c), expected, 1e-13);
    }
  }
}

TEST(Sppmi, EmptyCorpusIsDegenerate) {
  EXPECT_THROW(sppmi(CooccurrenceStats(2, 2, 1, {}), 1), DegenerateCorpus);
}

TEST(Sppmi, DumpLayout) {
  std::ostringstream out;
  save_sppmi(sppmi(spot_stats(8), 1), out);
  EXPECT_EQ(out.str().rfind("rosgns-sppmi 1\nn 2\nm 2\nk 1\nnnz ", 0), 0u);
  EXPECT_NE(out.str().find("pairs\n0 0 "), std::string::npos);
}

TEST(SvdSppmi, LowRankMatrixIsReproduced) {
  // Block structure gives an SPPMI matrix of rank 2.
  const CooccurrenceStats stats(4, 4, 1,
                                {{0, 0, 5}, {0, 1, 5}, {1, 0, 5}, {1, 1, 5},
                                 {2, 2, 3}, {2, 3, 3}, {3, 2, 3}, {3, 3, 3}});
  const DenseMatrix target = sppmi(stats, 1).entries.toDense();
  EXPECT_LT((svd_sppmi_factors(stats, 2, 1).product() - target).norm(), 1e-9);
}

TEST(SvdSppmi, BeatsRandomCandidates) {
  const auto tokens = tokenize(corpus_text());
  const Vocabulary vocab = build_vocabulary(tokens, 1);
  const auto stats = count_cooccurrences(tokens, vocab, 5);
  const DenseMatrix target = sppmi(stats, 1).entries.toDense();
  const double best = (target - svd_sppmi_factors(stats, 4, 1).product()).norm();
  std::mt19937_64 rng(3);
  const auto n = static_cast<Eigen::Index>(vocab.size());
  for (int i = 0; i < 50; ++i) {
    const Matrix b = oracle::random_matrix(rng, n, 4) * oracle::random_matrix(rng, n, 4).transpose();
    EXPECT_LT(best, (Matrix(target) - b).norm());
  }
}

TEST(SvdSppmi, PermutationEquivariant) {
  std::mt19937_64 rng(4);
  const auto stats = oracle::random_stats(rng, 8, 8, 30, 0.6);
  std::vector<Index> perm{3, 0, 7, 1, 6, 2, 5, 4};
  std::vector<PairCount> moved;
  for (const auto& p : stats.triples()) moved.push_back({perm[p.word], perm[p.context], p.count});
  const CooccurrenceStats permuted(8, 8, 1, moved);
  const DenseMatrix a = svd_sppmi_factors(stats, 3, 1).product();
  const DenseMatrix b = svd_sppmi_factors(permuted, 3, 1).product();
  for (Index w = 0; w < 8; ++w) {
    for (Index c = 0; c < 8; ++c) EXPECT_NEAR(b(perm[w], perm[c]), a(w, c), 1e-10);
  }
}

TEST(RandomFactors, ScaledToTargetNorm) {
  const LowRankFactors p = random_factors(9, 7, 3, 42, 5.0);
  EXPECT_NEAR(p.product().norm(), 5.0, 1e-12);
  EXPECT_LT(orthonormality_error(p), 1e-12);
  EXPECT_EQ(random_factors(9, 7, 3, 42, 5.0).product(), p.product());
}

TEST(Sgd, InitialisationRange) {
  const EmbeddingPair e = sgd_initial_embeddings(20, 15, 10, 7);
  EXPECT_EQ(e.W.rows(), 20);
  EXPECT_EQ(e.C.rows(), 15);
  EXPECT_LE(e.W.cwiseAbs().maxCoeff(), 0.05);
  EXPECT_LE(e.C.cwiseAbs().maxCoeff(), 0.05);
  EXPECT_GT(e.W.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Sgd, ZeroEpochsReturnsInitialisation) {
  const auto tokens = tokenize(corpus_text());
  const Vocabulary vocab = build_vocabulary(tokens, 1);
  SgnsConfig config;
  config.dimension = 4;
  SgdOptions options;
  options.epochs = 0;
  options.seed = 9;
  const EmbeddingPair init = sgd_initial_embeddings(vocab.size(), vocab.size(), 4, 9);
  const EmbeddingPair out = sgd_sgns_train(tokens, vocab, config, options);
  EXPECT_EQ(out.W, init.W);
  EXPECT_EQ(out.C, init.C);
}

TEST(Sgd, SingleUpdateMatchesHandComputation) {
  EmbeddingPair e;
  e.W.resize(2, 2);
  e.C.resize(2, 2);
  e.W << 0.1, 0.2, 0.3, -0.1;
  e.C << 0.05, -0.2, 0.4, 0.1;
  const double lr = 0.5;
  const Vector w = e.W.row(0).transpose();
  const Vector c_pos = e.C.row(1).transpose();
  const Vector c_neg = e.C.row(0).transpose();

  // Positive pair (0, 1), negative context 0.
  const double g_pos = lr * (1.0 - 1.0 / (1.0 + std::exp(-w.dot(c_pos))));
  const Vector c_pos_new = c_pos + g_pos * w;
  const double g_neg = lr * (0.0 - 1.0 / (1.0 + std::exp(-w.dot(c_neg))));
  const Vector c_neg_new = c_neg + g_neg * w;
  const Vector w_new = w + g_pos * c_pos + g_neg * c_neg;

  const std::vector<Index> negatives{0};
  sgd_pair_update(e, 0, 1, negatives, lr);
  EXPECT_NEAR((e.W.row(0).transpose() - w_new).norm(), 0.0, 1e-15);
  EXPECT_NEAR((e.C.row(1).transpose() - c_pos_new).norm(), 0.0, 1e-15);
  EXPECT_NEAR((e.C.row(0).transpose() - c_neg_new).norm(), 0.0, 1e-15);
  EXPECT_EQ(e.W(1, 0), 0.3);
}

TEST(Sgd, DeterministicAndImprovesObjective) {
  const auto tokens = tokenize(corpus_text());
  const Vocabulary vocab = build_vocabulary(tokens, 1);
  const auto stats = count_cooccurrences(tokens, vocab, 2);
  SgnsConfig config;
  config.dimension = 5;
  config.negative_samples = 3;
  SgdOptions options;
  options.epochs = 2;
  options.window = 2;
  options.seed = 17;
  const EmbeddingPair a = sgd_sgns_train(tokens, vocab, config, options);
  const EmbeddingPair b = sgd_sgns_train(tokens, vocab, config, options);
  EXPECT_EQ(a.W, b.W);
  EXPECT_EQ(a.C, b.C);

  const EmbeddingPair init = sgd_initial_embeddings(vocab.size(), vocab.size(), 5, 17);
  const double before = objective(init.W * init.C.transpose(), stats, 3);
  const double after = objective(a.W * a.C.transpose(), stats, 3);
  EXPECT_GT(after, before);
}

TEST(Sgd, RejectsEmptyVocabulary) {
  const std::vector<std::string> tokens{"a"};
  EXPECT_THROW(sgd_sgns_train(tokens, Vocabulary{}, SgnsConfig{}, SgdOptions{}), ContractViolation);
}
