#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "rosgns/errors.hpp"
#include "rosgns/evaluation.hpp"

using namespace rosgns;

namespace {

SimilarityDataset parse(const std::string& text) {
  std::istringstream in(text);
  return load_dataset(in, "test", "test.txt");
}

std::vector<double> random_list(std::mt19937_64& rng, std::size_t n, bool ties) {
  std::uniform_int_distribution<int> coarse(0, 5);
  std::normal_distribution<double> fine;
  std::vector<double> v(n);
  for (auto& x : v) x = ties ? coarse(rng) : fine(rng);
  return v;
}

// Four words on the unit circle at increasing angles from "w0".
EmbeddingSet fan() {
  DenseMatrix w(4, 2);
  for (int i = 0; i < 4; ++i) {
    const double angle = 0.3 * i;
    w(i, 0) = std::cos(angle);
    w(i, 1) = std::sin(angle);
  }
  return EmbeddingSet(TokenIndex({"w0", "w1", "w2", "w3"}), w);
}

}  // namespace

TEST(LoadDataset, SingleRow) {
  const auto ds = parse("cat dog 7.0\n");
  ASSERT_EQ(ds.pairs.size(), 1u);
  EXPECT_EQ(ds.pairs[0].first, "cat");
  EXPECT_EQ(ds.pairs[0].second, "dog");
  EXPECT_EQ(ds.pairs[0].score, 7.0);
}

TEST(LoadDataset, HeaderSkippedAndTokensLowercased) {
  const auto ds = parse("Word1,Word2,Score\nTiger,cat,7.35\nbook\tpaper\t7.46\n");
  ASSERT_EQ(ds.pairs.size(), 2u);
  EXPECT_EQ(ds.pairs[0].first, "tiger");
  EXPECT_EQ(ds.pairs[1].second, "paper");
}

TEST(LoadDataset, CommentsAndDuplicates) {
  const auto ds = parse("# comment\na b 1\nb a 2\nc d 3\n");
  EXPECT_EQ(ds.pairs.size(), 2u);
  EXPECT_EQ(ds.duplicates_dropped, 1u);
}

TEST(LoadDataset, ErrorsCarryLineNumbers) {
  try {
    parse("a b 1\nc d\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  try {
    parse("a b 1\nc d seven\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("Word1 Word2 Score\n"), ParseError);
  EXPECT_THROW(load_dataset("/nonexistent/ws.txt", "ws"), IoError);
}

TEST(Spearman, Extremes) {
  const std::vector<double> up{1, 2, 3}, down{3, 2, 1};
  EXPECT_EQ(spearman(up, up), 1.0);
  EXPECT_EQ(spearman(up, down), -1.0);
}

TEST(Spearman, UndefinedCases) {
  const std::vector<double> one{1}, flat{2, 2, 2}, up{1, 2, 3};
  EXPECT_THROW(spearman(one, one), UndefinedCorrelation);
  EXPECT_THROW(spearman(flat, up), UndefinedCorrelation);
  EXPECT_THROW(spearman(up, std::vector<double>{1, 2}), ContractViolation);
}

TEST(Spearman, AverageRanksForTies) {
  const std::vector<double> v{10, 20, 10, 30, 20, 10};
  EXPECT_EQ(average_ranks(v), (std::vector<double>{2, 4.5, 2, 6, 4.5, 2}));
}

TEST(Spearman, MatchesRankPearsonOracle) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const bool ties = trial % 2 == 0;
    const auto x = random_list(rng, 20, ties);
    const auto y = random_list(rng, 20, ties);
    EXPECT_NEAR(spearman(x, y), oracle::spearman(x, y), 1e-12);
  }
}

TEST(Spearman, InvariantUnderIncreasingTransform) {
  std::mt19937_64 rng(2);
  const auto x = random_list(rng, 30, true);
  const auto y = random_list(rng, 30, false);
  std::vector<double> tx(x.size());
  std::transform(x.begin(), x.end(), tx.begin(), [](double v) { return std::exp(v) * 3.0 + 1.0; });
  EXPECT_EQ(spearman(tx, y), spearman(x, y));
}

TEST(Evaluate, PerfectOrdering) {
  SimilarityDataset ds;
  ds.name = "fan";
  ds.pairs = {{"w0", "w1", 9.0}, {"w0", "w2", 5.0}, {"w0", "w3", 1.0}};
  const EvalReport r = evaluate(fan(), ds);
  EXPECT_EQ(r.spearman, 1.0);
  EXPECT_EQ(r.pairs_used, 3u);
  EXPECT_EQ(r.pairs_total, 3u);
}

TEST(Evaluate, OutOfVocabularyPairsSkipped) {
  SimilarityDataset ds;
  ds.name = "fan";
  ds.pairs = {{"w0", "w1", 9.0}, {"w0", "zz", 7.0}, {"w0", "w2", 5.0}, {"w0", "w3", 1.0}};
  const EvalReport r = evaluate(fan(), ds);
  EXPECT_EQ(r.pairs_used, 3u);
  EXPECT_EQ(r.pairs_total, 4u);
}

TEST(Evaluate, AllOutOfVocabularyIsUndefined) {
  SimilarityDataset ds;
  ds.name = "nothing";
  ds.pairs = {{"x", "y", 1.0}, {"p", "q", 2.0}};
  try {
    evaluate(fan(), ds);
    FAIL();
  } catch (const UndefinedCorrelation& e) {
    EXPECT_EQ(e.pairs_used(), 0u);
    EXPECT_EQ(e.pairs_total(), 2u);
  }
}

TEST(Evaluate, InvariantToRowOrderAndScaling) {
  std::mt19937_64 rng(3);
  std::vector<std::string> tokens;
  for (int i = 0; i < 15; ++i) tokens.push_back("t" + std::to_string(i));
  const DenseMatrix w = oracle::random_matrix(rng, 15, 4);
  const EmbeddingSet set(TokenIndex(tokens), w);
  const EmbeddingSet scaled(TokenIndex(tokens), 3.5 * w);

  SimilarityDataset ds;
  ds.name = "random";
  std::uniform_int_distribution<int> pick(0, 14);
  std::uniform_real_distribution<double> score(0.0, 10.0);
  for (int i = 0; i < 40; ++i) ds.pairs.push_back({tokens[pick(rng)], tokens[pick(rng)], score(rng)});
  SimilarityDataset shuffled = ds;
  std::shuffle(shuffled.pairs.begin(), shuffled.pairs.end(), rng);

  const double base = evaluate(set, ds).spearman;
  EXPECT_NEAR(evaluate(set, shuffled).spearman, base, 1e-14);
  EXPECT_EQ(evaluate(scaled, ds).spearman, base);
}
