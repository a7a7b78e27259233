#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "rosgns/corpus.hpp"
#include "rosgns/errors.hpp"

using namespace rosgns;
using Tokens = std::vector<std::string>;

TEST(Tokenize, LowercasesAndStripsPunctuation) {
  EXPECT_EQ(tokenize("The cat, the cat."), (Tokens{"the", "cat", "the", "cat"}));
}

TEST(Tokenize, EmptyInput) { EXPECT_TRUE(tokenize("").empty()); }

TEST(Tokenize, DigitsStayAndHyphensSplit) {
  EXPECT_EQ(tokenize("a1 b-2"), (Tokens{"a1", "b", "2"}));
}

TEST(Tokenize, NonAsciiBytesAreSeparators) {
  EXPECT_EQ(tokenize("caf\xC3\xA9 na\xEFve \xFF\xFEx"), (Tokens{"caf", "na", "ve", "x"}));
}

TEST(Tokenize, StreamMatchesStringAcrossChunkBoundaries) {
  std::string text;
  for (int i = 0; i < 30000; ++i) text += (i % 7 == 0 ? "Word, " : "tok" + std::to_string(i % 13) + " ");
  std::istringstream in(text);
  EXPECT_EQ(tokenize(in, "<mem>"), tokenize(text));
}

TEST(Tokenize, MissingFileNamesThePath) {
  try {
    tokenize_file("/nonexistent/corpus.txt");
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/corpus.txt"), std::string::npos);
  }
}

TEST(Vocabulary, StrictThreshold) {
  const Tokens tokens{"a", "a", "a", "b"};
  const Vocabulary v = build_vocabulary(tokens, 2);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v.token(0), "a");
  EXPECT_EQ(v.count(0), 3);
  EXPECT_EQ(v.min_count(), 2);
}

TEST(Vocabulary, OrderIsCountDescendingThenLexicographic) {
  const Tokens tokens{"b", "a", "c", "c", "b", "a", "d", "d", "d"};
  const Vocabulary v = build_vocabulary(tokens, 1);
  ASSERT_EQ(v.size(), 4u);
  EXPECT_EQ(v.token(0), "d");
  EXPECT_EQ(v.token(1), "a");
  EXPECT_EQ(v.token(2), "b");
  EXPECT_EQ(v.token(3), "c");
}

TEST(Vocabulary, RejectsZeroMinCount) {
  EXPECT_THROW(build_vocabulary(Tokens{"a"}, 0), ContractViolation);
}

TEST(Vocabulary, MatchesBruteForceCounter) {
  std::mt19937_64 rng(11);
  std::geometric_distribution<int> pick(0.08);
  Tokens tokens;
  for (int i = 0; i < 1000; ++i) tokens.push_back("w" + std::to_string(pick(rng)));
  const Count min_count = 3;
  const Vocabulary v = build_vocabulary(tokens, min_count);
  const auto freq = oracle::frequencies(tokens);

  std::size_t expected = 0;
  for (const auto& [tok, count] : freq) {
    const Index i = v.find(tok);
    if (count > min_count) {
      ++expected;
      ASSERT_GE(i, 0) << tok;
      EXPECT_EQ(v.count(i), count);
    } else {
      EXPECT_EQ(i, -1) << tok;
    }
  }
  EXPECT_EQ(v.size(), expected);
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_EQ(v.find(v.token(static_cast<Index>(i))), static_cast<Index>(i));
  }
}

TEST(Vocabulary, ConstructorValidatesInvariants) {
  EXPECT_THROW(Vocabulary({"a", "b"}, {3, 5}, 1), ContractViolation);
  EXPECT_THROW(Vocabulary({"a"}, {1}, 1), ContractViolation);
  EXPECT_THROW(Vocabulary({"a", "a"}, {3, 3}, 1), ContractViolation);
}

TEST(Cooccurrence, SingleAdjacentPair) {
  const Tokens tokens{"a", "b"};
  const Vocabulary vocab({"a", "b"}, {1, 1}, 0);
  const auto stats = count_cooccurrences(tokens, vocab, 1);
  EXPECT_EQ(stats.count(vocab.find("a"), vocab.find("b")), 1);
  EXPECT_EQ(stats.count(vocab.find("b"), vocab.find("a")), 1);
  EXPECT_EQ(stats.total(), 2);
  EXPECT_EQ(stats.nonzeros(), 2u);
}

TEST(Cooccurrence, SingleTokenHasNoPairs) {
  const Tokens tokens{"a"};
  const Vocabulary vocab({"a"}, {1}, 0);
  for (int window : {1, 3, 10}) {
    const auto stats = count_cooccurrences(tokens, vocab, window);
    EXPECT_EQ(stats.total(), 0);
    EXPECT_EQ(stats.nonzeros(), 0u);
    EXPECT_EQ(stats.word_marginal(0), 0);
  }
}

TEST(Cooccurrence, RejectsNonPositiveWindow) {
  const Vocabulary vocab({"a"}, {1}, 0);
  EXPECT_THROW(count_cooccurrences(Tokens{"a"}, vocab, 0), ContractViolation);
}

TEST(Cooccurrence, MatchesNestedLoopOracle) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<Index> symbol(0, 4);
  std::vector<Index> seq(200);
  for (auto& s : seq) s = symbol(rng);
  const auto stats = count_cooccurrences(seq, 5, 5);
  const auto table = oracle::cooccurrence_table(seq, 5, 5);
  Count total = 0;
  for (Index w = 0; w < 5; ++w) {
    for (Index c = 0; c < 5; ++c) {
      EXPECT_EQ(stats.count(w, c), table[w][c]) << w << "," << c;
      total += table[w][c];
    }
  }
  EXPECT_EQ(stats.total(), total);
}

TEST(Cooccurrence, OutOfVocabularyTokensRemovedBeforeWindowing) {
  const Tokens tokens{"a", "zz", "b"};
  const Vocabulary vocab({"a", "b"}, {1, 1}, 0);
  const auto stats = count_cooccurrences(tokens, vocab, 1);
  EXPECT_EQ(stats.count(vocab.find("a"), vocab.find("b")), 1);
  EXPECT_EQ(stats.total(), 2);
}

TEST(Cooccurrence, MarginalsAreConsistent) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    std::uniform_int_distribution<Index> symbol(0, 9);
    std::vector<Index> seq(300);
    for (auto& s : seq) s = symbol(rng);
    const int window = 1 + trial % 4;
    const auto stats = count_cooccurrences(seq, 10, window);
    std::vector<Count> word(10, 0), context(10, 0);
    Count total = 0;
    for (const auto& p : stats.triples()) {
      ASSERT_GT(p.count, 0);
      word[p.word] += p.count;
      context[p.context] += p.count;
      total += p.count;
    }
    EXPECT_EQ(word, stats.word_marginals());
    EXPECT_EQ(context, stats.context_marginals());
    EXPECT_EQ(total, stats.total());
  }
}

TEST(Cooccurrence, PalindromeGivesSymmetricCounts) {
  const std::vector<Index> seq{0, 1, 2, 3, 2, 1, 0, 1, 2, 3, 2, 1, 0};
  const auto stats = count_cooccurrences(seq, 4, 3);
  for (Index w = 0; w < 4; ++w) {
    for (Index c = 0; c < 4; ++c) EXPECT_EQ(stats.count(w, c), stats.count(c, w));
  }
}

TEST(Cooccurrence, ConstructorSumsDuplicatesAndDropsZeros) {
  const CooccurrenceStats stats(2, 2, 1, {{0, 1, 2}, {0, 1, 3}, {1, 0, 0}});
  EXPECT_EQ(stats.count(0, 1), 5);
  EXPECT_EQ(stats.nonzeros(), 1u);
  EXPECT_EQ(stats.total(), 5);
  EXPECT_THROW(CooccurrenceStats(2, 2, 1, {{0, 2, 1}}), ContractViolation);
  EXPECT_THROW(CooccurrenceStats(2, 2, 1, {{0, 1, -1}}), ContractViolation);
}

TEST(Cooccurrence, Deterministic) {
  const Tokens tokens = tokenize("the quick brown fox jumps over the lazy dog the fox");
  const Vocabulary vocab = build_vocabulary(tokens, 1);
  EXPECT_EQ(count_cooccurrences(tokens, vocab, 2), count_cooccurrences(tokens, vocab, 2));
}

TEST(StatsFile, RoundTripIsExact) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> symbol(0, 30);
  Tokens tokens;
  for (int i = 0; i < 2000; ++i) tokens.push_back("t" + std::to_string(symbol(rng) * symbol(rng) % 31));
  CorpusStats stats;
  stats.vocab = build_vocabulary(tokens, 4);
  stats.cooc = count_cooccurrences(tokens, stats.vocab, 3);

  std::stringstream buffer;
  save_stats(stats, buffer);
  const CorpusStats back = load_stats(buffer, "<mem>");
  EXPECT_EQ(back.vocab, stats.vocab);
  EXPECT_EQ(back.cooc, stats.cooc);
}

TEST(StatsFile, RejectsCorruptInput) {
  CorpusStats stats;
  stats.vocab = Vocabulary({"a", "b"}, {3, 2}, 1);
  stats.cooc = CooccurrenceStats(2, 2, 1, {{0, 1, 1}, {1, 0, 1}});
  std::stringstream buffer;
  save_stats(stats, buffer);
  const std::string good = buffer.str();

  auto load = [](const std::string& text) {
    std::istringstream in(text);
    return load_stats(in, "bad.stats");
  };
  EXPECT_THROW(load("not a stats file\n"), ParseError);
  EXPECT_THROW(load(good.substr(0, good.size() - 6)), ParseError);
  EXPECT_THROW(load(good + "0 0 1\n"), ParseError);
  std::string wrong_total = good;
  wrong_total.replace(wrong_total.find("total 2"), 7, "total 3");
  EXPECT_THROW(load(wrong_total), ParseError);
}

TEST(StatsFile, MissingFileNamesThePath) {
  try {
    load_stats("/nonexistent/x.stats");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/x.stats"), std::string::npos);
  }
}
