#include "rosgns/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "rosgns/errors.hpp"
#include "text_io.hpp"

namespace rosgns {

namespace {

std::string lowercase(std::string_view text) {
  std::string out(text);
  for (auto& ch : out) {
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  }
  return out;
}

}  // namespace

SimilarityDataset load_dataset(std::istream& in, const std::string& name,
                               const std::string& source) {
  detail::LineReader reader(in, source);
  SimilarityDataset dataset;
  dataset.name = name;
  std::set<std::pair<std::string, std::string>> seen;
  bool header_allowed = true;
  std::string line;
  while (reader.next(line)) {
    auto fields = detail::split_fields(line, " \t,");
    if (fields.empty() || fields[0].front() == '#') continue;
    double score = 0.0;
    const bool numeric = fields.size() >= 3 && detail::parse_number(fields[2], score);
    if (!numeric && header_allowed) {
      header_allowed = false;
      continue;
    }
    header_allowed = false;
    if (fields.size() < 3) reader.fail("expected 'word1 word2 score'");
    if (!numeric || !std::isfinite(score)) {
      reader.fail("malformed score '" + std::string(fields[2]) + "'");
    }
    std::string a = lowercase(fields[0]);
    std::string b = lowercase(fields[1]);
    if (!seen.emplace(std::min(a, b), std::max(a, b)).second) {
      ++dataset.duplicates_dropped;
      continue;
    }
    dataset.pairs.push_back({std::move(a), std::move(b), score});
  }
  if (dataset.pairs.empty()) {
    throw ParseError(source, reader.line_no(), "dataset contains no word pairs");
  }
  return dataset;
}

SimilarityDataset load_dataset(const std::string& path, const std::string& name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset file: " + path);
  return load_dataset(in, name, path);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share ranks i+1..j+1.
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw ContractViolation("spearman: lists differ in length");
  if (xs.size() < 2) throw UndefinedCorrelation("spearman needs at least 2 points");
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  const double n = static_cast<double>(rx.size());
  // Both rank vectors have mean (n + 1) / 2.
  const double mean = 0.5 * (n + 1.0);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedCorrelation("spearman: a list has constant ranks");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

EvalReport evaluate(const EmbeddingSet& set, const SimilarityDataset& dataset) {
  EvalReport report;
  report.dataset = dataset.name;
  report.pairs_total = dataset.pairs.size();
  std::vector<double> predicted;
  std::vector<double> human;
  for (const auto& pair : dataset.pairs) {
    const Index a = set.tokens().find(pair.first);
    const Index b = set.tokens().find(pair.second);
    if (a < 0 || b < 0) continue;
    predicted.push_back(cosine_similarity(set.vector(a), set.vector(b)));
    human.push_back(pair.score);
  }
  report.pairs_used = predicted.size();
  if (report.pairs_used < 2) {
    throw UndefinedCorrelation(dataset.name + ": only " + std::to_string(report.pairs_used) +
                                   " of " + std::to_string(report.pairs_total) +
                                   " pairs are in the vocabulary",
                               report.pairs_used, report.pairs_total);
  }
  try {
    report.spearman = spearman(predicted, human);
  } catch (const UndefinedCorrelation& e) {
    throw UndefinedCorrelation(dataset.name + ": " + e.what(), report.pairs_used,
                               report.pairs_total);
  }
  return report;
}

}  // namespace rosgns
