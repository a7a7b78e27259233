#include "rosgns/sgns.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "rosgns/errors.hpp"

namespace rosgns {

std::string_view to_string(InitMode mode) {
  switch (mode) {
    case InitMode::SvdSppmi:
      return "svd-sppmi";
    case InitMode::RandomFactors:
      return "random";
    case InitMode::ProvidedFactors:
      return "provided";
  }
  return "unknown";
}

InitMode parse_init_mode(std::string_view text) {
  if (text == "svd-sppmi") return InitMode::SvdSppmi;
  if (text == "random") return InitMode::RandomFactors;
  if (text == "provided") return InitMode::ProvidedFactors;
  throw ContractViolation("unknown init mode '" + std::string(text) + "'");
}

void SgnsConfig::validate() const {
  if (dimension < 1) throw ContractViolation("dimension must be >= 1");
  if (negative_samples < 1) throw ContractViolation("negative_samples must be >= 1");
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    throw ContractViolation("step size must be a positive finite number");
  }
  if (iterations < 0) throw ContractViolation("iterations must be >= 0");
}

void SgnsConfig::validate_for(std::size_t words, std::size_t contexts) const {
  validate();
  if (static_cast<std::size_t>(dimension) > std::min(words, contexts)) {
    throw ContractViolation("dimension " + std::to_string(dimension) + " exceeds min(n, m) = " +
                            std::to_string(std::min(words, contexts)));
  }
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_sigmoid(double x) {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

double pair_loss(double a, double b, double x) {
  double value = 0.0;
  if (a != 0.0) value += a * log_sigmoid(x);
  if (b != 0.0) value += b * log_sigmoid(-x);
  return value;
}

double negative_weight(const CooccurrenceStats& stats, int k, Index w, Index c) {
  if (stats.total() == 0) return 0.0;
  // Same evaluation order as objective() and gradient().
  const double row_scale = static_cast<double>(k) / static_cast<double>(stats.total()) *
                           static_cast<double>(stats.word_marginal(w));
  return row_scale * static_cast<double>(stats.context_marginal(c));
}

namespace {

struct NeumaierSum {
  double sum = 0.0;
  double compensation = 0.0;

  void add(double value) {
    const double t = sum + value;
    if (std::abs(sum) >= std::abs(value)) {
      compensation += (sum - t) + value;
    } else {
      compensation += (value - t) + sum;
    }
    sum = t;
  }
  double result() const { return sum + compensation; }
};

void check_shape(const DenseMatrix& scores, const CooccurrenceStats& stats) {
  if (static_cast<std::size_t>(scores.rows()) != stats.words() ||
      static_cast<std::size_t>(scores.cols()) != stats.contexts()) {
    throw ContractViolation("score matrix is " + std::to_string(scores.rows()) + "x" +
                            std::to_string(scores.cols()) + " but stats are " +
                            std::to_string(stats.words()) + "x" +
                            std::to_string(stats.contexts()));
  }
}

// Runs body(row_begin, row_end) over contiguous row blocks.
template <typename Body>
void for_row_blocks(Eigen::Index rows, int threads, Body&& body) {
  const auto workers = static_cast<Eigen::Index>(std::clamp<Eigen::Index>(threads, 1, std::max<Eigen::Index>(rows, 1)));
  if (workers <= 1) {
    body(Eigen::Index{0}, rows);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const Eigen::Index block = (rows + workers - 1) / workers;
  for (Eigen::Index begin = 0; begin < rows; begin += block) {
    pool.emplace_back([&body, begin, end = std::min(rows, begin + block)] { body(begin, end); });
  }
}

}  // namespace

double objective(const DenseMatrix& scores, const CooccurrenceStats& stats, int k, int threads) {
  check_shape(scores, stats);
  if (k < 1) throw ContractViolation("negative_samples must be >= 1");

  const Eigen::Index n = scores.rows();
  const Eigen::Index m = scores.cols();
  const double scale =
      stats.total() == 0 ? 0.0 : static_cast<double>(k) / static_cast<double>(stats.total());
  std::vector<double> context_weight(static_cast<std::size_t>(m));
  for (Eigen::Index c = 0; c < m; ++c) {
    context_weight[static_cast<std::size_t>(c)] =
        static_cast<double>(stats.context_marginal(static_cast<Index>(c)));
  }

  std::vector<double> row_sums(static_cast<std::size_t>(n), 0.0);
  for_row_blocks(n, threads, [&](Eigen::Index begin, Eigen::Index end) {
    for (Eigen::Index w = begin; w < end; ++w) {
      const auto wi = static_cast<Index>(w);
      const double row_scale = scale * static_cast<double>(stats.word_marginal(wi));
      auto cols = stats.row_contexts(wi);
      auto counts = stats.row_counts(wi);
      std::size_t next = 0;
      NeumaierSum acc;
      for (Eigen::Index c = 0; c < m; ++c) {
        double a = 0.0;
        if (next < cols.size() && cols[next] == c) a = static_cast<double>(counts[next++]);
        const double b = row_scale * context_weight[static_cast<std::size_t>(c)];
        acc.add(pair_loss(a, b, scores(w, c)));
      }
      row_sums[static_cast<std::size_t>(w)] = acc.result();
    }
  });

  NeumaierSum total;
  for (double s : row_sums) total.add(s);
  return total.result();
}

DenseMatrix gradient(const DenseMatrix& scores, const CooccurrenceStats& stats, int k,
                     int threads) {
  check_shape(scores, stats);
  if (k < 1) throw ContractViolation("negative_samples must be >= 1");
  if (stats.total() == 0) throw DegenerateCorpus("corpus has no word-context pairs (|D| = 0)");

  const Eigen::Index n = scores.rows();
  const Eigen::Index m = scores.cols();
  const double scale = static_cast<double>(k) / static_cast<double>(stats.total());
  DenseMatrix grad(n, m);
  for_row_blocks(n, threads, [&](Eigen::Index begin, Eigen::Index end) {
    for (Eigen::Index w = begin; w < end; ++w) {
      const auto wi = static_cast<Index>(w);
      const double row_scale = scale * static_cast<double>(stats.word_marginal(wi));
      for (Eigen::Index c = 0; c < m; ++c) {
        const double b = row_scale * static_cast<double>(stats.context_marginal(static_cast<Index>(c)));
        grad(w, c) = -b * sigmoid(scores(w, c));
      }
      auto cols = stats.row_contexts(wi);
      auto counts = stats.row_counts(wi);
      for (std::size_t j = 0; j < cols.size(); ++j) {
        grad(w, cols[j]) += static_cast<double>(counts[j]) * sigmoid(-scores(w, cols[j]));
      }
    }
  });
  return grad;
}

}  // namespace rosgns
