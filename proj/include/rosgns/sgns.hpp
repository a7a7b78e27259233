#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>

#include "rosgns/corpus.hpp"

namespace rosgns {

// Dense n x m matrices over (word, context). Row-major so that a row lines up
// with the CSR layout of CooccurrenceStats.
using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class InitMode { SvdSppmi, RandomFactors, ProvidedFactors };

std::string_view to_string(InitMode mode);
InitMode parse_init_mode(std::string_view text);

struct SgnsConfig {
  int dimension = 100;         // d, the rank constraint
  int negative_samples = 5;    // k
  double step_size = 5e-5;     // lambda
  int iterations = 7;          // K
  InitMode init_mode = InitMode::SvdSppmi;

  // Throws ContractViolation on d < 1, k < 1, lambda <= 0 or K < 0.
  void validate() const;
  // Additionally checks d <= min(n, m).
  void validate_for(std::size_t words, std::size_t contexts) const;
};

double sigmoid(double x);
// log(sigmoid(x)) without overflow or underflow.
double log_sigmoid(double x);

// f(x) = a log sigmoid(x) + b log sigmoid(-x).
double pair_loss(double a, double b, double x);

// b_{w,c} = k #(w) #(c) / |D|; zero when |D| = 0.
double negative_weight(const CooccurrenceStats& stats, int k, Index w, Index c);

// F(X) = sum over all (w, c) of pair_loss(#(w,c), b_{w,c}, x_{w,c}), including
// unobserved pairs. Rows are summed with Neumaier compensation and combined in
// row order, so the result does not depend on `threads`.
double objective(const DenseMatrix& scores, const CooccurrenceStats& stats, int k,
                 int threads = 1);

// (dF/dX)_{w,c} = #(w,c) sigmoid(-x) - b_{w,c} sigmoid(x).
// Throws DegenerateCorpus when |D| = 0.
DenseMatrix gradient(const DenseMatrix& scores, const CooccurrenceStats& stats, int k,
                     int threads = 1);

}  // namespace rosgns
