#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "rosgns/corpus.hpp"
#include "rosgns/sgns.hpp"

namespace rosgns {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// A point X = U S V^T on the manifold of rank-d matrices. U (n x d) and
// V (m x d) have orthonormal columns; S (d x d) is general.
struct LowRankFactors {
  Matrix U;
  Matrix S;
  Matrix V;

  Eigen::Index rows() const { return U.rows(); }
  Eigen::Index cols() const { return V.rows(); }
  Eigen::Index rank() const { return S.rows(); }

  DenseMatrix product() const { return U * S * V.transpose(); }
};

// Receives non-fatal numerical diagnostics (rank deficiency, near-singular R).
using DiagnosticSink = std::function<void(const std::string&)>;

// max(||U^T U - I||_F, ||V^T V - I||_F).
double orthonormality_error(const LowRankFactors& point);

// Thin QR with the sign convention diag(R) >= 0. Returns Q (rows x cols) and
// the upper-triangular cols x cols R.
struct ThinQr {
  Matrix Q;
  Matrix R;
};
ThinQr thin_qr(const Matrix& a);

// Factors of W0 * C0^T without forming the n x m product: QR of both sides,
// then an SVD of the small d x d core. S is diagonal, non-negative,
// descending. A rank-deficient product is accepted and reported to `sink`.
LowRankFactors from_product(const Matrix& word_factors, const Matrix& context_factors,
                            const DiagnosticSink& sink = {});

// One projector-splitting step on A = X + step * grad:
//   U1, R1 <- QR(A V),  V1, R2 <- QR(A^T U1),  S1 = R2^T.
// A is never formed: A V = U S + step (grad V) and
// A^T U1 = V S^T (U^T U1) + step (grad^T U1).
LowRankFactors retract_step(const LowRankFactors& point, const DenseMatrix& grad, double step,
                            const DiagnosticSink& sink = {});

// Best rank-d Frobenius approximation of `a` (keeps the d largest singular
// values). S is diagonal and descending.
LowRankFactors retract_svd(const DenseMatrix& a, int rank);

struct TrainResult {
  LowRankFactors factors;
  // trace[0] = F(X_0); trace[i] = F(X_i) after iteration i.
  std::vector<double> trace;
  std::vector<std::string> diagnostics;
};

struct TrainOptions {
  int threads = 1;
  // Called after each iteration with (iteration, objective).
  std::function<void(int, double)> on_iteration;
};

// Runs config.iterations projector-splitting gradient-ascent steps on the
// SGNS objective starting from `init`.
// Throws DegenerateCorpus when |D| = 0 and NumericalAbort on a non-finite
// objective.
TrainResult train(const CooccurrenceStats& stats, const SgnsConfig& config,
                  const LowRankFactors& init, const TrainOptions& options = {});

// Checkpoint file:
//
//   rosgns-factors 1
//   n <n>  m <m>  d <d>  iteration <i>        (one per line)
//   U / S / V                                  marker line, then rows of
//                                              space-separated doubles
//
// Doubles are written in shortest round-trip form, so loading is exact.
void save_factors(const LowRankFactors& factors, int iteration, std::ostream& out);
void save_factors(const LowRankFactors& factors, int iteration, const std::string& path);
struct Checkpoint {
  LowRankFactors factors;
  int iteration = 0;
};
Checkpoint load_factors(std::istream& in, const std::string& source);
Checkpoint load_factors(const std::string& path);

// CSV "iteration,objective".
void write_trace_csv(const std::vector<double>& trace, std::ostream& out);

}  // namespace rosgns
