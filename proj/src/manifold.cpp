#include "rosgns/manifold.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include "rosgns/errors.hpp"
#include "text_io.hpp"

namespace rosgns {

namespace {

constexpr double kSingularTolerance = 1e-12;

void emit(const DiagnosticSink& sink, const std::string& message) {
  if (sink) sink(message);
}

// True when the smallest diagonal entry is negligible against the largest.
bool near_singular(const Vector& diagonal) {
  const double largest = diagonal.cwiseAbs().maxCoeff();
  const double smallest = diagonal.cwiseAbs().minCoeff();
  return largest == 0.0 || smallest <= kSingularTolerance * largest;
}

}  // namespace

double orthonormality_error(const LowRankFactors& point) {
  const auto d = point.rank();
  const Matrix eye = Matrix::Identity(d, d);
  const double u_err = (point.U.transpose() * point.U - eye).norm();
  const double v_err = (point.V.transpose() * point.V - eye).norm();
  return std::max(u_err, v_err);
}

ThinQr thin_qr(const Matrix& a) {
  const auto rows = a.rows();
  const auto cols = a.cols();
  if (rows < cols) throw ContractViolation("thin QR needs rows >= cols");
  Eigen::HouseholderQR<Matrix> qr(a);
  ThinQr out;
  out.Q = qr.householderQ() * Matrix::Identity(rows, cols);
  out.R = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < cols; ++i) {
    if (out.R(i, i) < 0.0) {
      out.R.row(i) *= -1.0;
      out.Q.col(i) *= -1.0;
    }
  }
  return out;
}

LowRankFactors from_product(const Matrix& word_factors, const Matrix& context_factors,
                            const DiagnosticSink& sink) {
  const auto d = word_factors.cols();
  if (context_factors.cols() != d) {
    throw ContractViolation("word and context factors have different widths");
  }
  if (d < 1 || d > std::min(word_factors.rows(), context_factors.rows())) {
    throw ContractViolation("rank must satisfy 1 <= d <= min(n, m)");
  }
  if (!word_factors.allFinite() || !context_factors.allFinite()) {
    throw ContractViolation("initial factors contain non-finite values");
  }

  const ThinQr left = thin_qr(word_factors);
  const ThinQr right = thin_qr(context_factors);
  const Matrix core = left.R * right.R.transpose();
  Eigen::JacobiSVD<Matrix> svd(core, Eigen::ComputeFullU | Eigen::ComputeFullV);

  LowRankFactors point;
  point.U = left.Q * svd.matrixU();
  point.V = right.Q * svd.matrixV();
  point.S = svd.singularValues().asDiagonal();
  if (near_singular(svd.singularValues())) {
    emit(sink, "initial point is rank-deficient (smallest singular value " +
                   detail::format_general(svd.singularValues().minCoeff(), 3) + ", largest " +
                   detail::format_general(svd.singularValues().maxCoeff(), 3) +
                   "); projector-splitting steps may be ill-conditioned");
  }
  return point;
}

LowRankFactors retract_step(const LowRankFactors& point, const DenseMatrix& grad, double step,
                            const DiagnosticSink& sink) {
  if (!(step > 0.0)) throw ContractViolation("step size must be positive");
  if (grad.rows() != point.rows() || grad.cols() != point.cols()) {
    throw ContractViolation("gradient shape does not match the manifold point");
  }

  // A V = U S (V^T V) + step * grad V, with V^T V = I.
  const Matrix av = point.U * point.S + step * (grad * point.V);
  ThinQr first = thin_qr(av);

  // A^T U1 = V S^T (U^T U1) + step * grad^T U1.
  const Matrix atu = point.V * (point.S.transpose() * (point.U.transpose() * first.Q)) +
                     step * (grad.transpose() * first.Q);
  ThinQr second = thin_qr(atu);

  if (near_singular(first.R.diagonal()) || near_singular(second.R.diagonal())) {
    emit(sink, "retraction R factor is numerically singular (rank collapse)");
  }

  LowRankFactors next;
  next.U = std::move(first.Q);
  next.V = std::move(second.Q);
  next.S = second.R.transpose();
  return next;
}

LowRankFactors retract_svd(const DenseMatrix& a, int rank) {
  if (rank < 1 || rank > std::min(a.rows(), a.cols())) {
    throw ContractViolation("rank must satisfy 1 <= d <= min(n, m)");
  }
  const Matrix dense = a;
  Eigen::BDCSVD<Matrix> svd(dense, Eigen::ComputeThinU | Eigen::ComputeThinV);
  LowRankFactors point;
  point.U = svd.matrixU().leftCols(rank);
  point.V = svd.matrixV().leftCols(rank);
  point.S = svd.singularValues().head(rank).asDiagonal();
  return point;
}

TrainResult train(const CooccurrenceStats& stats, const SgnsConfig& config,
                  const LowRankFactors& init, const TrainOptions& options) {
  config.validate_for(stats.words(), stats.contexts());
  if (static_cast<std::size_t>(init.rows()) != stats.words() ||
      static_cast<std::size_t>(init.cols()) != stats.contexts() ||
      init.rank() != config.dimension || init.S.cols() != config.dimension ||
      init.U.cols() != config.dimension || init.V.cols() != config.dimension) {
    throw ContractViolation("initial factors do not match stats shape and dimension");
  }
  if (stats.total() == 0) throw DegenerateCorpus("corpus has no word-context pairs (|D| = 0)");

  TrainResult result;
  result.factors = init;
  const DiagnosticSink sink = [&result](const std::string& msg) {
    result.diagnostics.push_back(msg);
  };
  const int k = config.negative_samples;

  DenseMatrix scores = result.factors.product();
  auto record = [&](int iteration) {
    const double value = objective(scores, stats, k, options.threads);
    if (!std::isfinite(value)) {
      throw NumericalAbort("objective is not finite at iteration " + std::to_string(iteration),
                           iteration);
    }
    result.trace.push_back(value);
    if (options.on_iteration) options.on_iteration(iteration, value);
  };

  record(0);
  for (int i = 1; i <= config.iterations; ++i) {
    const DenseMatrix grad = gradient(scores, stats, k, options.threads);
    result.factors = retract_step(result.factors, grad, config.step_size, [&](const std::string& msg) {
      sink("iteration " + std::to_string(i) + ": " + msg);
    });
    scores = result.factors.product();
    record(i);
  }
  return result;
}

namespace {

void write_matrix(std::ostream& out, const Matrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ' ';
      out << detail::format_exact(m(r, c));
    }
    out << '\n';
  }
}

Matrix read_matrix(detail::LineReader& reader, std::string_view marker, Eigen::Index rows,
                   Eigen::Index cols) {
  std::string line;
  if (!reader.next(line) || line != marker) reader.fail("expected '" + std::string(marker) + "'");
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!reader.next(line)) reader.fail("truncated matrix " + std::string(marker));
    auto fields = detail::split_fields(line);
    if (static_cast<Eigen::Index>(fields.size()) != cols) {
      reader.fail("expected " + std::to_string(cols) + " values, found " +
                  std::to_string(fields.size()));
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!detail::parse_number(fields[static_cast<std::size_t>(c)], m(r, c))) {
        reader.fail("malformed number '" + std::string(fields[static_cast<std::size_t>(c)]) + "'");
      }
    }
  }
  return m;
}

template <typename T>
T read_field(detail::LineReader& reader, std::string_view key) {
  std::string line;
  if (!reader.next(line)) reader.fail("unexpected end of file");
  auto fields = detail::split_fields(line);
  T value{};
  if (fields.size() != 2 || fields[0] != key || !detail::parse_number(fields[1], value)) {
    reader.fail("expected '" + std::string(key) + " <value>'");
  }
  return value;
}

}  // namespace

void save_factors(const LowRankFactors& factors, int iteration, std::ostream& out) {
  out << "rosgns-factors 1\n"
      << "n " << factors.rows() << '\n'
      << "m " << factors.cols() << '\n'
      << "d " << factors.rank() << '\n'
      << "iteration " << iteration << '\n';
  out << "U\n";
  write_matrix(out, factors.U);
  out << "S\n";
  write_matrix(out, factors.S);
  out << "V\n";
  write_matrix(out, factors.V);
  if (!out) throw IoError("write error while saving factors");
}

void save_factors(const LowRankFactors& factors, int iteration, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  save_factors(factors, iteration, out);
}

Checkpoint load_factors(std::istream& in, const std::string& source) {
  detail::LineReader reader(in, source);
  std::string line;
  if (!reader.next(line) || line != "rosgns-factors 1") reader.fail("not a factors file (v1)");
  const auto n = read_field<Eigen::Index>(reader, "n");
  const auto m = read_field<Eigen::Index>(reader, "m");
  const auto d = read_field<Eigen::Index>(reader, "d");
  const auto iteration = read_field<int>(reader, "iteration");
  if (n < 1 || m < 1 || d < 1 || d > std::min(n, m)) reader.fail("invalid dimensions");
  Checkpoint cp;
  cp.iteration = iteration;
  cp.factors.U = read_matrix(reader, "U", n, d);
  cp.factors.S = read_matrix(reader, "S", d, d);
  cp.factors.V = read_matrix(reader, "V", m, d);
  return cp;
}

Checkpoint load_factors(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open factors file: " + path);
  return load_factors(in, path);
}

void write_trace_csv(const std::vector<double>& trace, std::ostream& out) {
  out << "iteration,objective\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << i << ',' << detail::format_exact(trace[i]) << '\n';
  }
}

}  // namespace rosgns
