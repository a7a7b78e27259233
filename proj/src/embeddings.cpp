#include "rosgns/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>

#include "rosgns/errors.hpp"
#include "text_io.hpp"

namespace rosgns {

std::string_view to_string(Scaling scaling) {
  switch (scaling) {
    case Scaling::SqrtSigma:
      return "sqrt-sigma";
    case Scaling::Sigma:
      return "sigma";
    case Scaling::None:
      return "none";
  }
  return "unknown";
}

Scaling parse_scaling(std::string_view text) {
  if (text == "sqrt-sigma") return Scaling::SqrtSigma;
  if (text == "sigma") return Scaling::Sigma;
  if (text == "none") return Scaling::None;
  throw ContractViolation("unknown scaling '" + std::string(text) + "'");
}

EmbeddingSet::EmbeddingSet(TokenIndex tokens, DenseMatrix vectors, Provenance provenance)
    : tokens_(std::move(tokens)), vectors_(std::move(vectors)), provenance_(std::move(provenance)) {
  if (static_cast<std::size_t>(vectors_.rows()) != tokens_.size()) {
    throw ContractViolation("embedding rows (" + std::to_string(vectors_.rows()) +
                            ") do not match vocabulary size (" +
                            std::to_string(tokens_.size()) + ")");
  }
  if (!vectors_.allFinite()) throw ContractViolation("embedding vectors contain non-finite values");
}

std::span<const double> EmbeddingSet::vector(Index i) const {
  return {vectors_.row(i).data(), static_cast<std::size_t>(vectors_.cols())};
}

ExtractedEmbeddings extract_embeddings(const LowRankFactors& factors, Scaling scaling) {
  Eigen::JacobiSVD<Matrix> svd(factors.S, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix left = factors.U * svd.matrixU();
  Matrix right = factors.V * svd.matrixV();
  const Vector sigma = svd.singularValues();

  for (Eigen::Index j = 0; j < left.cols(); ++j) {
    Eigen::Index pivot = 0;
    left.col(j).cwiseAbs().maxCoeff(&pivot);
    if (left(pivot, j) < 0.0) {
      left.col(j) *= -1.0;
      right.col(j) *= -1.0;
    }
  }

  ExtractedEmbeddings out;
  out.singular_values = sigma;
  switch (scaling) {
    case Scaling::SqrtSigma: {
      const Vector root = sigma.cwiseSqrt();
      out.W = left * root.asDiagonal();
      out.C = right * root.asDiagonal();
      break;
    }
    case Scaling::Sigma:
      out.W = left * sigma.asDiagonal();
      out.C = std::move(right);
      break;
    case Scaling::None:
      out.W = std::move(left);
      out.C = right * sigma.asDiagonal();
      break;
  }
  return out;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ContractViolation("cosine of vectors with different lengths");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double cosine_similarity(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
  return cosine_similarity(std::span<const double>(a.data(), static_cast<std::size_t>(a.size())),
                           std::span<const double>(b.data(), static_cast<std::size_t>(b.size())));
}

namespace {

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

std::vector<std::string> closest_spellings(const TokenIndex& tokens, std::string_view query,
                                           std::size_t limit) {
  std::vector<std::pair<std::size_t, Index>> scored;
  scored.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    scored.emplace_back(edit_distance(query, tokens.tokens()[i]), static_cast<Index>(i));
  }
  const auto keep = std::min(limit, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep),
                    scored.end());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < keep; ++i) out.push_back(tokens.token(scored[i].second));
  return out;
}

std::vector<Neighbor> nearest_neighbors(const EmbeddingSet& set, std::string_view query,
                                        std::size_t count, std::size_t offset) {
  const Index q = set.tokens().find(query);
  if (q < 0) {
    std::string hint;
    for (const auto& s : closest_spellings(set.tokens(), query)) {
      hint += hint.empty() ? s : ", " + s;
    }
    throw NotFound("'" + std::string(query) + "' is not in the vocabulary" +
                   (hint.empty() ? std::string() : "; did you mean: " + hint));
  }

  std::vector<std::pair<double, Index>> ranked;
  ranked.reserve(set.size());
  const auto query_vec = set.vector(q);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto idx = static_cast<Index>(i);
    if (idx == q) continue;
    ranked.emplace_back(cosine_similarity(query_vec, set.vector(idx)), idx);
  }
  if (offset >= ranked.size()) return {};
  const std::size_t end = std::min(ranked.size(), offset + count);
  auto by_cosine = [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  };
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(end),
                    ranked.end(), by_cosine);

  std::vector<Neighbor> out;
  for (std::size_t i = offset; i < end; ++i) {
    out.push_back({set.tokens().token(ranked[i].second), ranked[i].first});
  }
  return out;
}

void save_embeddings(const EmbeddingSet& set, std::ostream& out) {
  out << set.size() << ' ' << set.dimension() << '\n';
  if (!set.provenance().method.empty()) {
    out << "# rosgns-embeddings 1 method=" << set.provenance().method;
    if (!set.provenance().config.empty()) out << " config=" << set.provenance().config;
    out << '\n';
  }
  const DenseMatrix& vectors = set.vectors();
  for (std::size_t i = 0; i < set.size(); ++i) {
    out << set.tokens().token(static_cast<Index>(i));
    for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
      out << ' ' << detail::format_general(vectors(static_cast<Eigen::Index>(i), c), 10);
    }
    out << '\n';
  }
  if (!out) throw IoError("write error while saving embeddings");
}

void save_embeddings(const EmbeddingSet& set, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  save_embeddings(set, out);
}

EmbeddingSet load_embeddings(std::istream& in, const std::string& source) {
  detail::LineReader reader(in, source);
  std::string line;
  if (!reader.next(line)) reader.fail("empty embeddings file, expected header 'n d'");
  auto header = detail::split_fields(line);
  std::size_t n = 0;
  Eigen::Index d = 0;
  if (header.size() != 2 || !detail::parse_number(header[0], n) ||
      !detail::parse_number(header[1], d) || d < 0) {
    reader.fail("malformed header, expected 'n d'");
  }

  Provenance provenance;
  std::vector<std::string> tokens;
  tokens.reserve(n);
  DenseMatrix vectors(static_cast<Eigen::Index>(n), d);
  while (reader.next(line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto method_at = line.find("method=");
      if (method_at != std::string::npos) {
        const auto config_at = line.find(" config=", method_at);
        const auto method_end = std::min(line.find(' ', method_at), config_at);
        provenance.method = line.substr(method_at + 7, method_end == std::string::npos
                                                           ? std::string::npos
                                                           : method_end - method_at - 7);
        if (config_at != std::string::npos) provenance.config = line.substr(config_at + 8);
      }
      continue;
    }
    auto fields = detail::split_fields(line);
    if (tokens.size() == n) reader.fail("more rows than the header's n = " + std::to_string(n));
    if (static_cast<Eigen::Index>(fields.size()) != d + 1) {
      reader.fail("row for '" + std::string(fields.empty() ? "" : fields[0]) + "' has " +
                  std::to_string(fields.empty() ? 0 : fields.size() - 1) + " values, expected " +
                  std::to_string(d));
    }
    const auto row = static_cast<Eigen::Index>(tokens.size());
    for (Eigen::Index c = 0; c < d; ++c) {
      if (!detail::parse_number(fields[static_cast<std::size_t>(c + 1)], vectors(row, c)) ||
          !std::isfinite(vectors(row, c))) {
        reader.fail("row for '" + std::string(fields[0]) + "' has a malformed value '" +
                    std::string(fields[static_cast<std::size_t>(c + 1)]) + "'");
      }
    }
    tokens.emplace_back(fields[0]);
  }
  if (tokens.size() != n) {
    reader.fail("expected " + std::to_string(n) + " rows, found " + std::to_string(tokens.size()));
  }
  try {
    return EmbeddingSet(TokenIndex(std::move(tokens)), std::move(vectors), std::move(provenance));
  } catch (const ContractViolation& e) {
    throw ParseError(source, reader.line_no(), e.what());
  }
}

EmbeddingSet load_embeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open embeddings file: " + path);
  return load_embeddings(in, path);
}

}  // namespace rosgns
