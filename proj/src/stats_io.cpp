#include <fstream>
#include <ostream>

#include "rosgns/corpus.hpp"
#include "rosgns/errors.hpp"
#include "text_io.hpp"

namespace rosgns {

namespace {

constexpr std::string_view kMagic = "rosgns-cooc";
constexpr int kVersion = 1;

template <typename T>
T read_header_field(detail::LineReader& reader, std::string_view key) {
  std::string line;
  if (!reader.next(line)) reader.fail("unexpected end of file, expected '" + std::string(key) + "'");
  auto fields = detail::split_fields(line);
  T value{};
  if (fields.size() != 2 || fields[0] != key || !detail::parse_number(fields[1], value)) {
    reader.fail("expected '" + std::string(key) + " <value>'");
  }
  return value;
}

void expect_marker(detail::LineReader& reader, std::string_view marker) {
  std::string line;
  if (!reader.next(line) || line != marker) reader.fail("expected '" + std::string(marker) + "'");
}

}  // namespace

void save_stats(const CorpusStats& stats, std::ostream& out) {
  const auto& cooc = stats.cooc;
  out << kMagic << ' ' << kVersion << '\n'
      << "n " << cooc.words() << '\n'
      << "m " << cooc.contexts() << '\n'
      << "window " << cooc.window() << '\n'
      << "min_count " << stats.vocab.min_count() << '\n'
      << "total " << cooc.total() << '\n'
      << "nnz " << cooc.nonzeros() << '\n'
      << "vocab\n";
  for (std::size_t i = 0; i < stats.vocab.size(); ++i) {
    out << stats.vocab.token(static_cast<Index>(i)) << ' '
        << stats.vocab.count(static_cast<Index>(i)) << '\n';
  }
  out << "pairs\n";
  for (const auto& p : cooc.triples()) out << p.word << ' ' << p.context << ' ' << p.count << '\n';
  if (!out) throw IoError("write error while saving stats");
}

void save_stats(const CorpusStats& stats, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  save_stats(stats, out);
}

CorpusStats load_stats(std::istream& in, const std::string& source) {
  detail::LineReader reader(in, source);
  std::string line;
  if (!reader.next(line)) reader.fail("empty stats file");
  {
    auto fields = detail::split_fields(line);
    int version = 0;
    if (fields.size() != 2 || fields[0] != kMagic || !detail::parse_number(fields[1], version)) {
      reader.fail("not a co-occurrence stats file");
    }
    if (version != kVersion) reader.fail("unsupported stats format version " + std::to_string(version));
  }
  const auto n = read_header_field<std::size_t>(reader, "n");
  const auto m = read_header_field<std::size_t>(reader, "m");
  const auto window = read_header_field<int>(reader, "window");
  const auto min_count = read_header_field<Count>(reader, "min_count");
  const auto total = read_header_field<Count>(reader, "total");
  const auto nnz = read_header_field<std::size_t>(reader, "nnz");
  if (n != m) reader.fail("word and context vocabularies must coincide (n != m)");

  expect_marker(reader, "vocab");
  std::vector<std::string> tokens;
  std::vector<Count> counts;
  tokens.reserve(n);
  counts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!reader.next(line)) reader.fail("truncated vocabulary block");
    auto fields = detail::split_fields(line);
    Count count = 0;
    if (fields.size() != 2 || !detail::parse_number(fields[1], count)) {
      reader.fail("expected '<token> <count>'");
    }
    tokens.emplace_back(fields[0]);
    counts.push_back(count);
  }

  expect_marker(reader, "pairs");
  std::vector<PairCount> pairs;
  pairs.reserve(nnz);
  for (std::size_t i = 0; i < nnz; ++i) {
    if (!reader.next(line)) reader.fail("truncated pairs block");
    auto fields = detail::split_fields(line);
    PairCount p{};
    if (fields.size() != 3 || !detail::parse_number(fields[0], p.word) ||
        !detail::parse_number(fields[1], p.context) || !detail::parse_number(fields[2], p.count) ||
        p.count <= 0) {
      reader.fail("expected '<w> <c> <count>' with positive count");
    }
    if (p.word < 0 || static_cast<std::size_t>(p.word) >= n || p.context < 0 ||
        static_cast<std::size_t>(p.context) >= m) {
      reader.fail("pair index out of range");
    }
    pairs.push_back(p);
  }
  while (reader.next(line)) {
    if (!detail::split_fields(line).empty()) reader.fail("trailing data after pairs block");
  }

  CorpusStats out;
  try {
    out.vocab = Vocabulary(std::move(tokens), std::move(counts), min_count);
    out.cooc = CooccurrenceStats(n, m, window, std::move(pairs));
  } catch (const ContractViolation& e) {
    throw ParseError(source, reader.line_no(), e.what());
  }
  if (out.cooc.total() != total || out.cooc.nonzeros() != nnz) {
    throw ParseError(source, reader.line_no(), "header totals disagree with pairs block");
  }
  return out;
}

CorpusStats load_stats(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open stats file: " + path);
  return load_stats(in, path);
}

}  // namespace rosgns
