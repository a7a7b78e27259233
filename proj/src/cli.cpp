#include "rosgns/cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "rosgns/baselines.hpp"
#include "rosgns/corpus.hpp"
#include "rosgns/embeddings.hpp"
#include "rosgns/errors.hpp"
#include "rosgns/evaluation.hpp"
#include "rosgns/manifold.hpp"
#include "rosgns/sgns.hpp"
#include "text_io.hpp"

namespace rosgns::cli {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

constexpr std::string_view kVersion = "1.0.0";

// Thrown for flag combinations CLI11 cannot validate on its own.
class UsageError : public Error {
 public:
  using Error::Error;
};

class PhaseTimer {
 public:
  explicit PhaseTimer(std::ostream& out) : out_(out) {}

  template <typename F>
  decltype(auto) run(const std::string& phase, F&& body) {
    const auto start = Clock::now();
    struct Report {
      PhaseTimer& self;
      const std::string& phase;
      Clock::time_point start;
      ~Report() {
        const double secs = std::chrono::duration<double>(Clock::now() - start).count();
        self.timings_[phase] = secs;
        self.out_ << "[time] " << phase << ": " << detail::format_fixed(secs, 3) << " s\n";
      }
    } report{*this, phase, start};
    return body();
  }

  const json& timings() const { return timings_; }

 private:
  std::ostream& out_;
  json timings_ = json::object();
};

int default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string dataset_name_from(const std::string& spec, std::string& path) {
  const auto eq = spec.find('=');
  if (eq != std::string::npos && eq > 0) {
    path = spec.substr(eq + 1);
    return spec.substr(0, eq);
  }
  path = spec;
  return std::filesystem::path(spec).stem().string();
}

// ---------------------------------------------------------------- build-cooc

struct BuildOptions {
  std::string corpus;
  int window = 5;
  Count min_count = 200;
  std::string out_path;
};

int cmd_build_cooc(const BuildOptions& opt, std::ostream& out) {
  PhaseTimer timer(out);
  auto tokens = timer.run("tokenize", [&] {
    if (opt.corpus == "-") return tokenize(std::cin, "<stdin>");
    return tokenize_file(opt.corpus);
  });
  CorpusStats stats;
  stats.vocab = timer.run("vocabulary", [&] { return build_vocabulary(tokens, opt.min_count); });
  if (stats.vocab.empty()) {
    throw DegenerateCorpus("no token occurs more than " + std::to_string(opt.min_count) +
                           " times in " + opt.corpus);
  }
  stats.cooc = timer.run("count", [&] {
    return count_cooccurrences(tokens, stats.vocab, opt.window);
  });
  timer.run("write", [&] { save_stats(stats, opt.out_path); });

  out << "tokens " << tokens.size() << '\n'
      << "n " << stats.cooc.words() << '\n'
      << "m " << stats.cooc.contexts() << '\n'
      << "|D| " << stats.cooc.total() << '\n'
      << "nnz " << stats.cooc.nonzeros() << '\n'
      << "wrote " << opt.out_path << '\n';
  return kSuccess;
}

// --------------------------------------------------------------------- train

struct TrainCliOptions {
  std::string stats_path;
  std::string method = "ro-sgns";
  int dimension = 100;
  int negative = 5;
  std::optional<double> step;
  std::optional<int> iterations;
  std::string init = "svd-sppmi";
  std::string init_factors;
  std::uint64_t seed = 1;
  std::string out_path;
  std::string trace_path;
  std::string manifest_path;
  std::string checkpoint_path;
  std::string sppmi_path;
  std::string scaling = "sqrt-sigma";
  std::string corpus;
  int epochs = 5;
  double learning_rate = 0.025;
  int threads = 1;
};

int cmd_train(const TrainCliOptions& opt, const std::vector<std::string>& args,
              std::ostream& out, std::ostream& err) {
  PhaseTimer timer(out);
  const CorpusStats stats = timer.run("load_stats", [&] { return load_stats(opt.stats_path); });
  const std::size_t n = stats.cooc.words();
  if (static_cast<std::size_t>(opt.dimension) > std::min(n, stats.cooc.contexts())) {
    throw UsageError("--dim " + std::to_string(opt.dimension) + " exceeds min(n, m) = " +
                     std::to_string(std::min(n, stats.cooc.contexts())));
  }
  if (stats.cooc.total() == 0) throw DegenerateCorpus("stats file has |D| = 0");

  const StepSchedule schedule = default_schedule(opt.dimension);
  SgnsConfig config;
  config.dimension = opt.dimension;
  config.negative_samples = opt.negative;
  config.step_size = opt.step.value_or(schedule.step_size);
  config.iterations = opt.iterations.value_or(schedule.iterations);
  config.init_mode = parse_init_mode(opt.init);
  const Scaling scaling = parse_scaling(opt.scaling);
  config.validate_for(n, stats.cooc.contexts());

  const int k = config.negative_samples;
  json manifest;
  manifest["tool"] = "rosgns";
  manifest["version"] = kVersion;
  manifest["command"] = args;
  manifest["method"] = opt.method;
  json cfg = {{"dimension", config.dimension},
              {"negative_samples", k},
              {"seed", opt.seed},
              {"scaling", opt.scaling},
              {"threads", opt.threads},
              {"window", stats.cooc.window()},
              {"min_count", stats.vocab.min_count()}};
  json inputs = json::array();
  inputs.push_back({{"path", opt.stats_path}, {"sha256", file_digest(opt.stats_path)}});

  Matrix word_vectors;
  std::vector<double> trace;
  double final_objective = 0.0;

  if (opt.method == "ro-sgns") {
    cfg["step_size"] = config.step_size;
    cfg["iterations"] = config.iterations;
    cfg["init"] = std::string(to_string(config.init_mode));
    LowRankFactors init;
    switch (config.init_mode) {
      case InitMode::SvdSppmi:
        init = timer.run("init_svd_sppmi",
                         [&] { return svd_sppmi_factors(stats.cooc, config.dimension, k); });
        break;
      case InitMode::RandomFactors: {
        init = timer.run("init_random", [&] {
          const double scale = svd_sppmi_factors(stats.cooc, config.dimension, k).S.norm();
          return random_factors(n, stats.cooc.contexts(), config.dimension, opt.seed, scale);
        });
        break;
      }
      case InitMode::ProvidedFactors: {
        if (opt.init_factors.empty()) {
          throw UsageError("--init provided requires --init-factors <checkpoint>");
        }
        init = load_factors(opt.init_factors).factors;
        inputs.push_back({{"path", opt.init_factors}, {"sha256", file_digest(opt.init_factors)}});
        cfg["init_factors"] = opt.init_factors;
        break;
      }
    }
    TrainOptions train_opts;
    train_opts.threads = opt.threads;
    train_opts.on_iteration = [&out](int i, double f) {
      out << "iteration " << i << " objective " << detail::format_general(f, 12) << '\n';
    };
    TrainResult result = timer.run("train", [&] { return train(stats.cooc, config, init, train_opts); });
    for (const auto& d : result.diagnostics) err << "warning: " << d << '\n';
    trace = result.trace;
    final_objective = trace.back();
    if (!opt.checkpoint_path.empty()) {
      save_factors(result.factors, config.iterations, opt.checkpoint_path);
    }
    word_vectors = timer.run("extract", [&] { return extract_embeddings(result.factors, scaling).W; });
  } else if (opt.method == "svd-sppmi") {
    if (opt.iterations || opt.step) {
      err << "warning: --iters/--step are ignored for svd-sppmi\n";
    }
    const SppmiMatrix matrix = timer.run("sppmi", [&] { return sppmi(stats.cooc, k); });
    if (!opt.sppmi_path.empty()) {
      std::ofstream dump(opt.sppmi_path, std::ios::binary);
      if (!dump) throw IoError("cannot open for writing: " + opt.sppmi_path);
      save_sppmi(matrix, dump);
    }
    const LowRankFactors factors = timer.run("svd", [&] {
      const DenseMatrix dense = matrix.entries.toDense();
      return retract_svd(dense, config.dimension);
    });
    final_objective = objective(factors.product(), stats.cooc, k, opt.threads);
    trace = {final_objective};
    if (!opt.checkpoint_path.empty()) save_factors(factors, 0, opt.checkpoint_path);
    word_vectors = timer.run("extract", [&] { return extract_embeddings(factors, scaling).W; });
  } else if (opt.method == "sgd-sgns") {
    if (opt.corpus.empty()) throw UsageError("--method sgd-sgns requires --corpus <text file>");
    if (opt.iterations || opt.step) {
      err << "warning: --iters/--step are ignored for sgd-sgns (use --epochs/--lr)\n";
    }
    cfg["epochs"] = opt.epochs;
    cfg["learning_rate"] = opt.learning_rate;
    const auto tokens = timer.run("tokenize", [&] { return tokenize_file(opt.corpus); });
    inputs.push_back({{"path", opt.corpus}, {"sha256", file_digest(opt.corpus)}});
    SgdOptions sgd;
    sgd.epochs = opt.epochs;
    sgd.seed = opt.seed;
    sgd.learning_rate = opt.learning_rate;
    sgd.window = stats.cooc.window();
    const EmbeddingPair init = sgd_initial_embeddings(n, n, config.dimension, opt.seed);
    const double init_objective =
        objective(init.W * init.C.transpose(), stats.cooc, k, opt.threads);
    sgd.initial = init;
    const EmbeddingPair emb =
        timer.run("train", [&] { return sgd_sgns_train(tokens, stats.vocab, config, sgd); });
    final_objective = objective(emb.W * emb.C.transpose(), stats.cooc, k, opt.threads);
    trace = {init_objective, final_objective};
    word_vectors = emb.W;
  } else {
    throw UsageError("unknown --method '" + opt.method + "'");
  }

  out << "objective " << detail::format_general(final_objective, 12) << '\n';

  const std::string config_line = cfg.dump();
  const EmbeddingSet set(stats.vocab.index(), word_vectors, {opt.method, config_line});
  timer.run("write", [&] { save_embeddings(set, opt.out_path); });
  if (!opt.trace_path.empty()) {
    std::ofstream trace_out(opt.trace_path, std::ios::binary);
    if (!trace_out) throw IoError("cannot open for writing: " + opt.trace_path);
    write_trace_csv(trace, trace_out);
  }

  manifest["config"] = cfg;
  manifest["inputs"] = inputs;
  manifest["outputs"] = {{"embeddings", opt.out_path},
                         {"trace", opt.trace_path},
                         {"checkpoint", opt.checkpoint_path}};
  manifest["objective"] = final_objective;
  manifest["timing_seconds"] = timer.timings();
  const std::string manifest_path =
      opt.manifest_path.empty() ? opt.out_path + ".manifest.json" : opt.manifest_path;
  std::ofstream mf(manifest_path, std::ios::binary);
  if (!mf) throw IoError("cannot open for writing: " + manifest_path);
  mf << manifest.dump(2) << '\n';

  out << "wrote " << opt.out_path << " (" << set.size() << " x " << set.dimension() << ")\n";
  return kSuccess;
}

// ------------------------------------------------------------------ evaluate

struct EvaluateOptions {
  std::string embeddings;
  std::vector<std::string> compare;
  std::vector<std::string> datasets;
  std::string csv_path;
};

std::string row_label(const EmbeddingSet& set, const std::string& path) {
  if (!set.provenance().method.empty()) return set.provenance().method;
  return std::filesystem::path(path).stem().string();
}

int cmd_evaluate(const EvaluateOptions& opt, std::ostream& out, std::ostream& err) {
  std::vector<std::string> paths{opt.embeddings};
  paths.insert(paths.end(), opt.compare.begin(), opt.compare.end());

  std::vector<SimilarityDataset> datasets;
  for (const auto& spec : opt.datasets) {
    std::string path;
    const std::string name = dataset_name_from(spec, path);
    datasets.push_back(load_dataset(path, name));
    if (datasets.back().duplicates_dropped > 0) {
      err << "note: " << name << ": dropped " << datasets.back().duplicates_dropped
          << " repeated pair(s)\n";
    }
  }

  struct Cell {
    std::string text;
    std::string csv;
  };
  std::vector<std::string> labels;
  std::vector<std::vector<Cell>> table;
  std::vector<std::string> accounting;
  for (const auto& path : paths) {
    const EmbeddingSet set = load_embeddings(path);
    labels.push_back(row_label(set, path));
    auto& row = table.emplace_back();
    for (const auto& ds : datasets) {
      try {
        const EvalReport report = evaluate(set, ds);
        row.push_back({detail::format_fixed(report.spearman, 3),
                       detail::format_exact(report.spearman)});
        accounting.push_back(labels.back() + " / " + ds.name + ": " +
                             std::to_string(report.pairs_used) + "/" +
                             std::to_string(report.pairs_total) + " pairs used");
      } catch (const UndefinedCorrelation& e) {
        row.push_back({"n/a (" + std::to_string(e.pairs_used()) + "/" +
                           std::to_string(e.pairs_total()) + " pairs)",
                       "n/a"});
        accounting.push_back(labels.back() + " / " + ds.name + ": " +
                             std::to_string(e.pairs_used()) + "/" +
                             std::to_string(e.pairs_total()) + " pairs used (undefined)");
      }
    }
  }

  std::vector<std::size_t> widths{6};
  for (const auto& l : labels) widths[0] = std::max(widths[0], l.size());
  for (std::size_t j = 0; j < datasets.size(); ++j) {
    std::size_t w = datasets[j].name.size();
    for (const auto& row : table) w = std::max(w, row[j].text.size());
    widths.push_back(w);
  }
  auto print_row = [&](const std::string& first, auto&& cell_of) {
    out << std::left << std::setw(static_cast<int>(widths[0])) << first;
    for (std::size_t j = 0; j < datasets.size(); ++j) {
      out << "  " << std::setw(static_cast<int>(widths[j + 1])) << cell_of(j);
    }
    out << '\n';
  };
  print_row("method", [&](std::size_t j) { return datasets[j].name; });
  for (std::size_t i = 0; i < table.size(); ++i) {
    print_row(labels[i], [&](std::size_t j) { return table[i][j].text; });
  }
  out << std::right;
  for (const auto& line : accounting) out << "  " << line << '\n';

  if (!opt.csv_path.empty()) {
    std::ofstream csv(opt.csv_path, std::ios::binary);
    if (!csv) throw IoError("cannot open for writing: " + opt.csv_path);
    csv << "method";
    for (const auto& ds : datasets) csv << ',' << ds.name;
    csv << '\n';
    for (std::size_t i = 0; i < table.size(); ++i) {
      csv << labels[i];
      for (const auto& cell : table[i]) csv << ',' << cell.csv;
      csv << '\n';
    }
  }
  return kSuccess;
}

// ----------------------------------------------------------------- neighbors

struct NeighborsOptions {
  std::string embeddings;
  std::string query;
  std::size_t count = 10;
  std::size_t offset = 0;
};

int cmd_neighbors(const NeighborsOptions& opt, std::ostream& out) {
  const EmbeddingSet set = load_embeddings(opt.embeddings);
  const auto neighbors = nearest_neighbors(set, opt.query, opt.count, opt.offset);
  std::size_t width = 8;
  for (const auto& nb : neighbors) width = std::max(width, nb.token.size());
  out << std::right << std::setw(4) << "rank" << "  " << std::left
      << std::setw(static_cast<int>(width)) << "neighbor" << "  cosine\n";
  for (std::size_t i = 0; i < neighbors.size(); ++i) {
    out << std::right << std::setw(4) << (opt.offset + i + 1) << "  " << std::left
        << std::setw(static_cast<int>(width)) << neighbors[i].token << "  "
        << detail::format_fixed(neighbors[i].cosine, 3) << '\n';
  }
  out << std::right;
  return kSuccess;
}

}  // namespace

StepSchedule default_schedule(int dimension) {
  // Values reported for d = 100, 200 and 500; other sizes use the nearest.
  if (dimension < 150) return {5e-5, 7};
  if (dimension < 350) return {5e-5, 8};
  return {1e-4, 2};
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for hashing: " + path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 initialisation failed");
  }
  std::vector<char> buffer(1 << 16);
  while (in) {
    in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Word embeddings by Riemannian optimization of the SGNS objective", "rosgns"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  BuildOptions build;
  auto* build_cmd = app.add_subcommand("build-cooc", "Count word-context co-occurrences");
  build_cmd->add_option("corpus", build.corpus, "Corpus text file ('-' for stdin)")->required();
  build_cmd->add_option("--window", build.window, "Context window L on each side")
      ->check(CLI::PositiveNumber)
      ->envname("ROSGNS_WINDOW")
      ->capture_default_str();
  build_cmd->add_option("--min-count", build.min_count, "Keep words occurring more than this")
      ->check(CLI::PositiveNumber)
      ->envname("ROSGNS_MIN_COUNT")
      ->capture_default_str();
  build_cmd->add_option("--out,-o", build.out_path, "Output stats file")->required();

  TrainCliOptions train_opt;
  train_opt.threads = default_threads();
  auto* train_cmd = app.add_subcommand("train", "Train embeddings from a stats file");
  train_cmd->add_option("stats", train_opt.stats_path, "Stats file from build-cooc")->required();
  train_cmd->add_option("--method", train_opt.method, "ro-sgns | svd-sppmi | sgd-sgns")
      ->check(CLI::IsMember({"ro-sgns", "svd-sppmi", "sgd-sgns"}))
      ->capture_default_str();
  train_cmd->add_option("--dim", train_opt.dimension, "Embedding dimension d")
      ->check(CLI::PositiveNumber)
      ->envname("ROSGNS_DIM")
      ->capture_default_str();
  train_cmd->add_option("--neg", train_opt.negative, "Negative samples k")
      ->check(CLI::PositiveNumber)
      ->envname("ROSGNS_NEG")
      ->capture_default_str();
  train_cmd->add_option("--step", train_opt.step, "Step size lambda (default depends on --dim)")
      ->check(CLI::PositiveNumber)
      ->envname("ROSGNS_STEP");
  train_cmd->add_option("--iters", train_opt.iterations, "Iterations K (default depends on --dim)")
      ->check(CLI::NonNegativeNumber)
      ->envname("ROSGNS_ITERS");
  train_cmd->add_option("--init", train_opt.init, "svd-sppmi | random | provided")
      ->check(CLI::IsMember({"svd-sppmi", "random", "provided"}))
      ->capture_default_str();
  train_cmd->add_option("--init-factors", train_opt.init_factors, "Checkpoint for --init provided");
  train_cmd->add_option("--seed", train_opt.seed, "Random seed")
      ->envname("ROSGNS_SEED")
      ->capture_default_str();
  train_cmd->add_option("--out,-o", train_opt.out_path, "Output embeddings file")->required();
  train_cmd->add_option("--trace", train_opt.trace_path, "Per-iteration objective CSV");
  train_cmd->add_option("--manifest", train_opt.manifest_path,
                        "Run manifest path (default <out>.manifest.json)");
  train_cmd->add_option("--checkpoint", train_opt.checkpoint_path, "Save final factors here");
  train_cmd->add_option("--dump-sppmi", train_opt.sppmi_path, "Write the SPPMI matrix (svd-sppmi)");
  train_cmd->add_option("--scaling", train_opt.scaling, "sqrt-sigma | sigma | none")
      ->check(CLI::IsMember({"sqrt-sigma", "sigma", "none"}))
      ->capture_default_str();
  train_cmd->add_option("--corpus", train_opt.corpus, "Corpus text (sgd-sgns only)");
  train_cmd->add_option("--epochs", train_opt.epochs, "Corpus passes (sgd-sgns)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  train_cmd->add_option("--lr", train_opt.learning_rate, "Learning rate (sgd-sgns)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train_cmd->add_option("--threads", train_opt.threads, "Worker threads for matrix kernels")
      ->check(CLI::PositiveNumber)
      ->envname("ROSGNS_THREADS");

  EvaluateOptions eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Spearman correlation on similarity datasets");
  eval_cmd->add_option("embeddings", eval.embeddings, "Embeddings file")->required();
  eval_cmd->add_option("datasets", eval.datasets, "Dataset files ([name=]path)")->required();
  eval_cmd->add_option("--compare", eval.compare, "Additional embeddings files (extra rows)");
  eval_cmd->add_option("--csv", eval.csv_path, "Write the table as CSV");

  NeighborsOptions nb;
  auto* nb_cmd = app.add_subcommand("neighbors", "Nearest neighbors by cosine similarity");
  nb_cmd->add_option("embeddings", nb.embeddings, "Embeddings file")->required();
  nb_cmd->add_option("query", nb.query, "Query word")->required();
  nb_cmd->add_option("--count", nb.count, "Number of neighbors")->capture_default_str();
  nb_cmd->add_option("--offset", nb.offset, "Skip this many nearest neighbors")
      ->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (*build_cmd) return cmd_build_cooc(build, out);
    if (*train_cmd) return cmd_train(train_opt, args, out, err);
    if (*eval_cmd) return cmd_evaluate(eval, out, err);
    if (*nb_cmd) return cmd_neighbors(nb, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const NumericalAbort& e) {
    err << "numerical abort: " << e.what() << '\n';
    return kNumericalAbort;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}

}  // namespace rosgns::cli
