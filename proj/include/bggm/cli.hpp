#pragma once

#include "bggm/baselines.hpp"
#include "bggm/io.hpp"
#include "bggm/synthetic.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bggm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

struct RunConfig {
  std::filesystem::path data;
  CsvOptions csv;
  std::filesystem::path prior_network;  // empty: uninformative priors
  ChainConfig chain;
  std::vector<double> alphas{0.1};
  std::filesystem::path out_dir = ".";
  std::filesystem::path truth;          // optional simulate truth file to score against
  double cut = 0.5;

  /// Canonical key=value text of everything that affects results (paths to
  /// outputs excluded); its FNV-1a hash goes into file headers.
  std::string canonical() const;
  void validate() const;
};

/// Writes results.bggm, chain_summary.tsv, posterior_edges.tsv,
/// predictions.tsv, and per alpha the four networks as TSV + DOT. Returns
/// the files written, in order.
std::vector<std::filesystem::path> cmd_fit(const RunConfig& cfg, std::ostream& log);

/// Re-extracts predicted labels from a saved results bundle.
std::vector<std::filesystem::path> cmd_predict(const std::filesystem::path& results, double cut,
                                               const std::filesystem::path& out_dir, std::ostream& log);

/// Re-thresholds a saved results bundle at new alphas.
std::vector<std::filesystem::path> cmd_networks(const std::filesystem::path& results, const std::vector<double>& alphas,
                                                const std::filesystem::path& out_dir, std::ostream& log);

struct SimulateConfig {
  ModelSpec model;
  std::size_t n1 = 100;
  std::size_t n2 = 100;
  CsvOptions csv;
  std::filesystem::path out_dir = ".";

  std::string canonical() const;
};

/// Writes data.csv and truth.tsv (non-null edges only).
std::vector<std::filesystem::path> cmd_simulate(const SimulateConfig& cfg, std::ostream& log);

struct TruthEdges {
  std::array<Matrix, 2> adjacency;
};

/// Reads a truth.tsv against the given protein names.
TruthEdges read_truth_file(const std::filesystem::path& path, const std::vector<std::string>& names);
RecoveryMetrics score_recovery(const TruthEdges& truth, const PosteriorSummary& summary);

struct BenchmarkConfig {
  std::filesystem::path data;
  CsvOptions csv;
  std::filesystem::path prior_network;
  SplitPlan plan;
  std::size_t knn_k = 5;
  bool with_bgbc = true;
  ChainConfig chain;
  std::filesystem::path out_dir = ".";

  std::string canonical() const;
};

/// Writes benchmark.tsv (mean / sd table) and benchmark_replicates.tsv.
std::vector<std::filesystem::path> cmd_benchmark(const BenchmarkConfig& cfg, std::ostream& log);

/// Parses argv and dispatches; returns the process exit code. A flat
/// key=value file given by --config supplies defaults for the chosen
/// subcommand's options (command-line flags win).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bggm
