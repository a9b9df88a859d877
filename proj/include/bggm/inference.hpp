#pragma once

#include "bggm/sampler.hpp"

#include <optional>
#include <span>

namespace bggm {

/// Model-averaged summaries of a chain.
struct PosteriorSummary {
  std::array<Matrix, 2> ppi;                // edge inclusion per class
  Matrix ppi_diff;                          // P(lambda = 1)
  Matrix ppi_common;                        // P(lambda = 0)
  std::array<Matrix, 2> mean_partial_corr;  // mean of -A .* R, zero diagonal
  Vector class1_probability;                // per unknown sample
  std::array<Matrix, 2> bma_omega;
  std::vector<std::string> names;
  std::vector<Index> unknown_rows;
  std::size_t n_draws = 0;

  Index p() const { return ppi_diff.rows(); }
};

/// Throws ValidationError on an empty draw set.
PosteriorSummary summarize(const ChainSamples& samples);

/// Threshold reported when no prefix of the sorted probabilities qualifies;
/// no probability can reach it, so the call set is empty.
inline constexpr double kNoCallThreshold = 1.0 + 1e-9;

struct FdrThreshold {
  double phi = kNoCallThreshold;
  std::size_t selected = 0;
};

/// Bayesian FDR: sort descending, take the longest prefix whose mean q-value
/// (1 - P) is at most alpha; phi is the last probability in that prefix.
FdrThreshold fdr_threshold(std::span<const double> probs, double alpha);

enum class NetworkKind : std::uint8_t { class1, class2, differential, conserved };
enum class EdgeSign : std::uint8_t { positive, negative };

std::string_view to_string(NetworkKind k);
std::string_view to_string(EdgeSign s);

struct CalledEdge {
  Index i = 0;
  Index j = 0;
  double ppi = 0.0;
  EdgeSign sign = EdgeSign::positive;
  double partial_corr = 0.0;
  double weight = 0.0;  // |partial_corr| / max over called edges
  /// Differential calls only: the class whose graph carries the edge.
  std::optional<ClassLabel> carrier;
};

struct NetworkCall {
  NetworkKind kind = NetworkKind::class1;
  double alpha = 0.1;
  double threshold = kNoCallThreshold;
  std::vector<CalledEdge> edges;
};

/// Thresholds the column-stacked upper triangle of the chosen PPI matrix.
NetworkCall call_network(const PosteriorSummary& summary, NetworkKind which, double alpha);

struct LabelPrediction {
  Index row = 0;
  ClassLabel label = ClassLabel::class1;
  double class1_probability = 0.0;
};

/// class1 iff probability >= cut (ties go to class1). Throws ValidationError
/// when the run had no unknown samples.
std::vector<LabelPrediction> predict_labels(const PosteriorSummary& summary, double cut = 0.5);

}  // namespace bggm
