#pragma once

// Two-class sparse Gaussian graphical models with known conserved and
// differential edges, for recovery and calibration checks.

#include "bggm/inference.hpp"

namespace bggm {

enum class EdgeTruth : std::uint8_t { null, conserved, differential_class1, differential_class2 };

std::string_view to_string(EdgeTruth t);

struct TrueModel {
  Index p = 0;
  std::array<Matrix, 2> adjacency;     // binary, unit diagonal
  std::array<Matrix, 2> partial_corr;  // rho_ij, zero where no edge, unit diagonal
  std::array<Vector, 2> s;
  std::array<Vector, 2> mean;
  std::array<Matrix, 2> omega;
  std::vector<std::string> names;
  /// Number of inserted edges whose magnitude was halved to keep both classes PD.
  std::size_t shrunk_edges = 0;
  std::size_t dropped_edges = 0;

  EdgeTruth truth(Index i, Index j) const;
  /// Consistency of adjacency, labels and PD. Throws PreconditionError.
  void validate() const;
};

struct ModelSpec {
  Index p = 10;
  std::size_t n_conserved = 8;
  std::size_t n_differential = 4;
  double corr_lo = 0.4;
  double corr_hi = 0.7;
  double s_lo = 0.5;
  double s_hi = 2.0;
  double min_eigenvalue = 0.05;  // insertion margin: C - min_eigenvalue * I must stay PD
  std::size_t placement_attempts = 50;  // unused pairs tried at full magnitude before halving
  std::uint64_t seed = 1;
};

/// Conserved edges first (same value in both classes), then differential edges
/// split between the classes (class 1 takes the odd one). An insertion that
/// breaks PD (with the min_eigenvalue margin) moves to the next unused pair in
/// shuffled order; after placement_attempts pairs the first candidate is halved
/// instead, and dropped after 20 halvings.
TrueModel generate_model(const ModelSpec& spec);

/// Class-1 rows first, then class-2 rows; y = mean + L z with L L' = Omega^{-1}.
Dataset sample_data(const TrueModel& m, std::size_t n1, std::size_t n2, std::uint64_t seed);

struct RecoveryMetrics {
  std::array<double, 2> auc{};       // class PPI vs true adjacency
  double auc_differential = 0.0;     // differential PPI vs true XOR
};

struct CallMetrics {
  std::size_t called = 0;
  std::size_t false_discoveries = 0;
  double fdp = 0.0;           // 0 for an empty call
  double sensitivity = 0.0;   // NaN when the truth has no edges
};

/// Area under the ROC curve by the Mann-Whitney statistic, ties counted 1/2.
/// NaN when either class of the truth is empty.
double edge_auc(const Matrix& scores, const Matrix& truth);

RecoveryMetrics score_recovery(const TrueModel& m, const PosteriorSummary& summary);
CallMetrics score_call(const TrueModel& m, const NetworkCall& call);

}  // namespace bggm
