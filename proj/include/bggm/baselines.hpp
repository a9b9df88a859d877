#pragma once

// Reference classifiers and the repeated stratified-split benchmark.

#include "bggm/sampler.hpp"

#include <memory>
#include <optional>
#include <span>

namespace bggm {

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual std::string name() const = 0;
  /// x: samples in rows. Throws ValidationError unless both classes are present.
  virtual void fit(const Matrix& x, std::span<const ClassLabel> y) = 0;
  virtual std::vector<ClassLabel> classify(const Matrix& x) const = 0;
};

/// Pooled full covariance, linear rule, log class priors.
class Lda : public Classifier {
 public:
  std::string name() const override { return "LDA"; }
  void fit(const Matrix& x, std::span<const ClassLabel> y) override;
  std::vector<ClassLabel> classify(const Matrix& x) const override;

 private:
  std::array<Vector, 2> mean_;
  std::array<double, 2> log_prior_{};
  Matrix precision_;
};

/// Pooled diagonal covariance.
class Dlda : public Classifier {
 public:
  std::string name() const override { return "DLDA"; }
  void fit(const Matrix& x, std::span<const ClassLabel> y) override;
  std::vector<ClassLabel> classify(const Matrix& x) const override;

 private:
  std::array<Vector, 2> mean_;
  std::array<double, 2> log_prior_{};
  Vector var_;
};

/// Per-class diagonal covariance, quadratic rule.
class Dqda : public Classifier {
 public:
  std::string name() const override { return "DQDA"; }
  void fit(const Matrix& x, std::span<const ClassLabel> y) override;
  std::vector<ClassLabel> classify(const Matrix& x) const override;

 private:
  std::array<Vector, 2> mean_;
  std::array<Vector, 2> var_;
  std::array<double, 2> log_prior_{};
};

/// Gaussian naive Bayes. Same decision rule as DQDA, computed as a sum of
/// univariate log-densities.
class GaussianNb : public Classifier {
 public:
  std::string name() const override { return "NBC"; }
  void fit(const Matrix& x, std::span<const ClassLabel> y) override;
  std::vector<ClassLabel> classify(const Matrix& x) const override;

 private:
  std::array<Vector, 2> mean_;
  std::array<Vector, 2> sd_;
  std::array<double, 2> prior_{};
};

/// Euclidean k-nearest neighbours; equal distances resolve to the lower
/// training index, a split vote to the nearest neighbour's label.
class Knn : public Classifier {
 public:
  explicit Knn(std::size_t k = 5) : k_(k) {}
  std::string name() const override { return "KNN"; }
  void fit(const Matrix& x, std::span<const ClassLabel> y) override;
  std::vector<ClassLabel> classify(const Matrix& x) const override;

 private:
  std::size_t k_;
  Matrix train_;
  std::vector<ClassLabel> labels_;
};

struct SplitPlan {
  std::size_t n_replicates = 100;
  double train_fraction = 0.66;
  std::uint64_t seed = 1;
  bool stratified = true;

  void validate() const;
};

struct Split {
  std::vector<Index> train;
  std::vector<Index> test;
};

/// Deterministic in (plan.seed, replicate). Stratified: each class contributes
/// round(train_fraction * n_class) training rows.
Split make_split(const std::vector<ClassLabel>& labels, const SplitPlan& plan, std::size_t replicate,
                 std::size_t attempt = 0);

struct BenchmarkResult {
  std::vector<std::string> classifiers;    // column order
  std::vector<std::vector<double>> errors; // [replicate][classifier], percent
  std::vector<double> mean;
  std::vector<double> sd;                  // sample sd (n - 1)
  std::size_t resampled = 0;               // degenerate splits redrawn
};

/// Baseline columns in table order: KNN, LDA, DLDA, DQDA, NBC.
std::vector<std::unique_ptr<Classifier>> standard_classifiers(std::size_t knn_k = 5);

/// Misclassification percentages over replicate splits. When `bggm_config` is
/// set, a BGBC column is appended: one chain per replicate with the test rows
/// as unknowns, predicted at cut 0.5. The chain seed is derived from the
/// replicate's stream.
BenchmarkResult benchmark(const Dataset& d, const SplitPlan& plan,
                          const std::vector<std::unique_ptr<Classifier>>& classifiers,
                          const std::optional<ChainConfig>& bggm_config,
                          const Hyperparameters* hyper = nullptr);

/// Percent of mismatches.
double misclassification_percent(std::span<const ClassLabel> truth, std::span<const ClassLabel> predicted);

}  // namespace bggm
