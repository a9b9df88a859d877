#include "bggm/baselines.hpp"

#include "bggm/error.hpp"
#include "bggm/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace bggm {

namespace {

struct ClassStats {
  std::array<Vector, 2> mean;
  std::array<Matrix, 2> scatter;  // about the class mean
  std::array<std::size_t, 2> count{};
};

ClassStats class_stats(const Matrix& x, std::span<const ClassLabel> y) {
  if (static_cast<Index>(y.size()) != x.rows()) throw ValidationError("classifier: one label per row required");
  const Index p = x.cols();
  ClassStats st;
  for (std::size_t k = 0; k < 2; ++k) {
    st.mean[k] = Vector::Zero(p);
    st.scatter[k] = Matrix::Zero(p, p);
  }
  for (Index r = 0; r < x.rows(); ++r) {
    if (y[r] == ClassLabel::unknown) throw ValidationError("classifier: training labels must be known");
    const std::size_t k = class_index(y[r]);
    st.mean[k] += x.row(r).transpose();
    ++st.count[k];
  }
  if (st.count[0] == 0 || st.count[1] == 0) throw ValidationError("classifier: training data must contain both classes");
  for (std::size_t k = 0; k < 2; ++k) st.mean[k] /= static_cast<double>(st.count[k]);
  for (Index r = 0; r < x.rows(); ++r) {
    const std::size_t k = class_index(y[r]);
    const Vector d = x.row(r).transpose() - st.mean[k];
    st.scatter[k].noalias() += d * d.transpose();
  }
  return st;
}

std::array<double, 2> log_priors(const ClassStats& st) {
  const double n = static_cast<double>(st.count[0] + st.count[1]);
  return {std::log(st.count[0] / n), std::log(st.count[1] / n)};
}

// Replaces zero variances by a small fraction of the average variance.
Vector floored(Vector v) {
  const double avg = v.mean();
  const double floor = avg > 0.0 ? 1e-6 * avg : 1e-12;
  return v.cwiseMax(floor);
}

ClassLabel pick(double score1, double score2) { return score1 >= score2 ? ClassLabel::class1 : ClassLabel::class2; }

}  // namespace

void Lda::fit(const Matrix& x, std::span<const ClassLabel> y) {
  const ClassStats st = class_stats(x, y);
  const Index p = x.cols();
  const double dof = std::max<double>(1.0, static_cast<double>(st.count[0] + st.count[1]) - 2.0);
  Matrix pooled = (st.scatter[0] + st.scatter[1]) / dof;
  Eigen::LLT<Matrix> llt(pooled);
  const double rcond = llt.info() == Eigen::Success ? llt.rcond() : 0.0;
  if (llt.info() != Eigen::Success || rcond < 1e-12) {
    pooled.diagonal().array() += 1e-6 * pooled.trace() / static_cast<double>(p) + 1e-12;
    llt.compute(pooled);
  }
  precision_ = llt.solve(Matrix::Identity(p, p));
  mean_ = st.mean;
  log_prior_ = log_priors(st);
}

std::vector<ClassLabel> Lda::classify(const Matrix& x) const {
  std::vector<ClassLabel> out;
  std::array<Vector, 2> w;
  std::array<double, 2> b{};
  for (std::size_t k = 0; k < 2; ++k) {
    w[k] = precision_ * mean_[k];
    b[k] = -0.5 * mean_[k].dot(w[k]) + log_prior_[k];
  }
  for (Index r = 0; r < x.rows(); ++r) {
    const Vector v = x.row(r).transpose();
    out.push_back(pick(v.dot(w[0]) + b[0], v.dot(w[1]) + b[1]));
  }
  return out;
}

void Dlda::fit(const Matrix& x, std::span<const ClassLabel> y) {
  const ClassStats st = class_stats(x, y);
  const double dof = std::max<double>(1.0, static_cast<double>(st.count[0] + st.count[1]) - 2.0);
  var_ = floored((st.scatter[0] + st.scatter[1]).diagonal() / dof);
  mean_ = st.mean;
  log_prior_ = log_priors(st);
}

std::vector<ClassLabel> Dlda::classify(const Matrix& x) const {
  std::vector<ClassLabel> out;
  for (Index r = 0; r < x.rows(); ++r) {
    std::array<double, 2> score{};
    for (std::size_t k = 0; k < 2; ++k) {
      const Vector d = x.row(r).transpose() - mean_[k];
      score[k] = -0.5 * d.cwiseProduct(d).cwiseQuotient(var_).sum() + log_prior_[k];
    }
    out.push_back(pick(score[0], score[1]));
  }
  return out;
}

void Dqda::fit(const Matrix& x, std::span<const ClassLabel> y) {
  const ClassStats st = class_stats(x, y);
  for (std::size_t k = 0; k < 2; ++k) {
    const double dof = std::max<double>(1.0, static_cast<double>(st.count[k]) - 1.0);
    var_[k] = floored(st.scatter[k].diagonal() / dof);
  }
  mean_ = st.mean;
  log_prior_ = log_priors(st);
}

std::vector<ClassLabel> Dqda::classify(const Matrix& x) const {
  std::vector<ClassLabel> out;
  std::array<double, 2> log_det{};
  for (std::size_t k = 0; k < 2; ++k) log_det[k] = var_[k].array().log().sum();
  for (Index r = 0; r < x.rows(); ++r) {
    std::array<double, 2> score{};
    for (std::size_t k = 0; k < 2; ++k) {
      const Vector d = x.row(r).transpose() - mean_[k];
      score[k] = -0.5 * d.cwiseProduct(d).cwiseQuotient(var_[k]).sum() - 0.5 * log_det[k] + log_prior_[k];
    }
    out.push_back(pick(score[0], score[1]));
  }
  return out;
}

void GaussianNb::fit(const Matrix& x, std::span<const ClassLabel> y) {
  const ClassStats st = class_stats(x, y);
  const double n = static_cast<double>(st.count[0] + st.count[1]);
  for (std::size_t k = 0; k < 2; ++k) {
    const double dof = std::max<double>(1.0, static_cast<double>(st.count[k]) - 1.0);
    sd_[k] = floored(st.scatter[k].diagonal() / dof).cwiseSqrt();
    prior_[k] = static_cast<double>(st.count[k]) / n;
  }
  mean_ = st.mean;
}

std::vector<ClassLabel> GaussianNb::classify(const Matrix& x) const {
  std::vector<ClassLabel> out;
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  for (Index r = 0; r < x.rows(); ++r) {
    std::array<double, 2> log_post{};
    for (std::size_t k = 0; k < 2; ++k) {
      double acc = std::log(prior_[k]);
      for (Index f = 0; f < x.cols(); ++f) {
        const double z = (x(r, f) - mean_[k][f]) / sd_[k][f];
        acc += -half_log_2pi - std::log(sd_[k][f]) - 0.5 * z * z;
      }
      log_post[k] = acc;
    }
    out.push_back(pick(log_post[0], log_post[1]));
  }
  return out;
}

void Knn::fit(const Matrix& x, std::span<const ClassLabel> y) {
  class_stats(x, y);  // validation only
  if (k_ == 0) throw ValidationError("KNN: k must be positive");
  train_ = x;
  labels_.assign(y.begin(), y.end());
}

std::vector<ClassLabel> Knn::classify(const Matrix& x) const {
  std::vector<ClassLabel> out;
  const std::size_t n = labels_.size();
  const std::size_t k = std::min(k_, n);
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (Index r = 0; r < x.rows(); ++r) {
    for (std::size_t t = 0; t < n; ++t) dist[t] = {(train_.row(static_cast<Index>(t)) - x.row(r)).squaredNorm(), t};
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    std::size_t votes1 = 0;
    for (std::size_t t = 0; t < k; ++t)
      if (labels_[dist[t].second] == ClassLabel::class1) ++votes1;
    const std::size_t votes2 = k - votes1;
    if (votes1 != votes2) {
      out.push_back(votes1 > votes2 ? ClassLabel::class1 : ClassLabel::class2);
    } else {
      out.push_back(labels_[dist[0].second]);
    }
  }
  return out;
}

void SplitPlan::validate() const {
  if (n_replicates < 1) throw ValidationError("split plan: need at least one replicate");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ValidationError("split plan: train_fraction must lie in (0, 1)");
}

Split make_split(const std::vector<ClassLabel>& labels, const SplitPlan& plan, std::size_t replicate,
                 std::size_t attempt) {
  Rng rng = Rng(plan.seed).split(replicate).split(attempt);
  Split out;
  auto take = [&](std::vector<Index> pool) {
    std::shuffle(pool.begin(), pool.end(), rng.engine());
    const auto n_train = static_cast<std::size_t>(std::lround(plan.train_fraction * static_cast<double>(pool.size())));
    for (std::size_t t = 0; t < pool.size(); ++t) (t < n_train ? out.train : out.test).push_back(pool[t]);
  };
  if (plan.stratified) {
    for (ClassLabel c : {ClassLabel::class1, ClassLabel::class2}) {
      std::vector<Index> pool;
      for (Index r = 0; r < static_cast<Index>(labels.size()); ++r)
        if (labels[r] == c) pool.push_back(r);
      take(std::move(pool));
    }
  } else {
    std::vector<Index> pool(labels.size());
    std::iota(pool.begin(), pool.end(), Index{0});
    take(std::move(pool));
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

double misclassification_percent(std::span<const ClassLabel> truth, std::span<const ClassLabel> predicted) {
  if (truth.size() != predicted.size() || truth.empty()) throw ValidationError("misclassification: size mismatch");
  std::size_t wrong = 0;
  for (std::size_t t = 0; t < truth.size(); ++t) wrong += truth[t] != predicted[t];
  return 100.0 * static_cast<double>(wrong) / static_cast<double>(truth.size());
}

std::vector<std::unique_ptr<Classifier>> standard_classifiers(std::size_t knn_k) {
  std::vector<std::unique_ptr<Classifier>> out;
  out.push_back(std::make_unique<Knn>(knn_k));
  out.push_back(std::make_unique<Lda>());
  out.push_back(std::make_unique<Dlda>());
  out.push_back(std::make_unique<Dqda>());
  out.push_back(std::make_unique<GaussianNb>());
  return out;
}

BenchmarkResult benchmark(const Dataset& d, const SplitPlan& plan,
                          const std::vector<std::unique_ptr<Classifier>>& classifiers,
                          const std::optional<ChainConfig>& bggm_config, const Hyperparameters* hyper) {
  plan.validate();
  d.validate(true);
  if (!d.rows_with(ClassLabel::unknown).empty()) throw ValidationError("benchmark: every sample must be labeled");

  BenchmarkResult res;
  for (const auto& c : classifiers) res.classifiers.push_back(c->name());
  if (bggm_config) res.classifiers.push_back("BGBC");
  const Hyperparameters base = hyper ? *hyper : default_hyperparameters(d.p());

  for (std::size_t rep = 0; rep < plan.n_replicates; ++rep) {
    Split split;
    for (std::size_t attempt = 0;; ++attempt) {
      if (attempt == 100) throw ValidationError("benchmark: cannot draw a split with both classes in train and test");
      split = make_split(d.labels, plan, rep, attempt);
      std::array<std::size_t, 2> n_train{};
      for (Index r : split.train) ++n_train[class_index(d.labels[r])];
      if (n_train[0] >= 2 && n_train[1] >= 2 && !split.test.empty()) break;
      ++res.resampled;
    }
    Matrix x_train(static_cast<Index>(split.train.size()), d.p());
    Matrix x_test(static_cast<Index>(split.test.size()), d.p());
    std::vector<ClassLabel> y_train, y_test;
    for (std::size_t t = 0; t < split.train.size(); ++t) {
      x_train.row(static_cast<Index>(t)) = d.y.row(split.train[t]);
      y_train.push_back(d.labels[split.train[t]]);
    }
    for (std::size_t t = 0; t < split.test.size(); ++t) {
      x_test.row(static_cast<Index>(t)) = d.y.row(split.test[t]);
      y_test.push_back(d.labels[split.test[t]]);
    }

    std::vector<double> row;
    for (const auto& c : classifiers) {
      c->fit(x_train, y_train);
      row.push_back(misclassification_percent(y_test, c->classify(x_test)));
    }
    if (bggm_config) {
      Dataset masked = d;
      for (Index r : split.test) masked.labels[r] = ClassLabel::unknown;
      ChainConfig cfg = *bggm_config;
      cfg.seed = Rng(plan.seed).split(rep).split(1u << 20).seed();
      const PosteriorSummary summary = summarize(run_chain(masked, base, cfg));
      std::vector<ClassLabel> predicted;
      for (const auto& pr : predict_labels(summary)) predicted.push_back(pr.label);
      row.push_back(misclassification_percent(y_test, predicted));
    }
    res.errors.push_back(std::move(row));
  }

  const std::size_t m = res.classifiers.size();
  const double reps = static_cast<double>(res.errors.size());
  res.mean.assign(m, 0.0);
  res.sd.assign(m, 0.0);
  for (std::size_t c = 0; c < m; ++c) {
    for (const auto& row : res.errors) res.mean[c] += row[c];
    res.mean[c] /= reps;
    if (res.errors.size() > 1) {
      double ss = 0.0;
      for (const auto& row : res.errors) ss += (row[c] - res.mean[c]) * (row[c] - res.mean[c]);
      res.sd[c] = std::sqrt(ss / (reps - 1.0));
    }
  }
  return res;
}

}  // namespace bggm
