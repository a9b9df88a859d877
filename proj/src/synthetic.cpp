#include "bggm/synthetic.hpp"

#include "bggm/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bggm {

std::string_view to_string(EdgeTruth t) {
  switch (t) {
    case EdgeTruth::null: return "null";
    case EdgeTruth::conserved: return "conserved";
    case EdgeTruth::differential_class1: return "differential_class1";
    case EdgeTruth::differential_class2: return "differential_class2";
  }
  return "null";
}

EdgeTruth TrueModel::truth(Index i, Index j) const {
  const bool e1 = adjacency[0](i, j) == 1.0;
  const bool e2 = adjacency[1](i, j) == 1.0;
  if (e1 && e2) return EdgeTruth::conserved;
  if (e1) return EdgeTruth::differential_class1;
  if (e2) return EdgeTruth::differential_class2;
  return EdgeTruth::null;
}

void TrueModel::validate() const {
  for (std::size_t k = 0; k < 2; ++k) {
    if (!is_positive_definite(omega[k])) throw PreconditionError("true model: Omega is not positive definite");
    for (Index i = 0; i < p; ++i) {
      if (!(s[k][i] > 0.0)) throw PreconditionError("true model: s must be positive");
      for (Index j = i + 1; j < p; ++j) {
        const bool edge = adjacency[k](i, j) == 1.0;
        if (edge != (partial_corr[k](i, j) != 0.0)) throw PreconditionError("true model: adjacency and values disagree");
        if (std::abs(omega[k](i, j)) > 0.0 && !edge) throw PreconditionError("true model: Omega has an unlisted edge");
      }
    }
  }
}

TrueModel generate_model(const ModelSpec& spec) {
  const Index p = spec.p;
  if (p < 2) throw ValidationError("generate_model: p must be at least 2");
  const std::size_t pairs = static_cast<std::size_t>(p * (p - 1) / 2);
  if (spec.n_conserved + spec.n_differential > pairs) throw ValidationError("generate_model: more edges than pairs");
  if (!(0.0 < spec.corr_lo && spec.corr_lo <= spec.corr_hi && spec.corr_hi < 1.0)) {
    throw ValidationError("generate_model: corr range must satisfy 0 < lo <= hi < 1");
  }
  if (!(0.0 < spec.s_lo && spec.s_lo <= spec.s_hi)) throw ValidationError("generate_model: bad s range");
  if (!(0.0 <= spec.min_eigenvalue && spec.min_eigenvalue < 1.0)) {
    throw ValidationError("generate_model: min_eigenvalue must be in [0, 1)");
  }

  Rng rng(spec.seed);
  TrueModel m;
  m.p = p;
  for (Index i = 0; i < p; ++i) m.names.push_back("P" + std::to_string(i + 1));

  std::vector<std::pair<Index, Index>> all;
  for (Index i = 0; i < p; ++i)
    for (Index j = i + 1; j < p; ++j) all.emplace_back(i, j);
  std::shuffle(all.begin(), all.end(), rng.engine());

  std::array<Matrix, 2> c{Matrix::Identity(p, p), Matrix::Identity(p, p)};
  auto admits = [&](Index i, Index j, double rho, std::initializer_list<std::size_t> classes) {
    bool ok = true;
    for (std::size_t k : classes) {
      Matrix trial = c[k] - spec.min_eigenvalue * Matrix::Identity(p, p);
      trial(i, j) = trial(j, i) = -rho;
      ok = ok && cholesky_log_det(trial).has_value();
    }
    return ok;
  };
  auto set = [&](Index i, Index j, double rho, std::initializer_list<std::size_t> classes) {
    for (std::size_t k : classes) c[k](i, j) = c[k](j, i) = -rho;
  };

  std::size_t next = 0;  // all[0, next) are used
  auto insert = [&](std::initializer_list<std::size_t> classes) {
    const double magnitude = rng.uniform(spec.corr_lo, spec.corr_hi);
    double rho = rng.bernoulli(0.5) ? magnitude : -magnitude;
    const std::size_t last = std::min(all.size(), next + std::max<std::size_t>(spec.placement_attempts, 1));
    for (std::size_t t = next; t < last; ++t) {
      if (admits(all[t].first, all[t].second, rho, classes)) {
        std::swap(all[next], all[t]);
        set(all[next].first, all[next].second, rho, classes);
        ++next;
        return;
      }
    }
    const auto [i, j] = all[next++];
    for (int halvings = 1; halvings <= 20; ++halvings) {
      rho *= 0.5;
      if (admits(i, j, rho, classes)) {
        set(i, j, rho, classes);
        ++m.shrunk_edges;
        return;
      }
    }
    ++m.dropped_edges;
  };

  for (std::size_t e = 0; e < spec.n_conserved; ++e) insert({0, 1});
  for (std::size_t e = 0; e < spec.n_differential; ++e) insert({e % 2 == 0 ? std::size_t{0} : std::size_t{1}});

  for (std::size_t k = 0; k < 2; ++k) {
    m.s[k] = Vector(p);
    for (Index i = 0; i < p; ++i) m.s[k][i] = rng.uniform(spec.s_lo, spec.s_hi);
    m.mean[k] = Vector::Zero(p);
    m.adjacency[k] = Matrix::Identity(p, p);
    m.partial_corr[k] = Matrix::Identity(p, p);
    for (Index i = 0; i < p; ++i) {
      for (Index j = 0; j < p; ++j) {
        if (i == j || c[k](i, j) == 0.0) continue;
        m.adjacency[k](i, j) = 1.0;
        m.partial_corr[k](i, j) = -c[k](i, j);
      }
    }
    m.omega[k] = m.s[k].asDiagonal() * c[k] * m.s[k].asDiagonal();
  }
  m.validate();
  return m;
}

Dataset sample_data(const TrueModel& m, std::size_t n1, std::size_t n2, std::uint64_t seed) {
  Rng rng(seed);
  const Index p = m.p;
  Dataset d;
  d.names = m.names;
  d.y.resize(static_cast<Index>(n1 + n2), p);
  const std::array<std::size_t, 2> counts{n1, n2};
  Index row = 0;
  for (std::size_t k = 0; k < 2; ++k) {
    const Matrix cov = m.omega[k].llt().solve(Matrix::Identity(p, p));
    const Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success) throw PreconditionError("sample_data: covariance is not positive definite");
    const Matrix l = llt.matrixL();
    for (std::size_t t = 0; t < counts[k]; ++t, ++row) {
      Vector z(p);
      for (Index i = 0; i < p; ++i) z[i] = rng.normal();
      d.y.row(row) = (m.mean[k] + l * z).transpose();
      d.labels.push_back(class_from_index(k));
    }
  }
  return d;
}

double edge_auc(const Matrix& scores, const Matrix& truth) {
  std::vector<double> pos, neg;
  for (Index i = 0; i < scores.rows(); ++i) {
    for (Index j = i + 1; j < scores.cols(); ++j) (truth(i, j) == 1.0 ? pos : neg).push_back(scores(i, j));
  }
  if (pos.empty() || neg.empty()) return std::numeric_limits<double>::quiet_NaN();
  double wins = 0.0;
  for (double a : pos)
    for (double b : neg) wins += a > b ? 1.0 : (a == b ? 0.5 : 0.0);
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

RecoveryMetrics score_recovery(const TrueModel& m, const PosteriorSummary& summary) {
  if (summary.p() != m.p) throw ValidationError("score_recovery: dimension mismatch");
  RecoveryMetrics out;
  for (std::size_t k = 0; k < 2; ++k) out.auc[k] = edge_auc(summary.ppi[k], m.adjacency[k]);
  Matrix diff = (m.adjacency[0] - m.adjacency[1]).cwiseAbs();
  out.auc_differential = edge_auc(summary.ppi_diff, diff);
  return out;
}

CallMetrics score_call(const TrueModel& m, const NetworkCall& call) {
  auto is_true = [&](Index i, Index j) {
    const EdgeTruth t = m.truth(i, j);
    switch (call.kind) {
      case NetworkKind::class1: return m.adjacency[0](i, j) == 1.0;
      case NetworkKind::class2: return m.adjacency[1](i, j) == 1.0;
      case NetworkKind::differential: return t == EdgeTruth::differential_class1 || t == EdgeTruth::differential_class2;
      case NetworkKind::conserved: return t == EdgeTruth::conserved || t == EdgeTruth::null;
    }
    return false;
  };
  CallMetrics out;
  std::size_t n_true = 0;
  for (Index i = 0; i < m.p; ++i)
    for (Index j = i + 1; j < m.p; ++j) n_true += is_true(i, j);
  std::size_t hits = 0;
  for (const auto& e : call.edges) {
    ++out.called;
    if (is_true(e.i, e.j)) {
      ++hits;
    } else {
      ++out.false_discoveries;
    }
  }
  out.fdp = out.called == 0 ? 0.0 : static_cast<double>(out.false_discoveries) / static_cast<double>(out.called);
  out.sensitivity = n_true == 0 ? std::numeric_limits<double>::quiet_NaN()
                                : static_cast<double>(hits) / static_cast<double>(n_true);
  return out;
}

}  // namespace bggm
