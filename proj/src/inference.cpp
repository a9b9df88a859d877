#include "bggm/inference.hpp"

#include "bggm/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace bggm {

std::string_view to_string(NetworkKind k) {
  switch (k) {
    case NetworkKind::class1: return "class1";
    case NetworkKind::class2: return "class2";
    case NetworkKind::differential: return "differential";
    case NetworkKind::conserved: return "conserved";
  }
  return "class1";
}

std::string_view to_string(EdgeSign s) { return s == EdgeSign::positive ? "positive" : "negative"; }

PosteriorSummary summarize(const ChainSamples& samples) {
  if (samples.draws.empty()) throw ValidationError("summarize: no draws");
  const Index p = samples.draws.front().lambda.rows();
  const std::size_t n_u = samples.draws.front().z_u.size();
  PosteriorSummary out;
  out.names = samples.names;
  out.unknown_rows = samples.unknown_rows;
  out.n_draws = samples.draws.size();
  out.ppi_diff = Matrix::Zero(p, p);
  out.class1_probability = Vector::Zero(static_cast<Index>(n_u));
  for (std::size_t k = 0; k < 2; ++k) {
    out.ppi[k] = Matrix::Zero(p, p);
    out.mean_partial_corr[k] = Matrix::Zero(p, p);
    out.bma_omega[k] = Matrix::Zero(p, p);
  }
  for (const Draw& d : samples.draws) {
    out.ppi_diff += d.lambda;
    for (std::size_t k = 0; k < 2; ++k) {
      out.ppi[k] += d.a[k];
      const Matrix c = d.a[k].cwiseProduct(d.r[k]);
      out.mean_partial_corr[k] -= c;
      out.bma_omega[k] += d.s[k].asDiagonal() * c * d.s[k].asDiagonal();
    }
    for (std::size_t o = 0; o < n_u; ++o)
      if (d.z_u[o] == ClassLabel::class1) out.class1_probability[static_cast<Index>(o)] += 1.0;
  }
  const double m = static_cast<double>(samples.draws.size());
  out.ppi_diff /= m;
  out.ppi_diff.diagonal().setZero();
  out.ppi_common = Matrix::Ones(p, p) - out.ppi_diff;
  out.ppi_common.diagonal().setZero();
  out.class1_probability /= m;
  for (std::size_t k = 0; k < 2; ++k) {
    out.ppi[k] /= m;
    out.ppi[k].diagonal().setZero();
    out.mean_partial_corr[k] /= m;
    out.mean_partial_corr[k].diagonal().setZero();
    out.bma_omega[k] /= m;
  }
  return out;
}

FdrThreshold fdr_threshold(std::span<const double> probs, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("fdr_threshold: alpha must lie in (0, 1)");
  if (probs.empty()) throw ValidationError("fdr_threshold: no probabilities");
  std::vector<double> sorted(probs.begin(), probs.end());
  for (double v : sorted)
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("fdr_threshold: probabilities must lie in [0, 1]");
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  FdrThreshold out;
  double q_sum = 0.0;
  for (std::size_t t = 0; t < sorted.size(); ++t) {
    q_sum += 1.0 - sorted[t];
    // mean q-value <= alpha, written without the division
    if (q_sum <= alpha * static_cast<double>(t + 1)) {
      out.selected = t + 1;
      out.phi = sorted[t];
    }
  }
  return out;
}

NetworkCall call_network(const PosteriorSummary& summary, NetworkKind which, double alpha) {
  const Index p = summary.p();
  const Matrix* ppi = nullptr;
  switch (which) {
    case NetworkKind::class1: ppi = &summary.ppi[0]; break;
    case NetworkKind::class2: ppi = &summary.ppi[1]; break;
    case NetworkKind::differential: ppi = &summary.ppi_diff; break;
    case NetworkKind::conserved: ppi = &summary.ppi_common; break;
  }
  // columnwise stacking of the strict upper triangle
  std::vector<double> stacked;
  std::vector<std::pair<Index, Index>> where;
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < j; ++i) {
      stacked.push_back((*ppi)(i, j));
      where.emplace_back(i, j);
    }
  }
  NetworkCall call;
  call.kind = which;
  call.alpha = alpha;
  const FdrThreshold thr = fdr_threshold(stacked, alpha);
  call.threshold = thr.phi;

  for (std::size_t t = 0; t < stacked.size(); ++t) {
    if (!(stacked[t] >= thr.phi)) continue;
    const auto [i, j] = where[t];
    CalledEdge e;
    e.i = i;
    e.j = j;
    e.ppi = stacked[t];
    switch (which) {
      case NetworkKind::class1: e.partial_corr = summary.mean_partial_corr[0](i, j); break;
      case NetworkKind::class2: e.partial_corr = summary.mean_partial_corr[1](i, j); break;
      case NetworkKind::differential: {
        const std::size_t k = summary.ppi[0](i, j) >= summary.ppi[1](i, j) ? 0 : 1;
        e.carrier = class_from_index(k);
        e.partial_corr = summary.mean_partial_corr[k](i, j);
        break;
      }
      case NetworkKind::conserved:
        e.partial_corr = 0.5 * (summary.mean_partial_corr[0](i, j) + summary.mean_partial_corr[1](i, j));
        break;
    }
    e.sign = e.partial_corr < 0.0 ? EdgeSign::negative : EdgeSign::positive;
    call.edges.push_back(e);
  }
  double top = 0.0;
  for (const auto& e : call.edges) top = std::max(top, std::abs(e.partial_corr));
  for (auto& e : call.edges) e.weight = top > 0.0 ? std::abs(e.partial_corr) / top : 0.0;
  return call;
}

std::vector<LabelPrediction> predict_labels(const PosteriorSummary& summary, double cut) {
  if (summary.class1_probability.size() == 0) throw ValidationError("predict_labels: the fitted run had no unknown samples");
  std::vector<LabelPrediction> out;
  for (Index o = 0; o < summary.class1_probability.size(); ++o) {
    const double prob = summary.class1_probability[o];
    const Index row = o < static_cast<Index>(summary.unknown_rows.size()) ? summary.unknown_rows[o] : o;
    out.push_back({row, prob >= cut ? ClassLabel::class1 : ClassLabel::class2, prob});
  }
  return out;
}

}  // namespace bggm
