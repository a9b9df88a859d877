#include "bggm/sampler.hpp"

#include "bggm/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bggm {

namespace {

constexpr double kInitShrinkage = 0.2;

Vector class_mean(const Dataset& d, const std::vector<Index>& rows) {
  Vector m = Vector::Zero(d.p());
  for (Index r : rows) m += d.y.row(r).transpose();
  if (!rows.empty()) m /= static_cast<double>(rows.size());
  return m;
}

}  // namespace

void ChainConfig::validate() const {
  if (iterations == 0) throw ValidationError("chain config: iterations must be positive");
  if (burn_in + 1 > iterations) throw ValidationError("chain config: burn_in must be smaller than iterations");
  if (thin == 0 || thin > iterations - burn_in) throw ValidationError("chain config: thin out of range");
  if (!(s_proposal_sd > 0.0) || !std::isfinite(s_proposal_sd)) throw ValidationError("chain config: s_proposal_sd must be positive");
  if (!(r_step > 0.0) || !std::isfinite(r_step)) throw ValidationError("chain config: r_step must be positive");
}

Hyperparameters resolve_hyperparameters(Hyperparameters h, const Dataset& d) {
  if (!h.center_mu0) return h;
  for (std::size_t k = 0; k < 2; ++k) {
    const auto rows = d.rows_with(class_from_index(k));
    if (!rows.empty()) h.mu0[k] = class_mean(d, rows);
  }
  h.center_mu0 = false;
  return h;
}

ChainState init_state(const Dataset& d, const Hyperparameters& h, std::uint64_t /*seed*/) {
  // Initialization is deterministic; the seed is accepted for interface symmetry with run_chain.
  const Index p = d.p();
  ChainState st;
  const bool prior_only = d.n() == 0;
  for (std::size_t k = 0; k < 2; ++k) {
    ClassState& c = st.cls[k];
    c.a = Matrix::Identity(p, p);
    c.q = h.edge_a[k].cwiseQuotient(h.edge_a[k] + h.edge_b[k]);
    c.q.diagonal().setConstant(0.5);
    if (prior_only) {
      c.r = Matrix::Identity(p, p);
      c.s = Vector::Ones(p);
      c.mu = h.mu0[k];
      continue;
    }
    const auto rows = d.rows_with(class_from_index(k));
    if (rows.size() < 2) {
      throw ValidationError("init: class" + std::to_string(k + 1) + " needs at least 2 labeled samples");
    }
    c.mu = class_mean(d, rows);
    Matrix cov = Matrix::Zero(p, p);
    for (Index r : rows) {
      const Vector dv = d.y.row(r).transpose() - c.mu;
      cov.noalias() += dv * dv.transpose();
    }
    cov /= static_cast<double>(rows.size());
    Vector diag = cov.diagonal();
    const double floor = std::max(1e-12, 1e-6 * diag.mean());
    diag = diag.cwiseMax(floor);
    Matrix shrunk = (1.0 - kInitShrinkage) * cov;
    shrunk.diagonal() = diag;
    const Matrix prec = shrunk.llt().solve(Matrix::Identity(p, p));
    const Vector root = prec.diagonal().cwiseMax(1e-300).cwiseSqrt();
    // consistent with the empty starting graph: Omega = diag(1 / var)
    c.s = diag.cwiseSqrt().cwiseInverse();
    Matrix r = root.cwiseInverse().asDiagonal() * prec * root.cwiseInverse().asDiagonal();
    r = (0.5 * (r + r.transpose())).eval().cwiseMax(-1.0).cwiseMin(1.0);
    r.diagonal().setOnes();
    while (!cholesky_log_det(r)) {
      Matrix off = 0.9 * r;
      off.diagonal().setOnes();
      r = off;
    }
    c.r = r;
  }

  st.lambda = Matrix::Zero(p, p);
  st.pi = h.diff_e.cwiseQuotient(h.diff_e + h.diff_f);
  st.pi.diagonal().setConstant(0.5);

  const auto unknown = d.rows_with(ClassLabel::unknown);
  st.h = Vector::Constant(static_cast<Index>(unknown.size()), h.label_eta / (h.label_eta + h.label_zeta));
  for (Index r : unknown) {
    const Vector y = d.y.row(r).transpose();
    const double d1 = (y - st.cls[0].mu).squaredNorm();
    const double d2 = (y - st.cls[1].mu).squaredNorm();
    st.z_u.push_back(d1 <= d2 ? ClassLabel::class1 : ClassLabel::class2);
  }
  return st;
}

Sampler::Sampler(const Dataset& d, Hyperparameters h, ChainConfig cfg, ChainState st)
    : d_(d), h_(std::move(h)), cfg_(cfg), st_(std::move(st)), unknown_rows_(d.rows_with(ClassLabel::unknown)) {
  if (st_.z_u.size() != unknown_rows_.size()) throw ValidationError("sampler: state does not match dataset unknowns");
  if (st_.p() != d_.p()) throw ValidationError("sampler: state dimension does not match dataset");
  label_prob_ = Vector::Constant(static_cast<Index>(unknown_rows_.size()), 0.5);
  refresh_membership();
  for (std::size_t k = 0; k < 2; ++k) {
    refresh_correlation(k);
    refresh_scatter(k);
  }
}

void Sampler::refresh_membership() {
  for (auto& m : members_) m.clear();
  for (Index r = 0; r < d_.n(); ++r) {
    if (d_.labels[r] != ClassLabel::unknown) members_[class_index(d_.labels[r])].push_back(r);
  }
  for (std::size_t o = 0; o < unknown_rows_.size(); ++o) {
    members_[class_index(st_.z_u[o])].push_back(unknown_rows_[o]);
  }
  for (auto& m : members_) std::sort(m.begin(), m.end());
}

void Sampler::refresh_scatter(std::size_t k) {
  const Index p = d_.p();
  const auto& rows = members_[k];
  Matrix x(static_cast<Index>(rows.size()), p);
  for (Index t = 0; t < x.rows(); ++t) x.row(t) = d_.y.row(rows[t]) - st_.cls[k].mu.transpose();
  scatter_[k] = Matrix::Zero(p, p);
  scatter_[k].selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
  scatter_[k] = scatter_[k].selfadjointView<Eigen::Lower>();
}

void Sampler::refresh_correlation(std::size_t k) {
  c_[k] = hadamard(st_.cls[k].a, st_.cls[k].r);
  const auto ld = cholesky_log_det(c_[k]);
  if (!ld) throw PreconditionError("sampler: class" + std::to_string(k + 1) + " A .* R is not positive definite");
  log_det_c_[k] = *ld;
}

Precision Sampler::precision(std::size_t k) const {
  const Vector& s = st_.cls[k].s;
  return {s.asDiagonal() * c_[k] * s.asDiagonal(), 2.0 * s.array().log().sum() + log_det_c_[k]};
}

double Sampler::log_likelihood() const {
  double total = 0.0;
  for (std::size_t k = 0; k < 2; ++k) {
    const Precision pr = precision(k);
    for (Index r : members_[k]) total += mvn_logpdf(d_.y.row(r).transpose(), st_.cls[k].mu, pr.omega, pr.log_det);
  }
  return total;
}

void Sampler::update_edge(Index i, Index j, Rng& rng) {
  if (!(i < j) || i < 0 || j >= d_.p()) throw ValidationError("update_edge: need 0 <= i < j < p");
  ++acc_.edge.attempted;

  std::array<Interval, 2> window;
  for (std::size_t k = 0; k < 2; ++k) window[k] = admissible_interval(c_[k], i, j).shrunk(kIntervalShrink);

  // coupled prior over the four (a1, a2) cells
  const double q1 = st_.cls[0].q(i, j);
  const double q2 = st_.cls[1].q(i, j);
  const double pd = st_.pi(i, j);
  std::array<double, 4> weight{};
  for (int cell = 0; cell < 4; ++cell) {
    const int a1 = cell >> 1, a2 = cell & 1;
    weight[cell] = (a1 ? q1 : 1.0 - q1) * (a2 ? q2 : 1.0 - q2) * ((a1 != a2) ? pd : 1.0 - pd);
  }
  const double total = weight[0] + weight[1] + weight[2] + weight[3];
  double u = rng.uniform() * total;
  int cell = 3;
  for (int c = 0; c < 4; ++c) {
    if (u < weight[c]) {
      cell = c;
      break;
    }
    u -= weight[c];
  }
  const std::array<int, 2> a_new{cell >> 1, cell & 1};

  std::array<double, 2> r_new{};
  std::array<double, 2> c_new{};
  bool feasible = true;
  for (std::size_t k = 0; k < 2; ++k) {
    const ClassState& cs = st_.cls[k];
    const Interval& w = window[k];
    const bool was_active = cs.a(i, j) == 1.0;
    if (a_new[k] == 1) {
      if (w.empty()) {
        feasible = false;
        break;
      }
      if (was_active && cfg_.refine_active_edges) {
        // staying active: the value is moved by refine_edge_value instead
        r_new[k] = cs.r(i, j);
      } else if (was_active && cfg_.r_proposal == RProposal::random_walk) {
        r_new[k] = cs.r(i, j) + cfg_.r_step * rng.normal();
        if (!w.contains(r_new[k])) {
          feasible = false;
          break;
        }
      } else {
        r_new[k] = rng.uniform(w.lower, w.upper);
      }
      c_new[k] = r_new[k];
    } else {
      if (!w.contains(0.0)) {
        feasible = false;
        break;
      }
      r_new[k] = rng.uniform(w.lower, w.upper);
      c_new[k] = 0.0;
    }
  }
  if (!feasible) {
    ++acc_.edge.infeasible;
    return;
  }

  std::array<double, 2> ld_new = log_det_c_;
  double log_ratio = 0.0;
  for (std::size_t k = 0; k < 2; ++k) {
    const double c_old = c_[k](i, j);
    if (c_new[k] == c_old) continue;
    Matrix& c = c_[k];
    c(i, j) = c(j, i) = c_new[k];
    const auto ld = cholesky_log_det(c);
    c(i, j) = c(j, i) = c_old;
    if (!ld) {
      ++acc_.edge.infeasible;
      return;
    }
    ld_new[k] = *ld;
    const double n_k = static_cast<double>(members_[k].size());
    const Vector& s = st_.cls[k].s;
    log_ratio += 0.5 * n_k * (ld_new[k] - log_det_c_[k]) - s[i] * s[j] * (c_new[k] - c_old) * scatter_[k](i, j);
  }
  if (!std::isfinite(log_ratio)) return;
  if (log_ratio < 0.0 && std::log(rng.uniform()) >= log_ratio) return;

  ++acc_.edge.accepted;
  for (std::size_t k = 0; k < 2; ++k) {
    ClassState& cs = st_.cls[k];
    cs.a(i, j) = cs.a(j, i) = static_cast<double>(a_new[k]);
    cs.r(i, j) = cs.r(j, i) = r_new[k];
    c_[k](i, j) = c_[k](j, i) = c_new[k];
    log_det_c_[k] = ld_new[k];
  }
  const double lam = (a_new[0] != a_new[1]) ? 1.0 : 0.0;
  st_.lambda(i, j) = st_.lambda(j, i) = lam;
}

void Sampler::refine_edge_value(Index i, Index j, Rng& rng) {
  for (std::size_t k = 0; k < 2; ++k) {
    ClassState& cs = st_.cls[k];
    if (cs.a(i, j) != 1.0) continue;
    ++acc_.refine.attempted;
    const Interval w = admissible_interval(c_[k], i, j).shrunk(kIntervalShrink);
    const double c_old = c_[k](i, j);
    const double c_new = c_old + cfg_.r_step * rng.normal();
    if (!w.contains(c_new)) {
      ++acc_.refine.infeasible;
      continue;
    }
    Matrix& c = c_[k];
    c(i, j) = c(j, i) = c_new;
    const auto ld = cholesky_log_det(c);
    if (!ld) {
      c(i, j) = c(j, i) = c_old;
      ++acc_.refine.infeasible;
      continue;
    }
    const double n_k = static_cast<double>(members_[k].size());
    const Vector& s = cs.s;
    const double log_ratio =
        0.5 * n_k * (*ld - log_det_c_[k]) - s[i] * s[j] * (c_new - c_old) * scatter_[k](i, j);
    if (std::isfinite(log_ratio) && (log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio)) {
      cs.r(i, j) = cs.r(j, i) = c_new;
      log_det_c_[k] = *ld;
      ++acc_.refine.accepted;
    } else {
      c(i, j) = c(j, i) = c_old;
    }
  }
}

void Sampler::update_s(Index i, Rng& rng) {
  if (i < 0 || i >= d_.p()) throw ValidationError("update_s: index out of range");
  for (std::size_t k = 0; k < 2; ++k) {
    ++acc_.s.attempted;
    Vector& s = st_.cls[k].s;
    const Matrix& w = scatter_[k];
    const Matrix& c = c_[k];
    double cross = 0.0;
    for (Index b = 0; b < d_.p(); ++b)
      if (b != i) cross += s[b] * c(i, b) * w(i, b);
    const double n_k = static_cast<double>(members_[k].size());
    // log target in t = log s, including the Jacobian
    auto log_target = [&](double x) {
      return (n_k - h_.s_shape) * std::log(x) - 0.5 * (x * x * w(i, i) + 2.0 * x * cross) - h_.s_scale / x;
    };
    const double cur = s[i];
    const double prop = cur * std::exp(cfg_.s_proposal_sd * rng.normal());
    const double log_ratio = log_target(prop) - log_target(cur);
    if (!std::isfinite(log_ratio) || !(prop > 0.0) || !std::isfinite(prop)) continue;
    if (log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio) {
      s[i] = prop;
      ++acc_.s.accepted;
    }
  }
}

void Sampler::update_mu(Rng& rng) {
  const Index p = d_.p();
  for (std::size_t k = 0; k < 2; ++k) {
    const Precision pr = precision(k);
    Vector ysum = Vector::Zero(p);
    for (Index r : members_[k]) ysum += d_.y.row(r).transpose();
    const double n_k = static_cast<double>(members_[k].size());
    const Matrix post_prec = h_.b0[k] + n_k * pr.omega;
    const Vector rhs = h_.b0[k] * h_.mu0[k] + pr.omega * ysum;
    const Eigen::LLT<Matrix> llt(post_prec);
    if (llt.info() != Eigen::Success) throw NumericalError("update_mu: posterior precision is not positive definite");
    const Vector mean = llt.solve(rhs);
    Vector z(p);
    for (Index t = 0; t < p; ++t) z[t] = rng.normal();
    st_.cls[k].mu = mean + llt.matrixU().solve(z);
    refresh_scatter(k);
  }
}

void Sampler::update_q_pi(Rng& rng) {
  const Index p = d_.p();
  for (Index i = 0; i < p; ++i) {
    for (Index j = i + 1; j < p; ++j) {
      for (std::size_t k = 0; k < 2; ++k) {
        const double a = st_.cls[k].a(i, j);
        const double q = rng.beta(h_.edge_a[k](i, j) + a, h_.edge_b[k](i, j) + 1.0 - a);
        st_.cls[k].q(i, j) = st_.cls[k].q(j, i) = std::clamp(q, 1e-300, 1.0 - 1e-16);
      }
      const double lam = st_.lambda(i, j);
      const double pi = rng.beta(h_.diff_e(i, j) + lam, h_.diff_f(i, j) + 1.0 - lam);
      st_.pi(i, j) = st_.pi(j, i) = std::clamp(pi, 1e-300, 1.0 - 1e-16);
    }
  }
}

void Sampler::update_labels(Rng& rng) {
  if (unknown_rows_.empty()) return;
  const std::array<Precision, 2> pr{precision(0), precision(1)};
  for (std::size_t o = 0; o < unknown_rows_.size(); ++o) {
    const Vector y = d_.y.row(unknown_rows_[o]).transpose();
    const double h = st_.h[o];
    const double l1 = std::log(h) + mvn_logpdf(y, st_.cls[0].mu, pr[0].omega, pr[0].log_det);
    const double l2 = std::log1p(-h) + mvn_logpdf(y, st_.cls[1].mu, pr[1].omega, pr[1].log_det);
    const double top = std::max(l1, l2);
    const double e1 = std::exp(l1 - top);
    const double e2 = std::exp(l2 - top);
    double p1 = e1 / (e1 + e2);
    if (!std::isfinite(p1)) p1 = h;
    label_prob_[static_cast<Index>(o)] = p1;
    const bool is_one = rng.uniform() < p1;
    st_.z_u[o] = is_one ? ClassLabel::class1 : ClassLabel::class2;
    const double hn = rng.beta(h_.label_eta + (is_one ? 1.0 : 0.0), h_.label_zeta + (is_one ? 0.0 : 1.0));
    st_.h[static_cast<Index>(o)] = std::clamp(hn, 1e-300, 1.0 - 1e-16);
  }
  refresh_membership();
  for (std::size_t k = 0; k < 2; ++k) refresh_scatter(k);
}

void Sampler::sweep(Rng& rng) {
  const Index p = d_.p();
  for (Index i = 0; i < p; ++i)
    for (Index j = i + 1; j < p; ++j) {
      update_edge(i, j, rng);
      if (cfg_.refine_active_edges) refine_edge_value(i, j, rng);
    }
  for (Index i = 0; i < p; ++i) update_s(i, rng);
  update_mu(rng);
  update_q_pi(rng);
  update_labels(rng);
}

void Sampler::check_finite() const {
  bool ok = std::isfinite(log_det_c_[0]) && std::isfinite(log_det_c_[1]);
  for (const auto& c : st_.cls) ok = ok && c.s.allFinite() && c.mu.allFinite() && c.r.allFinite();
  ok = ok && scatter_[0].allFinite() && scatter_[1].allFinite();
  if (!ok) throw NumericalError("non-finite chain state; dump: " + serialize_state(st_));
}

ChainSamples run_chain(const Dataset& d, const Hyperparameters& h, const ChainConfig& cfg) {
  cfg.validate();
  h.validate();
  if (h.p() != d.p()) throw ValidationError("run_chain: hyperparameters do not match dataset dimension");
  d.validate(d.n() > 0);

  const Hyperparameters resolved = resolve_hyperparameters(h, d);
  Sampler sampler(d, resolved, cfg, init_state(d, resolved, cfg.seed));
  Rng rng(cfg.seed);

  ChainSamples out;
  out.config = cfg;
  out.names = d.names;
  out.unknown_rows = d.rows_with(ClassLabel::unknown);
  out.draws.reserve(cfg.retained());
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    sampler.sweep(rng);
    sampler.check_finite();
    if (cfg.check_invariants) out.invariant_violations += validate_state(sampler.state()).size();
    if (it < cfg.burn_in || (it - cfg.burn_in + 1) % cfg.thin != 0) continue;
    const ChainState& st = sampler.state();
    Draw dr;
    for (std::size_t k = 0; k < 2; ++k) {
      dr.a[k] = st.cls[k].a;
      dr.r[k] = st.cls[k].r;
      dr.s[k] = st.cls[k].s;
      dr.mu[k] = st.cls[k].mu;
    }
    dr.lambda = st.lambda;
    dr.z_u = st.z_u;
    out.draws.push_back(std::move(dr));
  }
  out.acceptance = sampler.acceptance();
  return out;
}

}  // namespace bggm
