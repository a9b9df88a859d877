#include "bggm/error.hpp"
#include "bggm/sampler.hpp"
#include "bggm/synthetic.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace bggm;

namespace {

// Rows from N(mean, Omega^{-1}) with the given label.
void append_rows(Dataset& d, Rng& rng, const Vector& mean, const Matrix& omega, int n, ClassLabel label) {
  const Matrix l = Eigen::LLT<Matrix>(oracle::inverse(omega)).matrixL();
  const Index p = mean.size();
  const Index start = d.y.rows();
  Matrix grown(start + n, p);
  grown.topRows(start) = d.y;
  for (int t = 0; t < n; ++t) {
    Vector z(p);
    for (Index i = 0; i < p; ++i) z[i] = rng.normal();
    grown.row(start + t) = (mean + l * z).transpose();
    d.labels.push_back(label);
  }
  d.y = grown;
}

Dataset two_class(std::uint64_t seed, const Matrix& omega1, const Matrix& omega2, int n) {
  Rng rng(seed);
  Dataset d;
  const Index p = omega1.rows();
  d.y.resize(0, p);
  for (Index i = 0; i < p; ++i) d.names.push_back("X" + std::to_string(i + 1));
  append_rows(d, rng, Vector::Zero(p), omega1, n, ClassLabel::class1);
  append_rows(d, rng, Vector::Zero(p), omega2, n, ClassLabel::class2);
  return d;
}

Dataset empty_dataset(Index p) {
  Dataset d;
  d.y.resize(0, p);
  for (Index i = 0; i < p; ++i) d.names.push_back("X" + std::to_string(i + 1));
  return d;
}

Matrix corr2(double rho) {
  Matrix m(2, 2);
  m << 1.0, rho, rho, 1.0;
  return m;
}

}  // namespace

TEST_SUITE("sampler") {

TEST_CASE("chain config validation and draw counting") {
  ChainConfig cfg;
  cfg.iterations = 100;
  cfg.burn_in = 50;
  cfg.thin = 5;
  CHECK(cfg.retained() == 10);
  CHECK_NOTHROW(cfg.validate());
  ChainConfig bad = cfg;
  bad.burn_in = 100;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = cfg;
  bad.thin = 0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = cfg;
  bad.s_proposal_sd = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  const Dataset d = two_class(3, Matrix::Identity(3, 3), Matrix::Identity(3, 3), 20);
  const ChainSamples s = run_chain(d, default_hyperparameters(3), cfg);
  CHECK(s.draws.size() == 10);
  CHECK(s.acceptance.edge.rate() >= 0.0);
  CHECK(s.acceptance.edge.rate() <= 1.0);
  CHECK(s.invariant_violations == 0);
}

TEST_CASE("same seed gives identical samples") {
  const Dataset d = two_class(4, corr2(0.5) * 2.0, Matrix::Identity(2, 2), 30);
  ChainConfig cfg;
  cfg.iterations = 200;
  cfg.burn_in = 20;
  cfg.seed = 77;
  const ChainSamples a = run_chain(d, default_hyperparameters(2), cfg);
  const ChainSamples b = run_chain(d, default_hyperparameters(2), cfg);
  REQUIRE(a.draws.size() == b.draws.size());
  for (std::size_t m = 0; m < a.draws.size(); ++m) {
    for (std::size_t k = 0; k < 2; ++k) {
      CHECK(a.draws[m].a[k] == b.draws[m].a[k]);
      CHECK(a.draws[m].r[k] == b.draws[m].r[k]);
      CHECK(a.draws[m].s[k] == b.draws[m].s[k]);
      CHECK(a.draws[m].mu[k] == b.draws[m].mu[k]);
    }
  }
  cfg.seed = 78;
  const ChainSamples c = run_chain(d, default_hyperparameters(2), cfg);
  bool differs = false;
  for (std::size_t m = 0; m < a.draws.size(); ++m) differs = differs || a.draws[m].s[0] != c.draws[m].s[0];
  CHECK(differs);
}

TEST_CASE("init_state: empty graph, deterministic, needs two labeled rows per class") {
  Dataset d = empty_dataset(2);
  d.y.resize(4, 2);
  d.y << 0.0, 1.0, 1.0, 0.5, 3.0, 2.0, 2.5, 2.9;
  d.labels = {ClassLabel::class1, ClassLabel::class1, ClassLabel::class2, ClassLabel::class2};
  const Hyperparameters h = resolve_hyperparameters(default_hyperparameters(2), d);
  const ChainState a = init_state(d, h, 1);
  CHECK(a.cls[0].a(0, 1) == 0.0);
  CHECK(a.cls[1].a(0, 1) == 0.0);
  CHECK(a.lambda(0, 1) == 0.0);
  CHECK(validate_state(a).empty());
  CHECK(serialize_state(init_state(d, h, 1)) == serialize_state(a));
  // S starts at 1 / sd of each class column (MLE variance)
  CHECK(a.cls[0].s[0] == doctest::Approx(2.0));
  CHECK(a.cls[0].mu[1] == doctest::Approx(0.75));

  d.labels[3] = ClassLabel::unknown;
  CHECK_THROWS_AS(init_state(d, h, 1), ValidationError);
}

TEST_CASE("mu-only Gibbs matches the closed-form normal posterior") {
  Matrix omega(3, 3);
  omega << 2.0, -0.6, 0.0, -0.6, 1.5, 0.4, 0.0, 0.4, 1.0;
  const Dataset d = two_class(11, omega, Matrix::Identity(3, 3), 15);
  Hyperparameters h = default_hyperparameters(3);
  h.center_mu0 = false;
  h.mu0[0] << 0.5, -0.5, 1.0;
  h.b0[0] = Matrix::Identity(3, 3) * 2.0;
  ChainState st = init_state(d, h, 1);
  Sampler s(d, h, ChainConfig{}, st);

  const Precision pr = s.precision(0);
  Vector ysum = Vector::Zero(3);
  for (Index r : d.rows_with(ClassLabel::class1)) ysum += d.y.row(r).transpose();
  const Matrix post_cov = oracle::inverse(h.b0[0] + 15.0 * pr.omega);
  const Vector post_mean = post_cov * (h.b0[0] * h.mu0[0] + pr.omega * ysum);

  Rng rng(5);
  const int n = 10000;
  Vector sum = Vector::Zero(3);
  Matrix outer = Matrix::Zero(3, 3);
  for (int t = 0; t < n; ++t) {
    s.update_mu(rng);
    const Vector m = s.state().cls[0].mu;
    sum += m;
    outer += m * m.transpose();
  }
  const Vector mean = sum / n;
  const Matrix cov = outer / n - mean * mean.transpose();
  for (Index i = 0; i < 3; ++i) {
    const double se = std::sqrt(post_cov(i, i) / n);
    CHECK(std::abs(mean[i] - post_mean[i]) < 3.0 * se);
    for (Index j = 0; j < 3; ++j) {
      // sd of a sample covariance entry: sqrt((S_ii S_jj + S_ij^2) / n)
      const double se_cov = std::sqrt((post_cov(i, i) * post_cov(j, j) + post_cov(i, j) * post_cov(i, j)) / n);
      CHECK(std::abs(cov(i, j) - post_cov(i, j)) < 3.0 * se_cov);
    }
  }
}

TEST_CASE("mu with a very strong prior stays at mu0") {
  const Dataset d = two_class(12, Matrix::Identity(2, 2), Matrix::Identity(2, 2), 20);
  Hyperparameters h = default_hyperparameters(2);
  h.center_mu0 = false;
  h.mu0[1] << 3.0, -2.0;
  h.b0[1] = 1e8 * Matrix::Identity(2, 2);
  Sampler s(d, h, ChainConfig{}, init_state(d, h, 1));
  Rng rng(1);
  s.update_mu(rng);
  CHECK(s.state().cls[1].mu[0] == doctest::Approx(3.0).epsilon(1e-3));
  CHECK(s.state().cls[1].mu[1] == doctest::Approx(-2.0).epsilon(1e-3));
}

TEST_CASE("q and pi conjugate updates") {
  const Dataset d = two_class(13, Matrix::Identity(3, 3), Matrix::Identity(3, 3), 10);
  const Hyperparameters h = resolve_hyperparameters(default_hyperparameters(3), d);
  ChainState st = init_state(d, h, 1);
  for (std::size_t k = 0; k < 2; ++k) {
    st.cls[k].a.setOnes();
    st.cls[k].r = Matrix::Identity(3, 3);
  }
  Sampler s(d, h, ChainConfig{}, st);
  Rng rng(21);
  const int n = 40000;
  double q_sum = 0.0, pi_sum = 0.0;
  for (int t = 0; t < n; ++t) {
    s.update_q_pi(rng);
    q_sum += s.state().cls[0].q(0, 1);
    pi_sum += s.state().pi(1, 2);
  }
  // a = 1: Beta(3, 2), mean 0.6; lambda = 0: Beta(2, 3), mean 0.4
  CHECK(q_sum / n == doctest::Approx(0.6).epsilon(0.01 / 0.6));
  CHECK(pi_sum / n == doctest::Approx(0.4).epsilon(0.01 / 0.4));
  CHECK(s.state().cls[0].q(0, 1) == s.state().cls[0].q(1, 0));
}

TEST_CASE("forced q = 1 switches every edge on without data") {
  const Dataset d = empty_dataset(3);
  const Hyperparameters h = default_hyperparameters(3);
  ChainState st = init_state(d, h, 1);
  for (std::size_t k = 0; k < 2; ++k) st.cls[k].q.setOnes();
  Sampler s(d, h, ChainConfig{}, st);
  Rng rng(2);
  for (Index i = 0; i < 3; ++i)
    for (Index j = i + 1; j < 3; ++j) {
      s.update_edge(i, j, rng);
      CHECK(s.state().cls[0].a(i, j) == 1.0);
      CHECK(s.state().cls[1].a(i, j) == 1.0);
      CHECK(s.state().lambda(i, j) == 0.0);
    }
  for (std::size_t k = 0; k < 2; ++k) CHECK(is_positive_definite(s.state().cls[k].a.cwiseProduct(s.state().cls[k].r)));
}

TEST_CASE("strong true partial correlation is found") {
  // precision with partial correlation 0.8 in both classes
  const Matrix omega = corr2(-0.8);
  const Dataset d = two_class(14, omega, omega, 200);
  ChainConfig cfg;
  cfg.iterations = 2000;
  cfg.burn_in = 500;
  const ChainSamples s = run_chain(d, default_hyperparameters(2), cfg);
  double a1 = 0.0, a2 = 0.0;
  for (const Draw& dr : s.draws) {
    a1 += dr.a[0](0, 1);
    a2 += dr.a[1](0, 1);
  }
  CHECK(a1 / static_cast<double>(s.draws.size()) > 0.9);
  CHECK(a2 / static_cast<double>(s.draws.size()) > 0.9);
  CHECK(s.invariant_violations == 0);
}

TEST_CASE("tiny S proposal freezes S") {
  const Dataset d = two_class(15, Matrix::Identity(2, 2), Matrix::Identity(2, 2), 30);
  ChainConfig cfg;
  cfg.s_proposal_sd = 1e-9;
  const Hyperparameters h = resolve_hyperparameters(default_hyperparameters(2), d);
  const ChainState st = init_state(d, h, 1);
  Sampler s(d, h, cfg, st);
  Rng rng(3);
  for (int t = 0; t < 200; ++t) s.update_s(t % 2, rng);
  CHECK(s.acceptance().s.rate() > 0.99);
  CHECK(s.state().cls[0].s[0] == doctest::Approx(st.cls[0].s[0]).epsilon(1e-6));
}

TEST_CASE("S concentrates at 1 / sd with much data") {
  Matrix omega = Matrix::Zero(2, 2);
  omega(0, 0) = 0.25;  // sd 2
  omega(1, 1) = 4.0;   // sd 0.5
  const Dataset d = two_class(16, omega, omega, 5000);
  ChainConfig cfg;
  cfg.iterations = 400;
  cfg.burn_in = 100;
  const ChainSamples s = run_chain(d, default_hyperparameters(2), cfg);
  Vector mean = Vector::Zero(2);
  for (const Draw& dr : s.draws) mean += dr.s[0];
  mean /= static_cast<double>(s.draws.size());
  const auto rows = d.rows_with(ClassLabel::class1);
  for (Index i = 0; i < 2; ++i) {
    double m = 0.0, v = 0.0;
    for (Index r : rows) m += d.y(r, i);
    m /= static_cast<double>(rows.size());
    for (Index r : rows) v += (d.y(r, i) - m) * (d.y(r, i) - m);
    const double sd = std::sqrt(v / static_cast<double>(rows.size()));
    CHECK(mean[i] == doctest::Approx(1.0 / sd).epsilon(0.05));
  }
}

TEST_CASE("labels: symmetric classes give probability one half") {
  Dataset d = two_class(17, Matrix::Identity(2, 2), Matrix::Identity(2, 2), 10);
  d.y.row(0) << 0.3, -0.2;
  d.labels[0] = ClassLabel::unknown;
  Hyperparameters h = default_hyperparameters(2);
  h.center_mu0 = false;
  ChainState st = init_state(d, h, 1);
  st.cls[1] = st.cls[0];
  st.h.setConstant(0.5);
  Sampler s(d, h, ChainConfig{}, st);
  Rng rng(4);
  s.update_labels(rng);
  CHECK(s.last_label_probabilities()[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("labels: a point at a distant class mean is assigned to it") {
  Dataset d = two_class(18, Matrix::Identity(2, 2), Matrix::Identity(2, 2), 10);
  d.labels[0] = ClassLabel::unknown;
  Hyperparameters h = default_hyperparameters(2);
  h.center_mu0 = false;
  ChainState st = init_state(d, h, 1);
  st.cls[0].mu << 0.0, 0.0;
  st.cls[1].mu << 10.0, 0.0;
  st.cls[0].s.setOnes();
  st.cls[1].s.setOnes();
  d.y.row(0) << 0.0, 0.0;
  Sampler s(d, h, ChainConfig{}, st);
  Rng rng(5);
  s.update_labels(rng);
  CHECK(s.last_label_probabilities()[0] > 0.999);
  CHECK(s.state().z_u[0] == ClassLabel::class1);
}

TEST_CASE("labels: in-chain classification tracks the true likelihood-ratio rule") {
  // equal means, class 1 has a strong edge, class 2 is diagonal
  const Matrix omega1 = oracle::inverse(corr2(0.9));
  const Matrix omega2 = Matrix::Identity(2, 2);
  Rng rng(19);
  Dataset d = empty_dataset(2);
  append_rows(d, rng, Vector::Zero(2), omega1, 100, ClassLabel::class1);
  append_rows(d, rng, Vector::Zero(2), omega2, 100, ClassLabel::class2);
  Dataset test = empty_dataset(2);
  append_rows(test, rng, Vector::Zero(2), omega1, 100, ClassLabel::class1);
  append_rows(test, rng, Vector::Zero(2), omega2, 100, ClassLabel::class2);

  Dataset joint = d;
  joint.y.conservativeResize(d.n() + test.n(), 2);
  joint.y.bottomRows(test.n()) = test.y;
  for (Index r = 0; r < test.n(); ++r) joint.labels.push_back(ClassLabel::unknown);

  ChainConfig cfg;
  cfg.iterations = 1500;
  cfg.burn_in = 300;
  const ChainSamples s = run_chain(joint, default_hyperparameters(2), cfg);
  int chain_hits = 0, oracle_hits = 0;
  const double ld1 = std::log(oracle::determinant(omega1));
  const double ld2 = std::log(oracle::determinant(omega2));
  for (Index o = 0; o < test.n(); ++o) {
    double ones = 0.0;
    for (const Draw& dr : s.draws) ones += dr.z_u[static_cast<std::size_t>(o)] == ClassLabel::class1 ? 1.0 : 0.0;
    const bool chain_says_1 = ones / static_cast<double>(s.draws.size()) >= 0.5;
    const Vector y = test.y.row(o).transpose();
    const double l1 = 0.5 * ld1 - 0.5 * y.dot(omega1 * y);
    const double l2 = 0.5 * ld2 - 0.5 * y.dot(omega2 * y);
    const bool truth_1 = test.labels[static_cast<std::size_t>(o)] == ClassLabel::class1;
    chain_hits += chain_says_1 == truth_1;
    oracle_hits += (l1 >= l2) == truth_1;
  }
  const double chain_acc = chain_hits / 200.0;
  const double oracle_acc = oracle_hits / 200.0;
  CHECK(oracle_acc > 0.6);
  CHECK(chain_acc > 0.5);
  CHECK(chain_acc >= oracle_acc - 0.05);
}

TEST_CASE("prior-only chain keeps every invariant") {
  const Dataset d = empty_dataset(4);
  ChainConfig cfg;
  cfg.iterations = 3000;
  cfg.burn_in = 100;
  const ChainSamples s = run_chain(d, default_hyperparameters(4), cfg);
  CHECK(s.invariant_violations == 0);
  CHECK(s.draws.size() == 2900);
  for (const Draw& dr : s.draws) {
    for (std::size_t k = 0; k < 2; ++k) CHECK(is_positive_definite(dr.a[k].cwiseProduct(dr.r[k])));
  }
}

TEST_CASE("non-finite state raises a numerical error with a state dump") {
  const Dataset d = two_class(20, Matrix::Identity(2, 2), Matrix::Identity(2, 2), 10);
  const Hyperparameters h = resolve_hyperparameters(default_hyperparameters(2), d);
  ChainState st = init_state(d, h, 1);
  st.cls[0].mu[0] = std::numeric_limits<double>::infinity();
  Sampler s(d, h, ChainConfig{}, st);
  try {
    s.check_finite();
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("\"version\"") != std::string::npos);
  }
}

}  // TEST_SUITE
