#include "bggm/error.hpp"
#include "bggm/inference.hpp"

#include <doctest.h>

#include <algorithm>
#include <vector>

using namespace bggm;

namespace {

Matrix sym3(double x01, double x02, double x12, double diag) {
  Matrix m(3, 3);
  m << diag, x01, x02, x01, diag, x12, x02, x12, diag;
  return m;
}

Draw make_draw(const Matrix& a1, const Matrix& r1, const Matrix& a2, const Matrix& r2,
               std::vector<ClassLabel> z) {
  Draw d;
  d.a = {a1, a2};
  d.r = {r1, r2};
  d.lambda = (a1 - a2).cwiseAbs();
  d.lambda.diagonal().setZero();
  d.s = {Vector::Ones(3), Vector::Constant(3, 2.0)};
  d.mu = {Vector::Zero(3), Vector::Zero(3)};
  d.z_u = std::move(z);
  return d;
}

// Three hand-written draws over proteins A, B, C with two unknown samples.
ChainSamples toy_chain() {
  ChainSamples s;
  s.names = {"A", "B", "C"};
  s.unknown_rows = {4, 7};
  const Matrix r = sym3(0.3, -0.6, 0.2, 1.0);
  const auto c1 = ClassLabel::class1, c2 = ClassLabel::class2;
  s.draws.push_back(make_draw(sym3(1, 0, 0, 1), r, sym3(1, 1, 0, 1), r, {c1, c2}));
  s.draws.push_back(make_draw(sym3(1, 1, 0, 1), r, sym3(1, 1, 0, 1), r, {c1, c1}));
  s.draws.push_back(make_draw(sym3(0, 1, 0, 1), r, sym3(1, 1, 1, 1), r, {c2, c2}));
  return s;
}

PosteriorSummary summary_with(const Matrix& ppi1, const Matrix& pc1) {
  PosteriorSummary s;
  const Index p = ppi1.rows();
  s.ppi = {ppi1, Matrix::Zero(p, p)};
  s.ppi_diff = Matrix::Zero(p, p);
  s.ppi_common = Matrix::Ones(p, p);
  s.ppi_common.diagonal().setZero();
  s.mean_partial_corr = {pc1, Matrix::Zero(p, p)};
  s.bma_omega = {Matrix::Identity(p, p), Matrix::Identity(p, p)};
  for (Index i = 0; i < p; ++i) s.names.push_back("P" + std::to_string(i + 1));
  return s;
}

}  // namespace

TEST_SUITE("inference") {

TEST_CASE("fdr_threshold reference cases") {
  const std::vector<double> ones{1.0, 1.0, 1.0};
  FdrThreshold t = fdr_threshold(ones, 0.05);
  CHECK(t.selected == 3);
  CHECK(t.phi == 1.0);

  // mean q-values 0.01, 0.03, 0.0533, 0.165
  const std::vector<double> mixed{0.99, 0.95, 0.90, 0.50};
  t = fdr_threshold(mixed, 0.10);
  CHECK(t.selected == 3);
  CHECK(t.phi == 0.90);

  const std::vector<double> weak{0.5, 0.4};
  t = fdr_threshold(weak, 0.10);
  CHECK(t.selected == 0);
  CHECK(t.phi > 1.0);
  CHECK(t.phi == kNoCallThreshold);
}

TEST_CASE("fdr_threshold errors") {
  const std::vector<double> probs{0.9};
  CHECK_THROWS_AS(fdr_threshold(probs, 0.0), ValidationError);
  CHECK_THROWS_AS(fdr_threshold(probs, 1.0), ValidationError);
  CHECK_THROWS_AS(fdr_threshold(std::vector<double>{}, 0.1), ValidationError);
  CHECK_THROWS_AS(fdr_threshold(std::vector<double>{1.2}, 0.1), ValidationError);
}

TEST_CASE("fdr_threshold properties on random inputs") {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> probs(1 + rng.index(30));
    for (double& v : probs) v = rng.bernoulli(0.3) ? rng.uniform(0.9, 1.0) : rng.uniform();
    const double alpha = rng.uniform(0.01, 0.5);
    const FdrThreshold base = fdr_threshold(probs, alpha);

    std::vector<double> shuffled = probs;
    std::shuffle(shuffled.begin(), shuffled.end(), rng.engine());
    const FdrThreshold perm = fdr_threshold(shuffled, alpha);
    CHECK(perm.selected == base.selected);
    CHECK(perm.phi == base.phi);

    CHECK(fdr_threshold(probs, std::min(0.99, alpha * 1.5)).selected >= base.selected);

    // called set keeps its mean q-value within alpha
    if (base.selected > 0) {
      std::vector<double> sorted = probs;
      std::sort(sorted.begin(), sorted.end(), std::greater<>());
      double q = 0.0;
      for (std::size_t k = 0; k < base.selected; ++k) q += 1.0 - sorted[k];
      CHECK(q / static_cast<double>(base.selected) <= alpha + 1e-12);
    }
  }
  std::vector<double> strong{0.95, 0.97, 0.999, 0.91};
  CHECK(fdr_threshold(strong, 0.1).selected == 4);
}

TEST_CASE("summarize a three-draw toy chain by hand") {
  const PosteriorSummary s = summarize(toy_chain());
  CHECK(s.n_draws == 3);
  CHECK(s.ppi[0](0, 1) == doctest::Approx(2.0 / 3.0));
  CHECK(s.ppi[0](0, 2) == doctest::Approx(2.0 / 3.0));
  CHECK(s.ppi[0](1, 2) == 0.0);
  CHECK(s.ppi[1](0, 1) == 1.0);
  CHECK(s.ppi[1](1, 2) == doctest::Approx(1.0 / 3.0));
  // lambda(0,1) = 0,0,1; lambda(0,2) = 1,0,0; lambda(1,2) = 0,0,1
  CHECK(s.ppi_diff(0, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(s.ppi_diff(0, 2) == doctest::Approx(1.0 / 3.0));
  CHECK(s.ppi_common(1, 2) == doctest::Approx(2.0 / 3.0));
  // -a * r averaged: A-B class 1 is on in draws 1 and 2 at r = 0.3
  CHECK(s.mean_partial_corr[0](0, 1) == doctest::Approx(-0.2));
  CHECK(s.mean_partial_corr[0](0, 2) == doctest::Approx(0.4));
  CHECK(s.mean_partial_corr[1](1, 2) == doctest::Approx(-0.2 / 3.0));
  // Omega = S C S: class 2 has s = 2, so off-diagonals scale by 4
  CHECK(s.bma_omega[1](0, 0) == doctest::Approx(4.0));
  CHECK(s.bma_omega[1](0, 1) == doctest::Approx(4.0 * 0.3));
  CHECK(s.bma_omega[0](0, 2) == doctest::Approx(2.0 / 3.0 * -0.6));
  CHECK(s.class1_probability[0] == doctest::Approx(2.0 / 3.0));
  CHECK(s.class1_probability[1] == doctest::Approx(1.0 / 3.0));
  CHECK(s.unknown_rows == std::vector<Index>{4, 7});
  for (Index i = 0; i < 3; ++i) {
    CHECK(s.ppi[0](i, i) == 0.0);
    CHECK(s.ppi_diff(i, i) == 0.0);
    for (Index j = 0; j < 3; ++j) {
      if (i != j) CHECK(s.ppi_diff(i, j) + s.ppi_common(i, j) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(s.ppi[1](i, j) == s.ppi[1](j, i));
    }
  }
  CHECK_THROWS_AS(summarize(ChainSamples{}), ValidationError);
}

TEST_CASE("summarize trivial limits") {
  ChainSamples s = toy_chain();
  for (auto& d : s.draws) d = s.draws[1];
  CHECK(summarize(s).ppi[0](0, 1) == 1.0);

  ChainSamples alt = toy_chain();
  alt.draws.pop_back();
  // lambda(0,2) is 1 then 0
  CHECK(summarize(alt).ppi_diff(0, 2) == doctest::Approx(0.5));
  CHECK(summarize(alt).ppi_common(0, 2) == doctest::Approx(0.5));
}

TEST_CASE("call_network: certain positive class-1 graph is called in full") {
  const Index p = 5;
  Matrix ppi = Matrix::Ones(p, p);
  ppi.diagonal().setZero();
  Matrix pc = Matrix::Constant(p, p, 0.3);
  pc(1, 3) = pc(3, 1) = 0.6;
  pc.diagonal().setZero();
  const NetworkCall call = call_network(summary_with(ppi, pc), NetworkKind::class1, 0.1);
  CHECK(call.edges.size() == static_cast<std::size_t>(p * (p - 1) / 2));
  double top = 0.0;
  for (const auto& e : call.edges) {
    CHECK(e.sign == EdgeSign::positive);
    CHECK(e.i < e.j);
    CHECK(e.ppi >= call.threshold);
    CHECK(e.weight >= 0.0);
    CHECK(e.weight <= 1.0);
    CHECK_FALSE(e.carrier.has_value());
    top = std::max(top, e.weight);
  }
  CHECK(top == 1.0);
  // column-stacked order: (0,1), (0,2), (1,2), (0,3), ...
  CHECK(call.edges[2].i == 1);
  CHECK(call.edges[2].j == 2);
  CHECK(call.edges[3].j == 3);
}

TEST_CASE("call_network: weak evidence calls nothing") {
  Matrix ppi = Matrix::Constant(4, 4, 0.3);
  ppi.diagonal().setZero();
  const NetworkCall call = call_network(summary_with(ppi, Matrix::Zero(4, 4)), NetworkKind::class1, 0.1);
  CHECK(call.edges.empty());
  CHECK(call.threshold > 1.0);
}

TEST_CASE("call_network: differential carrier and conserved sign") {
  PosteriorSummary s = summarize(toy_chain());
  s.ppi_diff(0, 2) = s.ppi_diff(2, 0) = 0.99;
  s.ppi_common(0, 2) = s.ppi_common(2, 0) = 0.01;
  const NetworkCall diff = call_network(s, NetworkKind::differential, 0.05);
  REQUIRE(diff.edges.size() == 1);
  CHECK(diff.edges[0].i == 0);
  CHECK(diff.edges[0].j == 2);
  // class 2 has ppi 1 on (0,2), class 1 only 2/3
  CHECK(diff.edges[0].carrier == ClassLabel::class2);
  CHECK(diff.edges[0].partial_corr == doctest::Approx(s.mean_partial_corr[1](0, 2)));
  CHECK(diff.edges[0].sign == EdgeSign::positive);

  const NetworkCall cons = call_network(s, NetworkKind::conserved, 0.4);
  for (const auto& e : cons.edges) {
    const double mean = 0.5 * (s.mean_partial_corr[0](e.i, e.j) + s.mean_partial_corr[1](e.i, e.j));
    CHECK(e.partial_corr == doctest::Approx(mean));
    CHECK((e.sign == EdgeSign::negative) == (mean < 0.0));
    CHECK(s.ppi_diff(e.i, e.j) + e.ppi == doctest::Approx(1.0));
  }
}

TEST_CASE("predict_labels tie-break and errors") {
  PosteriorSummary s;
  s.class1_probability = Vector(3);
  s.class1_probability << 0.5, 0.93, 0.1;
  s.unknown_rows = {2, 5, 9};
  const auto pred = predict_labels(s, 0.5);
  REQUIRE(pred.size() == 3);
  CHECK(pred[0].label == ClassLabel::class1);
  CHECK(pred[1].label == ClassLabel::class1);
  CHECK(pred[1].class1_probability == 0.93);
  CHECK(pred[1].row == 5);
  CHECK(pred[2].label == ClassLabel::class2);
  CHECK(predict_labels(s, 0.95)[1].label == ClassLabel::class2);
  CHECK_THROWS_AS(predict_labels(PosteriorSummary{}, 0.5), ValidationError);
}

TEST_CASE("predict_labels agrees with the majority vote over label draws") {
  const ChainSamples chain = toy_chain();
  const auto pred = predict_labels(summarize(chain), 0.5);
  for (std::size_t o = 0; o < pred.size(); ++o) {
    int ones = 0;
    for (const auto& d : chain.draws) ones += d.z_u[o] == ClassLabel::class1;
    CHECK((pred[o].label == ClassLabel::class1) == (2 * ones >= static_cast<int>(chain.draws.size())));
  }
}

}  // TEST_SUITE
