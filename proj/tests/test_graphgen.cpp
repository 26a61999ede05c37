#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "sbmlab/graphgen.hpp"
#include "sbmlab/model.hpp"
#include "sbmlab/rng.hpp"

using namespace sbmlab;

TEST_CASE("block matrix eigenvalues match the closed forms") {
  const BlockMatrix small(make_params(8, 0.5, 0.25, 0.1, 1.0));
  CHECK(small.lambda1() == 3.0);  // 8*(0.5+0.25)/2
  CHECK(small.lambda2() == 1.0);  // 8*(0.5-0.25)/2

  const BlockMatrix reference(make_params(2000, 0.025, 0.01, 0.5, 1.0));
  CHECK(reference.lambda1() == 35.0);
  CHECK(reference.lambda2() == 15.0);
}

TEST_CASE("block matrix equals its rank-two spectral form") {
  const ModelParams p = make_params(10, 0.4, 0.2, 0.1, 1.0);
  const BlockMatrix block(p);
  const Eigen::MatrixXd dense = block.materialize();
  const Eigen::MatrixXd rank_two =
      block.lambda1() * block.v1() * block.v1().transpose() +
      block.lambda2() * block.v2() * block.v2().transpose();
  CHECK((dense - rank_two).cwiseAbs().maxCoeff() < 1e-12);

  // Entry pattern: p1 within a community (and on the diagonal), p2 across.
  CHECK(dense(0, 1) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(dense(0, 0) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(dense(0, 9) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(std::abs(block.v1().norm() - 1.0) < 1e-12);
  CHECK(std::abs(block.v2().norm() - 1.0) < 1e-12);
}

TEST_CASE("kernel matrix entries and structure") {
  LatentPositions x(3, 2);
  x << 0.0, 0.0, 1.0, 0.0, 0.0, 2.0;
  const double gamma = 0.7;
  const KernelMatrix k = kernel_matrix(x, gamma);
  CHECK(k.rows() == 3);
  for (int i = 0; i < 3; ++i) CHECK(k(i, i) == 0.0);
  CHECK(k(0, 1) == doctest::Approx(std::exp(-gamma)).epsilon(1e-15));
  CHECK(k(0, 2) == doctest::Approx(std::exp(-4.0 * gamma)).epsilon(1e-15));
  CHECK(k(1, 2) == doctest::Approx(std::exp(-5.0 * gamma)).epsilon(1e-15));
  CHECK((k - k.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("kernel row sums stay below N-1") {
  const LatentPositions x = sample_latents(300, Seed{31, 0});
  const KernelMatrix k = kernel_matrix(x, 0.01);  // wide kernel: worst case
  CHECK(k.rowwise().sum().maxCoeff() <= 299.0);
  CHECK(k.minCoeff() >= 0.0);
  CHECK(k.maxCoeff() <= 1.0);
}

TEST_CASE("conditional mean combines kernel and block term") {
  const ModelParams p = make_params(6, 0.4, 0.2, 0.3, 1.5);
  const LatentPositions x = sample_latents(p, Seed{33, 0});
  const KernelMatrix k = kernel_matrix(x, p.gamma);
  const Eigen::MatrixXd q = conditional_mean(p, k);
  for (int i = 0; i < 6; ++i) {
    CHECK(q(i, i) == 0.0);
    for (int j = 0; j < 6; ++j) {
      if (i == j) continue;
      const bool intra = (i < 3) == (j < 3);
      const double expected = p.kappa * k(i, j) + (intra ? p.p1 : p.p2);
      CHECK(q(i, j) == doctest::Approx(expected).epsilon(1e-15));
      CHECK(q(i, j) >= 0.0);
      CHECK(q(i, j) <= 1.0);
    }
  }
}

TEST_CASE("conditional mean rejects probabilities pushed past one") {
  // Bypass make_params on purpose: the clamp guard exists to catch
  // exactly this kind of invalid aggregate.
  ModelParams bad;
  bad.n = 4;
  bad.p1 = 0.9;
  bad.p2 = 0.1;
  bad.kappa = 0.5;
  bad.gamma = 1.0;
  LatentPositions x(4, 2);
  x.setZero();  // kernel = 1 off-diagonal -> q = 1.4 intra
  const KernelMatrix k = kernel_matrix(x, bad.gamma);
  CHECK_THROWS_AS(conditional_mean(bad, k), std::runtime_error);
}

TEST_CASE("adjacency container mechanics") {
  AdjacencyMatrix a(5);
  CHECK(a.size() == 5);
  CHECK(a.edge_count() == 0);
  a.set_edge(0, 3);
  a.set_edge(4, 1);
  CHECK(a.at(0, 3));
  CHECK(a.at(3, 0));
  CHECK(a.at(1, 4));
  CHECK_FALSE(a.at(0, 1));
  CHECK(a.edge_count() == 2);
  const Eigen::MatrixXd d = a.to_dense();
  CHECK(d(0, 3) == 1.0);
  CHECK(d(3, 0) == 1.0);
  CHECK(d(1, 4) == 1.0);
  CHECK(d.diagonal().cwiseAbs().maxCoeff() == 0.0);
  CHECK(d.sum() == 4.0);
  CHECK_THROWS_AS(a.set_edge(2, 2), std::invalid_argument);
}

TEST_CASE("zero and one probability matrices give empty and complete graphs") {
  const int n = 12;
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  CHECK(sample_adjacency(q, Seed{41, 0}).edge_count() == 0);

  q = Eigen::MatrixXd::Ones(n, n);
  q.diagonal().setZero();
  CHECK(sample_adjacency(q, Seed{41, 0}).edge_count() == n * (n - 1) / 2);
}

TEST_CASE("adjacency sampling is deterministic and symmetric") {
  const ModelParams p = make_params(40, 0.4, 0.1, 0.3, 2.0);
  const LatentPositions x = sample_latents(p, Seed{43, 5});
  const Eigen::MatrixXd q = conditional_mean(p, kernel_matrix(x, p.gamma));
  const Eigen::MatrixXd a = sample_adjacency(q, Seed{43, 5}).to_dense();
  const Eigen::MatrixXd b = sample_adjacency(q, Seed{43, 5}).to_dense();
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.diagonal().cwiseAbs().maxCoeff() == 0.0);
  for (int i = 0; i < 40; ++i) {
    for (int j = 0; j < 40; ++j) {
      CHECK((a(i, j) == 0.0 || a(i, j) == 1.0));
    }
  }
}

TEST_CASE("per-entry edge frequency matches its probability") {
  Eigen::MatrixXd q(4, 4);
  q << 0.0, 0.15, 0.5, 0.9,
       0.15, 0.0, 0.35, 0.6,
       0.5, 0.35, 0.0, 0.05,
       0.9, 0.6, 0.05, 0.0;
  const int trials = 4000;
  Eigen::MatrixXd freq = Eigen::MatrixXd::Zero(4, 4);
  for (int t = 0; t < trials; ++t) {
    freq += sample_adjacency(q, Seed{47, static_cast<std::uint64_t>(t)})
                .to_dense();
  }
  freq /= trials;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      const double se = std::sqrt(q(i, j) * (1 - q(i, j)) / trials);
      CHECK(std::abs(freq(i, j) - q(i, j)) < 4.0 * se + 1e-12);
    }
  }
}

TEST_CASE("expected edge count is met within four standard deviations") {
  const ModelParams p = make_params(100, 0.3, 0.1, 0.4, 1.0);
  const LatentPositions x = sample_latents(p, Seed{49, 0});
  const Eigen::MatrixXd q = conditional_mean(p, kernel_matrix(x, p.gamma));
  double mean = 0.0, var = 0.0;
  for (int i = 0; i < p.n; ++i) {
    for (int j = i + 1; j < p.n; ++j) {
      mean += q(i, j);
      var += q(i, j) * (1 - q(i, j));
    }
  }
  // Average the count over seeds to tighten the gate.
  const int trials = 50;
  double total = 0.0;
  for (int t = 0; t < trials; ++t) {
    total += sample_adjacency(q, Seed{49, static_cast<std::uint64_t>(t)})
                 .edge_count();
  }
  const double observed = total / trials;
  CHECK(std::abs(observed - mean) < 4.0 * std::sqrt(var / trials));
}
