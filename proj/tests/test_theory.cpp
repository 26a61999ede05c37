#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "sbmlab/graphgen.hpp"
#include "sbmlab/model.hpp"
#include "sbmlab/resolvent.hpp"
#include "sbmlab/spectrum.hpp"
#include "sbmlab/theory.hpp"
#include "test_util.hpp"

using namespace sbmlab;

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST_CASE("block eigenvalue closed forms") {
  const ModelParams p = make_params(2000, 0.025, 0.01, 0.5, 50.0);
  const auto [l1, l2] = lambda12(p);
  CHECK(l1 == 35.0);
  CHECK(l2 == 15.0);

  // Doubling N doubles both values.
  const auto [d1, d2] = lambda12(make_params(4000, 0.025, 0.01, 0.5, 50.0));
  CHECK(d1 == 2.0 * l1);
  CHECK(d2 == 2.0 * l2);

  // They also agree with the block matrix object.
  const BlockMatrix block(p);
  CHECK(block.lambda1() == l1);
  CHECK(block.lambda2() == l2);
}

TEST_CASE("leading kernel eigenvalue approximation") {
  ModelParams p;  // aggregate on purpose: kappa = 1 is outside make_params
  p.n = 2000;
  p.p1 = 0.025;
  p.p2 = 0.01;
  p.kappa = 1.0;
  const double expected[] = {20.0, 100.0 / 7.0, 10.0, 100.0 / 11.0};
  const double gammas[] = {50.0, 70.0, 100.0, 110.0};
  for (int i = 0; i < 4; ++i) {
    p.gamma = gammas[i];
    CHECK(mu1_approx(p) == doctest::Approx(expected[i]).epsilon(1e-14));
  }
  p.kappa = 0.97;
  p.gamma = 100.0;
  CHECK(mu1_approx(p) == doctest::Approx(9.7).epsilon(1e-14));
}

TEST_CASE("empirical top kernel eigenvalue near its approximation") {
  // gamma=50, N=2000, kappa=0.97: top eigenvalue of kappa*P within 15%
  // of 19.4, median of 5 seeds.
  const int n = 2000;
  const double gamma = 50.0, kappa = 0.97;
  std::vector<double> tops;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const LatentPositions x = sample_latents(n, Seed{301, s});
    const Eigen::MatrixXd kp = kappa * kernel_matrix(x, gamma);
    tops.push_back(eig_sym(kp, 0).eigenvalues(0));
  }
  const double target = kappa * n / (2.0 * gamma);
  CHECK(std::abs(median_of(tops) - target) < 0.15 * target);
}

TEST_CASE("noise norm bound closed form") {
  const ModelParams p = make_params(2000, 0.025, 0.01, 0.97, 100.0);
  const double expected = std::sqrt(0.97 * 2000.0 / 100.0) +
                          std::sqrt(2000.0 * (0.0175 + 0.97 / 200.0));
  CHECK(noise_norm_bound(p) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(noise_norm_bound(p) == doctest::Approx(11.09).epsilon(2e-3));

  const ModelParams pure = make_params(100, 0.3, 0.1, 0.0, 2.0);
  CHECK(noise_norm_bound(pure) ==
        doctest::Approx(std::sqrt(100.0 * 0.2)).epsilon(1e-14));
}

TEST_CASE("empirical noise norm stays within 1.3x of the bound") {
  const ModelParams p = make_params(2000, 0.025, 0.01, 0.97, 100.0);
  std::vector<double> ratios;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Seed seed{303, s};
    const LatentPositions x = sample_latents(p, seed);
    const Eigen::MatrixXd q = conditional_mean(p, kernel_matrix(x, p.gamma));
    const Eigen::MatrixXd a = sample_adjacency(q, seed).to_dense();
    const Spectrum s_noise = eig_sym(a - q, 0);
    const double norm2 = std::max(std::abs(s_noise.eigenvalues(0)),
                                  std::abs(s_noise.eigenvalues(p.n - 1)));
    ratios.push_back(norm2 / noise_norm_bound(p));
  }
  CHECK(median_of(ratios) <= 1.3);
}

TEST_CASE("regime report ratios at the reference parameters") {
  const ModelParams p = make_params(2000, 0.025, 0.01, 0.97, 100.0);
  const RegimeReport rep = check_regimes(p);
  REQUIRE(rep.checks.size() == 9);

  double size_ratio = 0.0, noise_signal = 0.0, l2_sqrt = 0.0, easy = 0.0;
  bool easy_pass = true;
  for (const RegimeCheck& c : rep.checks) {
    CHECK(std::isfinite(c.lhs));
    CHECK(std::isfinite(c.ratio));
    if (c.name == "growth_size") size_ratio = c.lhs;
    if (c.name == "noise_signal_lo") noise_signal = c.lhs;
    if (c.name == "lambda2_vs_sqrt_lambda1_lo") l2_sqrt = c.lhs;
    if (c.name == "easy_case") {
      easy = c.lhs;
      easy_pass = c.pass;
    }
  }
  CHECK(size_ratio == doctest::Approx(2000.0 / (100.0 * std::log(2000.0)))
                          .epsilon(1e-12));
  CHECK(noise_signal == doctest::Approx(9.7 / 15.0).epsilon(1e-12));
  CHECK(l2_sqrt == doctest::Approx(15.0 / std::sqrt(35.0)).epsilon(1e-12));
  // N(p1-p2) = 30 against sqrt(N) + N/gamma = 64.72...: ratio 0.46, fails.
  CHECK(easy == doctest::Approx(30.0 / (std::sqrt(2000.0) + 20.0))
                    .epsilon(1e-12));
  CHECK(easy == doctest::Approx(0.46).epsilon(0.01));
  CHECK_FALSE(easy_pass);
}

TEST_CASE("easy-case regime passes for strong parameters and predicts rho2") {
  const ModelParams p = make_params(2000, 0.2, 0.05, 0.5, 500.0);
  const RegimeReport rep = check_regimes(p);
  double easy = 0.0;
  bool easy_pass = false;
  for (const RegimeCheck& c : rep.checks) {
    if (c.name == "easy_case") {
      easy = c.ratio;
      easy_pass = c.pass;
    }
  }
  CHECK(easy == doctest::Approx(6.2).epsilon(0.02));
  CHECK(easy_pass);

  // In this regime the second adjacency eigenvalue tracks lambda2 = 150
  // and the second eigenvector carries the communities.
  const Eigen::VectorXd sigma = community_vector(p.n);
  std::vector<double> rho2s, overlaps;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Seed seed{305, s};
    const LatentPositions x = sample_latents(p, seed);
    const Eigen::MatrixXd q = conditional_mean(p, kernel_matrix(x, p.gamma));
    const Eigen::MatrixXd a = sample_adjacency(q, seed).to_dense();
    const Spectrum s_a = eig_sym(a, 2);
    rho2s.push_back(s_a.eigenvalues(1));
    overlaps.push_back(std::abs(s_a.eigenvectors.col(1).dot(sigma)));
  }
  CHECK(std::abs(median_of(rho2s) - 150.0) < 0.1 * 150.0);
  CHECK(median_of(overlaps) >= 0.9);
}

TEST_CASE("H3 alignment report") {
  const int n = 12;
  const Eigen::VectorXd v1 =
      Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));

  // Top eigenvector equal to v1: lambda1 * r1^2 = lambda1.
  const Eigen::MatrixXd aligned =
      2.0 * v1 * v1.transpose() +
      0.1 * Eigen::MatrixXd::Identity(n, n);
  const Spectrum sa = eig_sym(aligned, n);
  const H3Report ra = check_H3(sa, v1, 7.0, 3.0);
  CHECK(ra.r1_squared == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(ra.lambda1_r1_squared == doctest::Approx(7.0).epsilon(1e-10));
  CHECK(ra.gamma_r1_squared == doctest::Approx(3.0).epsilon(1e-10));
  CHECK_FALSE(ra.degenerate);

  // Top eigenvector orthogonal to v1: flagged degenerate.
  Eigen::VectorXd w = community_vector(n);
  const Eigen::MatrixXd ortho =
      2.0 * w * w.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
  const Spectrum so = eig_sym(ortho, n);
  const H3Report ro = check_H3(so, v1, 7.0, 3.0);
  CHECK(ro.r1_squared < 1e-12);
  CHECK(ro.degenerate);
}

TEST_CASE("H3 alignment stays positive on sampled kernels") {
  // Reference parameters, 5 seeds: lambda1 * r1^2 should stay clearly
  // away from zero. The 0.5 floor is a pilot-pinned threshold (see
  // README); observed values sit far above it.
  const int n = 2000;
  const double gamma = 100.0;
  double min_val = 1e300;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const LatentPositions x = sample_latents(n, Seed{307, s});
    const Eigen::MatrixXd kp = 0.97 * kernel_matrix(x, gamma);
    const Spectrum sp = eig_sym(kp, 1);
    const Eigen::VectorXd v1 =
        Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
    const H3Report rep = check_H3(sp, v1, 35.0, gamma);
    min_val = std::min(min_val, rep.lambda1_r1_squared);
    CHECK_FALSE(rep.degenerate);
  }
  CHECK(min_val > 0.5);
}

TEST_CASE("separation condition arithmetic and equivalence") {
  CHECK(separation_condition(make_params(2000, 0.04, 0.01, 0.5, 200.0), 1.0));
  CHECK_FALSE(
      separation_condition(make_params(2000, 0.025, 0.01, 0.97, 100.0), 0.05));
  // kappa = 0: holds for any epsilon.
  CHECK(separation_condition(make_params(2000, 0.025, 0.01, 0.0, 100.0), 9.0));
  CHECK_THROWS_AS(
      separation_condition(make_params(8, 0.3, 0.1, 0.5, 1.0), 0.0),
      std::invalid_argument);

  // Displayed equivalence with the eigenvalue form, over a small sweep.
  for (double gamma : {5.0, 20.0, 80.0, 300.0}) {
    for (double eps : {0.05, 0.5, 2.0}) {
      const ModelParams p = make_params(500, 0.06, 0.02, 0.4, gamma);
      const auto [l1, l2] = lambda12(p);
      (void)l1;
      CHECK(separation_condition(p, eps) ==
            (l2 >= 4.0 * mu1_approx(p) * (1.0 + eps)));
    }
  }
}

TEST_CASE("asymptotic correlation bound shape") {
  CHECK(asymptotic_correlation_bound(35.0 / 15.0, 0.0) ==
        doctest::Approx(1.0).epsilon(1e-14));

  const double q = 35.0 / 15.0;
  const std::optional<double> at_small = asymptotic_correlation_bound(q, 0.01);
  REQUIRE(at_small.has_value());
  CHECK(*at_small > 0.0);
  CHECK(*at_small < 1.0);

  // Decreasing along an x grid inside the validity region.
  double prev = 1.0 + 1e-12;
  const double x_max = (q - 1.0) / (8.0 * q);
  for (int i = 0; i <= 20; ++i) {
    const double x = 0.95 * x_max * i / 20.0;
    const std::optional<double> b = asymptotic_correlation_bound(q, x);
    REQUIRE(b.has_value());
    CHECK(*b <= prev);
    CHECK(*b >= 0.0);
    prev = *b;
  }

  // Outside the gate there is no bound.
  CHECK_FALSE(asymptotic_correlation_bound(q, x_max * 1.05).has_value());
  CHECK_THROWS_AS(asymptotic_correlation_bound(1.0, 0.01),
                  std::invalid_argument);
  CHECK_THROWS_AS(asymptotic_correlation_bound(2.0, -0.1),
                  std::invalid_argument);
}

TEST_CASE("asymptotic bound sits below the exact correlation") {
  // Consistency of the closed-form lower bound against the exact
  // secular-identity value on randomized instances. Each draw is scaled
  // so that x = mu1/lambda2 lands inside the validity region (scaling
  // the perturbation by a constant only rescales its eigenvalues).
  for (std::uint64_t idx = 500; idx < 550; ++idx) {
    const auto inst = testutil::make_instance(idx);
    Spectrum s = eig_sym(inst.p1, inst.params.n);
    const double q = inst.lambda1 / inst.lambda2;
    const double x_max = (q - 1.0) / (8.0 * q);
    const double x_raw = s.eigenvalues(0) / inst.lambda2;
    REQUIRE(x_raw > 0.0);
    const double scale = std::min(1.0, 0.5 * x_max / x_raw);
    s.eigenvalues *= scale;
    const ResolventContext ctx =
        build_context(s, inst.v1, inst.sigma, inst.lambda1, inst.lambda2);
    const double x = ctx.mu(0) / inst.lambda2;
    const std::optional<double> bound = asymptotic_correlation_bound(q, x);
    REQUIRE(bound.has_value());
    const std::vector<double> roots = detached_eigenvalues(ctx);
    REQUIRE(roots.size() == 2);
    const double exact = predicted_correlation(ctx, roots[1]);
    CHECK(*bound <= exact + 1e-9);
  }
}

TEST_CASE("isolated vertex quadrature against closed forms") {
  for (double gamma : {0.5, 1.0, 3.0, 10.0, 50.0}) {
    const double two = expected_isolated_vertices(2, gamma);
    CHECK(std::abs(two - 2.0 * (1.0 - 1.0 / (1.0 + 4.0 * gamma))) < 1e-10);

    // Independent three-vertex closed form by Gaussian integration.
    const double p_iso = 1.0 - 2.0 / (1.0 + 4.0 * gamma) +
                         1.0 / ((1.0 + 2.0 * gamma) * (1.0 + 6.0 * gamma));
    const double three = expected_isolated_vertices(3, gamma);
    CHECK(std::abs(three - 3.0 * p_iso) < 1e-9);
  }
}

TEST_CASE("isolated vertex count is monotone in gamma") {
  const int n = 100;
  double prev = -1.0;
  for (double gamma : {1.0, 2.0, 5.0, 10.0, 20.0}) {
    const double v = expected_isolated_vertices(n, gamma);
    CHECK(v > prev);
    CHECK(v >= 0.0);
    CHECK(v <= n);
    prev = v;
  }
  // Wide kernel: graph nearly complete, almost nothing isolated.
  CHECK(expected_isolated_vertices(50, 1e-4) < 0.01);
}
