#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sbmlab/model.hpp"
#include "sbmlab/spectrum.hpp"

namespace sbmlab {

/// Block eigenvalues (N*(p1+p2)/2, N*(p1-p2)/2).
std::pair<double, double> lambda12(const ModelParams& params);

/// Leading-order size of the top kernel eigenvalue: kappa*N/(2*gamma).
double mu1_approx(const ModelParams& params);

/// Upper estimate for the spectral norm of the centered noise A - Q:
/// sqrt(kappa*N/gamma) + sqrt(N*((p1+p2)/2 + kappa/(2*gamma))).
double noise_norm_bound(const ModelParams& params);

/// One checked inequality: measured value on the left, the margin it is
/// held against on the right.
struct RegimeCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  // lhs / rhs
  bool pass = false;
};

/// Margins for the finite-size regime gates. The asymptotic statements
/// are limits; these thresholds make them checkable at fixed N and are
/// deliberately configurable.
struct RegimeMargins {
  double gamma_min = 20.0;
  double size_ratio_min = 2.0;  // N/(gamma ln N)
  double band_lo = 0.1;         // order-of-magnitude band for signal ratios
  double band_hi = 10.0;
  double easy_case_min = 1.0;   // N(p1-p2) vs sqrt(N) + N/gamma
};

struct RegimeReport {
  std::vector<RegimeCheck> checks;
  bool all_pass = false;
};

/// Evaluates the growth, signal-strength, and easy-case ratios:
/// gamma itself, N/(gamma ln N), (kappa N/2gamma)/lambda2,
/// lambda2/lambda1, lambda2/sqrt(lambda1), and
/// N(p1-p2)/(sqrt(N) + N/gamma). Band ratios produce one record per
/// inequality (lower and upper).
RegimeReport check_regimes(const ModelParams& params,
                           const RegimeMargins& margins = {});

/// Alignment of the top perturbation eigenvector with the all-ones
/// direction: reports r1^2 = <v1, w1>^2 together with lambda1*r1^2 and
/// gamma*r1^2. Downstream theory needs these bounded away from zero;
/// degenerate flags an essentially orthogonal w1.
struct H3Report {
  double r1_squared = 0.0;
  double lambda1_r1_squared = 0.0;
  double gamma_r1_squared = 0.0;
  bool degenerate = false;  // r1^2 below 1e-12
};
H3Report check_H3(const Spectrum& p1_spectrum, const Eigen::VectorXd& v1,
                  double lambda1, double gamma);

/// Parameter-level form of the separation certificate:
/// (p1-p2)/2 >= (2*kappa/gamma)*(1+epsilon), equivalent to
/// lambda2 >= 4*mu1_approx*(1+epsilon).
bool separation_condition(const ModelParams& params, double epsilon);

/// Closed-form lower bound on the squared correlation between the
/// community vector and the second detached eigenvector, as a function
/// of q = lambda1/lambda2 and x = mu1/lambda2:
///   (1 - 2x/(q-1)) * (1-(g+1)x)^3
///     / (1 + ((g+1)/(2(q-1)))x + sqrt(q(g+1)x))^2,  g = 3 + 4/(q-1).
/// Valid only while (g+1)*x <= 1/2 (equivalently x <= (q-1)/(8q));
/// outside that range there is no bound and nothing is returned.
std::optional<double> asymptotic_correlation_bound(double q, double x);

/// Expected number of isolated vertices of the pure-kernel graph
/// (kappa = 1, no block term):
///   N * Int_0^inf e^{-t} (1 - c e^{-beta t})^{N-1} dt,
/// c = 1/(1+2gamma), beta = 2gamma/(1+2gamma), evaluated by adaptive
/// quadrature to absolute tolerance 1e-10*N. Throws std::runtime_error
/// if the quadrature fails to converge.
double expected_isolated_vertices(int n, double gamma);

}  // namespace sbmlab
