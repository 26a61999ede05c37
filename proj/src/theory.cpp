#include "sbmlab/theory.hpp"

#include <cmath>
#include <stdexcept>

namespace sbmlab {

std::pair<double, double> lambda12(const ModelParams& params) {
  // halfN*p1 +/- halfN*p2 keeps round parameter choices exact; see
  // BlockMatrix.
  const double half_n = 0.5 * static_cast<double>(params.n);
  return {half_n * params.p1 + half_n * params.p2,
          half_n * params.p1 - half_n * params.p2};
}

double mu1_approx(const ModelParams& params) {
  return params.kappa * static_cast<double>(params.n) / (2.0 * params.gamma);
}

double noise_norm_bound(const ModelParams& params) {
  const double n = static_cast<double>(params.n);
  return std::sqrt(params.kappa * n / params.gamma) +
         std::sqrt(n * (0.5 * (params.p1 + params.p2) +
                        params.kappa / (2.0 * params.gamma)));
}

namespace {

RegimeCheck at_least(std::string name, double lhs, double rhs) {
  return {std::move(name), lhs, rhs, lhs / rhs, lhs >= rhs};
}

RegimeCheck at_most(std::string name, double lhs, double rhs) {
  return {std::move(name), lhs, rhs, lhs / rhs, lhs <= rhs};
}

}  // namespace

RegimeReport check_regimes(const ModelParams& params,
                           const RegimeMargins& margins) {
  const double n = static_cast<double>(params.n);
  const auto [lambda1, lambda2] = lambda12(params);
  const double size_ratio = n / (params.gamma * std::log(n));
  const double noise_signal = mu1_approx(params) / lambda2;
  const double lambda_ratio = lambda2 / lambda1;
  const double lambda2_vs_sqrt = lambda2 / std::sqrt(lambda1);
  const double easy_case =
      n * (params.p1 - params.p2) / (std::sqrt(n) + n / params.gamma);

  RegimeReport rep;
  rep.checks.push_back(at_least("growth_gamma", params.gamma,
                                margins.gamma_min));
  rep.checks.push_back(at_least("growth_size", size_ratio,
                                margins.size_ratio_min));
  rep.checks.push_back(at_least("noise_signal_lo", noise_signal,
                                margins.band_lo));
  rep.checks.push_back(at_most("noise_signal_hi", noise_signal,
                               margins.band_hi));
  rep.checks.push_back(at_least("lambda_ratio_lo", lambda_ratio,
                                margins.band_lo));
  rep.checks.push_back(at_most("lambda_ratio_hi", lambda_ratio,
                               margins.band_hi));
  rep.checks.push_back(at_least("lambda2_vs_sqrt_lambda1_lo", lambda2_vs_sqrt,
                                margins.band_lo));
  rep.checks.push_back(at_most("lambda2_vs_sqrt_lambda1_hi", lambda2_vs_sqrt,
                               margins.band_hi));
  rep.checks.push_back(at_least("easy_case", easy_case,
                                margins.easy_case_min));
  rep.all_pass = true;
  for (const RegimeCheck& c : rep.checks) rep.all_pass = rep.all_pass && c.pass;
  return rep;
}

H3Report check_H3(const Spectrum& p1_spectrum, const Eigen::VectorXd& v1,
                  double lambda1, double gamma) {
  if (p1_spectrum.eigenvectors.cols() < 1) {
    throw std::invalid_argument("check_H3 needs the top eigenvector");
  }
  if (p1_spectrum.eigenvectors.rows() != v1.size()) {
    throw std::invalid_argument("check_H3: v1 size mismatch");
  }
  const double r1 = p1_spectrum.eigenvectors.col(0).dot(v1);
  H3Report rep;
  rep.r1_squared = r1 * r1;
  rep.lambda1_r1_squared = lambda1 * rep.r1_squared;
  rep.gamma_r1_squared = gamma * rep.r1_squared;
  rep.degenerate = rep.r1_squared < 1e-12;
  return rep;
}

bool separation_condition(const ModelParams& params, double epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("epsilon must be positive");
  }
  return 0.5 * (params.p1 - params.p2) >=
         (2.0 * params.kappa / params.gamma) * (1.0 + epsilon);
}

std::optional<double> asymptotic_correlation_bound(double q, double x) {
  if (!(q > 1.0)) {
    throw std::invalid_argument("asymptotic bound needs q = lambda1/lambda2 > 1");
  }
  if (!(x >= 0.0)) {
    throw std::invalid_argument("asymptotic bound needs x >= 0");
  }
  const double g = 3.0 + 4.0 / (q - 1.0);
  if ((g + 1.0) * x > 0.5) return std::nullopt;  // outside validity range
  const double shrink = 1.0 - (g + 1.0) * x;
  const double denom =
      1.0 + (g + 1.0) / (2.0 * (q - 1.0)) * x + std::sqrt(q * (g + 1.0) * x);
  return (1.0 - 2.0 * x / (q - 1.0)) * shrink * shrink * shrink /
         (denom * denom);
}

namespace {

// Adaptive Simpson with the standard 15x error estimate. Depth is
// generous so that sharp (but smooth) transition regions of the
// isolated-vertex integrand at large N resolve comfortably.
template <typename F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm,
                        double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  if (depth <= 0) {
    throw std::runtime_error("isolated-vertex quadrature did not converge");
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double expected_isolated_vertices(int n, double gamma) {
  if (n < 2) throw std::invalid_argument("need n >= 2");
  if (!(gamma > 0.0)) throw std::invalid_argument("need gamma > 0");
  const double c = 1.0 / (1.0 + 2.0 * gamma);
  const double beta = 2.0 * gamma / (1.0 + 2.0 * gamma);
  // Integrate in the t variable directly: the integrand is smooth for
  // every beta (a u = e^{-t} substitution develops an unresolvable
  // boundary layer at u = 0 when gamma is small). The e^{-t} factor
  // bounds the truncated tail by e^{-40} ~ 4e-18, far below the 1e-10
  // tolerance.
  const auto f = [&](double t) {
    return std::exp(-t) * std::pow(1.0 - c * std::exp(-beta * t), n - 1);
  };
  const double kCutoff = 40.0;
  const double fa = f(0.0), fm = f(0.5 * kCutoff), fb = f(kCutoff);
  const double whole = kCutoff * (fa + 4.0 * fm + fb) / 6.0;
  const double integral =
      adaptive_simpson(f, 0.0, kCutoff, fa, fm, fb, whole, 1e-10, 64);
  return static_cast<double>(n) * integral;
}

}  // namespace sbmlab
