#include "sbmlab/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "sbmlab/neumaier.hpp"

namespace sbmlab {
namespace {

struct SecularParts {
  double a1 = 0.0, a2 = 0.0, b = 0.0;     // resolvent sums
  double da1 = 0.0, da2 = 0.0, db = 0.0;  // their theta derivatives
};

SecularParts compute_parts(const ResolventContext& ctx, double theta) {
  const Eigen::Index n = ctx.mu.size();
  NeumaierSum a1, a2, b, da1, da2, db;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double d = ctx.mu(j) - theta;  // strictly negative above mu_1
    const double inv = 1.0 / d;
    const double inv2 = inv * inv;
    const double rj = ctx.r(j), sj = ctx.s(j);
    a1.add(rj * rj * inv);
    a2.add(sj * sj * inv);
    b.add(rj * sj * inv);
    da1.add(rj * rj * inv2);
    da2.add(sj * sj * inv2);
    db.add(rj * sj * inv2);
  }
  return {a1.value(), a2.value(), b.value(),
          da1.value(), da2.value(), db.value()};
}

void require_above_bulk(const ResolventContext& ctx, double theta) {
  if (!(theta > ctx.mu(0))) {
    throw std::invalid_argument(
        "secular function is only defined above the largest perturbation "
        "eigenvalue");
  }
}

double value_from_parts(const ResolventContext& ctx, const SecularParts& p) {
  return (1.0 + ctx.lambda1 * p.a1) * (1.0 + ctx.lambda2 * p.a2) -
         ctx.lambda1 * ctx.lambda2 * p.b * p.b;
}

double derivative_from_parts(const ResolventContext& ctx,
                             const SecularParts& p) {
  return ctx.lambda1 * p.da1 * (1.0 + ctx.lambda2 * p.a2) +
         ctx.lambda2 * p.da2 * (1.0 + ctx.lambda1 * p.a1) -
         2.0 * ctx.lambda1 * ctx.lambda2 * p.b * p.db;
}

// Root of 1 + lambda*sum_j c_j/(mu_j - theta) in (lo, hi), if any. The
// function is strictly increasing there, so a sign change at the ends
// decides existence and bisection finds it.
std::optional<double> diagonal_root(const Eigen::VectorXd& mu,
                                    const Eigen::VectorXd& c, double lambda,
                                    double lo, double hi) {
  auto h = [&](double theta) {
    NeumaierSum acc;
    for (Eigen::Index j = 0; j < mu.size(); ++j) {
      acc.add(c(j) * c(j) / (mu(j) - theta));
    }
    return 1.0 + lambda * acc.value();
  };
  double flo = h(lo), fhi = h(hi);
  if (flo > 0.0 || fhi < 0.0) return std::nullopt;
  for (int it = 0; it < 200 && (hi - lo) > 1e-13 * std::max(1.0, std::abs(hi));
       ++it) {
    const double mid = 0.5 * (lo + hi);
    if (h(mid) <= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ResolventContext build_context(const Spectrum& perturbation_spectrum,
                               const Eigen::VectorXd& v1,
                               const Eigen::VectorXd& sigma, double lambda1,
                               double lambda2) {
  const Eigen::Index n = perturbation_spectrum.eigenvalues.size();
  if (perturbation_spectrum.eigenvectors.cols() != n ||
      perturbation_spectrum.eigenvectors.rows() != n) {
    throw std::invalid_argument(
        "build_context needs the full eigenvector basis of the perturbation");
  }
  if (v1.size() != n || sigma.size() != n) {
    throw std::invalid_argument("v1/sigma size mismatch");
  }
  if (!(lambda1 >= lambda2 && lambda2 > 0.0)) {
    throw std::invalid_argument("need lambda1 >= lambda2 > 0");
  }
  ResolventContext ctx;
  ctx.mu = perturbation_spectrum.eigenvalues;
  ctx.r = perturbation_spectrum.eigenvectors.transpose() * v1;
  ctx.s = perturbation_spectrum.eigenvectors.transpose() * sigma;
  ctx.lambda1 = lambda1;
  ctx.lambda2 = lambda2;
  // A complete orthonormal basis preserves the unit norms of v1 and sigma.
  if (std::abs(ctx.r.squaredNorm() - 1.0) > 1e-10 ||
      std::abs(ctx.s.squaredNorm() - 1.0) > 1e-10) {
    throw std::invalid_argument(
        "overlap vectors are not unit norm; v1/sigma must be normalized and "
        "the eigenbasis complete");
  }
  return ctx;
}

double secular_value(const ResolventContext& ctx, double theta) {
  require_above_bulk(ctx, theta);
  return value_from_parts(ctx, compute_parts(ctx, theta));
}

double secular_derivative(const ResolventContext& ctx, double theta) {
  require_above_bulk(ctx, theta);
  return derivative_from_parts(ctx, compute_parts(ctx, theta));
}

std::vector<double> detached_eigenvalues(const ResolventContext& ctx) {
  const double mu1 = ctx.mu(0);
  const double scale = std::max(1.0, std::abs(mu1));
  const double lo = mu1 + 1e-9 * scale;
  const double hi = mu1 + ctx.lambda1 + ctx.lambda2;
  if (!(lo < hi)) return {};

  auto f = [&](double theta) { return secular_value(ctx, theta); };

  // Geometric grid in theta - mu1 resolves the region near the bulk edge
  // where the secular function moves fastest.
  constexpr int kGridPoints = 512;
  std::vector<double> grid;
  grid.reserve(kGridPoints + 4);
  const double span = (hi - mu1) / (lo - mu1);
  const double growth = std::pow(span, 1.0 / (kGridPoints - 1));
  double t = lo - mu1;
  for (int i = 0; i < kGridPoints; ++i) {
    grid.push_back(mu1 + t);
    t *= growth;
  }
  grid.back() = hi;

  // Where 1 + lambda_i*a_i vanishes the secular value is guaranteed
  // nonpositive, so these points split a twin-root dip that a coarse
  // scan could miss.
  if (auto p = diagonal_root(ctx.mu, ctx.r, ctx.lambda1, lo, hi)) {
    grid.push_back(*p);
  }
  if (auto p = diagonal_root(ctx.mu, ctx.s, ctx.lambda2, lo, hi)) {
    grid.push_back(*p);
  }
  std::sort(grid.begin(), grid.end());

  std::vector<double> roots;
  double prev_theta = grid.front();
  double prev_value = f(prev_theta);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double theta = grid[i];
    if (theta <= prev_theta) continue;
    const double value = f(theta);
    if (prev_value == 0.0) {
      roots.push_back(prev_theta);
    } else if ((prev_value < 0.0) != (value < 0.0) && value != 0.0) {
      double a = prev_theta, b = theta;
      double fa = prev_value;
      while ((b - a) > 1e-12 * std::max(1.0, std::abs(b))) {
        const double mid = 0.5 * (a + b);
        const double fm = f(mid);
        if (fm == 0.0) {
          a = b = mid;
          break;
        }
        if ((fa < 0.0) == (fm < 0.0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    prev_theta = theta;
    prev_value = value;
  }
  if (prev_value == 0.0) roots.push_back(prev_theta);

  // Merge rediscoveries of the same root through inserted grid points.
  std::sort(roots.begin(), roots.end());
  std::vector<double> merged;
  for (double rt : roots) {
    if (merged.empty() || rt - merged.back() > 1e-9 * std::max(1.0, std::abs(rt))) {
      merged.push_back(rt);
    }
  }
  if (merged.size() > 2) {
    throw std::runtime_error(
        "secular scan found " + std::to_string(merged.size()) +
        " roots above the bulk; a rank-two update admits at most two");
  }
  // A certified bracket of relative width 1e-12 is the primary root
  // certificate; the residual check catches any bookkeeping slip.
  for (double rt : merged) {
    if (std::abs(f(rt)) > 1e-9 &&
        std::abs(f(rt)) > 1e-10 * std::abs(secular_derivative(ctx, rt)) *
                              std::max(1.0, std::abs(rt))) {
      throw std::runtime_error("secular root failed residual verification");
    }
  }
  std::reverse(merged.begin(), merged.end());
  return merged;
}

double predicted_correlation(const ResolventContext& ctx, double theta) {
  require_above_bulk(ctx, theta);
  const SecularParts p = compute_parts(ctx, theta);
  const double numerator = 1.0 + ctx.lambda1 * p.a1;
  const double denominator = ctx.lambda2 * derivative_from_parts(ctx, p);
  if (denominator == 0.0) {
    throw std::runtime_error("secular derivative vanishes at theta");
  }
  const double corr = numerator / denominator;
  if (corr < -1e-9 || corr > 1.0 + 1e-9) {
    throw std::runtime_error(
        "correlation " + std::to_string(corr) +
        " outside [0, 1]; theta is not a detached root of this context");
  }
  return std::clamp(corr, 0.0, 1.0);
}

SeparationCertificate separation_certificate(const ResolventContext& ctx,
                                             double epsilon) {
  if (!(epsilon >= 0.0)) {
    throw std::invalid_argument("epsilon must be nonnegative");
  }
  SeparationCertificate cert;
  cert.mu1 = ctx.mu(0);
  cert.lambda2 = ctx.lambda2;
  cert.epsilon = epsilon;
  cert.threshold = 4.0 * cert.mu1 * (1.0 + epsilon);
  cert.holds = cert.lambda2 >= cert.threshold;
  return cert;
}

}  // namespace sbmlab
