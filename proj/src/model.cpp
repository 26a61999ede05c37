#include "sbmlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sbmlab {

ModelParams make_params(int n, double p1, double p2, double kappa,
                        double gamma) {
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument("n must be even and >= 2, got " +
                                std::to_string(n));
  }
  if (!(p1 > 0.0 && p1 < 1.0)) {
    throw std::invalid_argument("p1 must lie in (0, 1), got " +
                                std::to_string(p1));
  }
  if (!(p2 > 0.0 && p2 < 1.0)) {
    throw std::invalid_argument("p2 must lie in (0, 1), got " +
                                std::to_string(p2));
  }
  if (!(p1 > p2)) {
    throw std::invalid_argument("p1 must exceed p2 (assortative blocks)");
  }
  if (!(kappa >= 0.0 && kappa <= 1.0)) {
    throw std::invalid_argument("kappa must lie in [0, 1], got " +
                                std::to_string(kappa));
  }
  if (!(gamma > 0.0)) {
    throw std::invalid_argument("gamma must be positive, got " +
                                std::to_string(gamma));
  }
  if (kappa + std::max(p1, p2) > 1.0) {
    throw std::invalid_argument(
        "kappa + max(p1, p2) must not exceed 1, got " +
        std::to_string(kappa + std::max(p1, p2)));
  }
  return ModelParams{n, p1, p2, kappa, gamma};
}

LatentPositions sample_latents(int n, Seed seed) {
  Rng rng(seed, kSubstreamLatents);
  LatentPositions x(n, 2);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = rng.next_normal();
    x(i, 1) = rng.next_normal();
  }
  return x;
}

LatentPositions sample_latents(const ModelParams& params, Seed seed) {
  return sample_latents(params.n, seed);
}

Eigen::VectorXd community_vector(int n) {
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument("community_vector needs even n >= 2");
  }
  Eigen::VectorXd sigma(n);
  const double a = 1.0 / std::sqrt(static_cast<double>(n));
  sigma.head(n / 2).setConstant(a);
  sigma.tail(n / 2).setConstant(-a);
  return sigma;
}

double marginal_edge_probability(const ModelParams& params) {
  return 0.5 * (params.p1 + params.p2) +
         params.kappa / (1.0 + 4.0 * params.gamma);
}

}  // namespace sbmlab
