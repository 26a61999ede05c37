#pragma once

#include <Eigen/Core>

#include "sbmlab/rng.hpp"

namespace sbmlab {

/// Parameters of the block model with a Gaussian-kernel geometric
/// perturbation. Vertices 1..N/2 form community one, N/2+1..N community
/// two; an intra-community pair is connected with probability
/// kappa*exp(-gamma*d^2) + p1 and an inter-community pair with
/// kappa*exp(-gamma*d^2) + p2, where d is the distance between the
/// endpoints' latent positions.
struct ModelParams {
  int n = 0;           // vertex count, even, >= 2
  double p1 = 0.0;     // intra-community edge probability
  double p2 = 0.0;     // inter-community edge probability
  double kappa = 0.0;  // kernel amplitude
  double gamma = 0.0;  // inverse squared kernel width
};

/// N rows of 2-D latent positions; row i is vertex i's position.
using LatentPositions = Eigen::Matrix<double, Eigen::Dynamic, 2>;

/// Validates parameters and returns the packed struct. Requirements:
/// N even and >= 2, p1 and p2 in (0, 1) with p1 > p2, kappa in [0, 1],
/// gamma > 0, and kappa + max(p1, p2) <= 1 so every edge probability
/// stays in [0, 1]. Throws std::invalid_argument naming the violated
/// constraint.
ModelParams make_params(int n, double p1, double p2, double kappa,
                        double gamma);

/// N i.i.d. standard 2-D Gaussian latent positions. Pure function of
/// (n, seed): draws come from the dedicated latent substream, so edge
/// sampling never perturbs them.
LatentPositions sample_latents(int n, Seed seed);
LatentPositions sample_latents(const ModelParams& params, Seed seed);

/// The normalized community membership vector: +1/sqrt(N) on the first
/// half of the coordinates, -1/sqrt(N) on the second half.
Eigen::VectorXd community_vector(int n);

/// Expected edge probability over both latent positions and community
/// assignment of a uniform vertex pair: (p1 + p2)/2 + kappa/(1 + 4 gamma).
double marginal_edge_probability(const ModelParams& params);

}  // namespace sbmlab
