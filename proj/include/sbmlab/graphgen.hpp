#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "sbmlab/model.hpp"
#include "sbmlab/rng.hpp"

namespace sbmlab {

/// Gaussian kernel matrix: entry (i, j) is exp(-gamma*|x_i - x_j|^2) for
/// i != j, and 0 on the diagonal (no self loops anywhere downstream).
using KernelMatrix = Eigen::MatrixXd;

/// The two-block mean matrix, held by its parameters. Off-diagonal
/// structure: p1 within a community, p2 across. Rank two with known
/// eigenpairs, so it is materialized only when a dense copy is needed.
class BlockMatrix {
 public:
  explicit BlockMatrix(const ModelParams& params);

  int size() const { return n_; }

  /// Largest eigenvalue N*(p1 + p2)/2, eigenvector v1.
  double lambda1() const { return lambda1_; }

  /// Second eigenvalue N*(p1 - p2)/2, eigenvector equal to the community
  /// vector. Positive because p1 > p2; all other eigenvalues are 0.
  double lambda2() const { return lambda2_; }

  /// Normalized all-ones vector (1/sqrt(N), ..., 1/sqrt(N)).
  Eigen::VectorXd v1() const;

  /// The community vector; see community_vector().
  Eigen::VectorXd v2() const { return community_vector(n_); }

  /// Dense copy, including the diagonal entries (p1 on the diagonal).
  Eigen::MatrixXd materialize() const;

 private:
  int n_;
  double p1_, p2_;
  double lambda1_, lambda2_;
};

/// Symmetric 0/1 adjacency matrix with a zero diagonal, bit-packed.
class AdjacencyMatrix {
 public:
  explicit AdjacencyMatrix(int n);

  int size() const { return n_; }
  bool at(int i, int j) const;
  /// Adds edge {i, j} in both orientations; requires i != j.
  void set_edge(int i, int j);
  std::int64_t edge_count() const;
  Eigen::MatrixXd to_dense() const;

 private:
  int n_;
  int words_per_row_;
  std::vector<std::uint64_t> bits_;
};

/// Pairwise kernel matrix of the given latent positions.
KernelMatrix kernel_matrix(const LatentPositions& latents, double gamma);

/// Conditional edge probability matrix given the latent positions:
/// kappa*kernel + block mean off the diagonal, 0 on the diagonal.
/// Entries are clamped to [0, 1]; a clamp that moves any entry by more
/// than 1e-12 signals invalid parameters and throws std::runtime_error.
Eigen::MatrixXd conditional_mean(const ModelParams& params,
                                 const KernelMatrix& kernel);

/// Samples the upper triangle of a symmetric adjacency matrix with
/// independent Bernoulli(q_ij) edges, row-major order (1,2), (1,3), ...,
/// from the edge substream of the seed.
AdjacencyMatrix sample_adjacency(const Eigen::MatrixXd& q, Seed seed);

}  // namespace sbmlab
