#include "sbmlab/graphgen.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sbmlab {

BlockMatrix::BlockMatrix(const ModelParams& params)
    : n_(params.n), p1_(params.p1), p2_(params.p2) {
  // Evaluated as halfN*p1 +/- halfN*p2 so that round parameter choices
  // (e.g. N=2000, p1=0.025, p2=0.01) yield exact double eigenvalues.
  const double half_n = 0.5 * static_cast<double>(n_);
  lambda1_ = half_n * p1_ + half_n * p2_;
  lambda2_ = half_n * p1_ - half_n * p2_;
}

Eigen::VectorXd BlockMatrix::v1() const {
  return Eigen::VectorXd::Constant(n_,
                                   1.0 / std::sqrt(static_cast<double>(n_)));
}

Eigen::MatrixXd BlockMatrix::materialize() const {
  Eigen::MatrixXd m(n_, n_);
  const int h = n_ / 2;
  m.topLeftCorner(h, h).setConstant(p1_);
  m.bottomRightCorner(h, h).setConstant(p1_);
  m.topRightCorner(h, h).setConstant(p2_);
  m.bottomLeftCorner(h, h).setConstant(p2_);
  return m;
}

AdjacencyMatrix::AdjacencyMatrix(int n)
    : n_(n), words_per_row_((n + 63) / 64),
      bits_(static_cast<std::size_t>(n) * words_per_row_, 0) {
  if (n < 1) throw std::invalid_argument("adjacency size must be positive");
}

bool AdjacencyMatrix::at(int i, int j) const {
  const std::size_t w =
      static_cast<std::size_t>(i) * words_per_row_ + static_cast<std::size_t>(j) / 64;
  return (bits_[w] >> (j % 64)) & 1u;
}

void AdjacencyMatrix::set_edge(int i, int j) {
  if (i == j) throw std::invalid_argument("self loops are not allowed");
  bits_[static_cast<std::size_t>(i) * words_per_row_ + j / 64] |=
      std::uint64_t{1} << (j % 64);
  bits_[static_cast<std::size_t>(j) * words_per_row_ + i / 64] |=
      std::uint64_t{1} << (i % 64);
}

std::int64_t AdjacencyMatrix::edge_count() const {
  std::int64_t total = 0;
  for (std::uint64_t w : bits_) total += __builtin_popcountll(w);
  return total / 2;  // each edge is stored in both orientations
}

Eigen::MatrixXd AdjacencyMatrix::to_dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      if (at(i, j)) m(i, j) = m(j, i) = 1.0;
  return m;
}

KernelMatrix kernel_matrix(const LatentPositions& latents, double gamma) {
  const int n = static_cast<int>(latents.rows());
  KernelMatrix p = KernelMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dx = latents(i, 0) - latents(j, 0);
      const double dy = latents(i, 1) - latents(j, 1);
      const double v = std::exp(-gamma * (dx * dx + dy * dy));
      p(i, j) = v;
      p(j, i) = v;
    }
  }
  return p;
}

Eigen::MatrixXd conditional_mean(const ModelParams& params,
                                 const KernelMatrix& kernel) {
  if (kernel.rows() != params.n || kernel.cols() != params.n) {
    throw std::invalid_argument("kernel size does not match params.n");
  }
  const int n = params.n;
  const int h = n / 2;
  Eigen::MatrixXd q(n, n);
  double worst_clamp = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        q(i, j) = 0.0;
        continue;
      }
      const double block = ((i < h) == (j < h)) ? params.p1 : params.p2;
      double v = params.kappa * kernel(i, j) + block;
      if (v < 0.0) {
        worst_clamp = std::max(worst_clamp, -v);
        v = 0.0;
      } else if (v > 1.0) {
        worst_clamp = std::max(worst_clamp, v - 1.0);
        v = 1.0;
      }
      q(i, j) = v;
    }
  }
  if (worst_clamp > 1e-12) {
    throw std::runtime_error(
        "conditional mean left [0, 1] by " + std::to_string(worst_clamp) +
        "; parameters violate the probability constraint");
  }
  return q;
}

AdjacencyMatrix sample_adjacency(const Eigen::MatrixXd& q, Seed seed) {
  const int n = static_cast<int>(q.rows());
  if (q.cols() != n) throw std::invalid_argument("q must be square");
  Rng rng(seed, kSubstreamEdges);
  AdjacencyMatrix a(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.bernoulli(q(i, j))) a.set_edge(i, j);
    }
  }
  return a;
}

}  // namespace sbmlab
