#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "sbmlab/rng.hpp"

namespace sbmlab {

/// A multigraph obtained by identifying non-adjacent vertices of the
/// length-l cycle: k distinct vertices, edges with multiplicities
/// summing to l, always connected and loop-free. `count` is the number
/// of labeled identification patterns in this isomorphism class.
struct CycleQuotient {
  int k = 0;
  std::vector<std::array<int, 3>> edges;  // {u, v, multiplicity}, u < v
  long long count = 0;
};

/// All isomorphism classes of cycle quotients for walk length l,
/// enumerated by brute force over set partitions with the cyclic
/// adjacency constraint, grouped by degree/edge-multiset hashing plus
/// exact isomorphism confirmation. 2 <= l <= 8.
std::vector<CycleQuotient> enumerate_cycle_quotients(int l);

/// Multiplicity-weighted Laplacian: degree (with multiplicity) on the
/// diagonal, minus multiplicity off it. Row sums vanish.
Eigen::MatrixXd multigraph_laplacian(const CycleQuotient& q);

/// Coefficients e_0..e_k of det(I + t*L) as a polynomial in t, where
/// e_m is the sum of the m-by-m principal minors of the Laplacian.
/// Computed in exact integer arithmetic; e_0 = 1 and e_k = 0 for every
/// connected quotient.
std::vector<long long> det_polynomial_coeffs(const CycleQuotient& q);

/// Number of spanning trees of the quotient multigraph, by an exact
/// integer Kirchhoff cofactor. Independent of det_polynomial_coeffs:
/// the identity e_{k-1} = k * (number of spanning trees) ties the two
/// routes together.
long long spanning_tree_count(const CycleQuotient& q);

/// E prod_e kernel_e over the latent positions of the quotient's
/// vertices: 1/det(I + 2*gamma*L), evaluated by Horner on the exact
/// integer coefficients.
double edge_product_expectation(const CycleQuotient& q, double gamma);

/// Exact value of E Tr P^l: sum over quotient classes of
/// count * N(N-1)...(N-k+1) / det(I + 2*gamma*L).
double exact_expected_trace_moment(int n, double gamma, int l);

/// Tr P^l = sum of eigenvalue powers. The matrix overload runs a full
/// eigensolve; the vector overload reuses an existing spectrum.
double empirical_trace_moment(const Eigen::MatrixXd& p, int l);
double empirical_trace_moment(const Eigen::VectorXd& eigenvalues, int l);

/// The normalized moment (1/(2 gamma)) * (2 gamma/N)^l * E Tr P^l
/// against its large-size limit 1/l^2. size_ratio = N/(gamma ln N)
/// reports how deep into the regime the evaluation sits.
struct MomentLimitCheck {
  double value = 0.0;
  double limit = 0.0;
  double relative_error = 0.0;
  double size_ratio = 0.0;
};
MomentLimitCheck normalized_moment_limit_check(int n, double gamma, int l);

/// Unbiased sample variance of a data vector.
double sample_variance(const std::vector<double>& values);

/// Sample variance of the normalized moment over independent kernel
/// draws, plus N*variance (the quantity that should stay bounded as N
/// grows). Streams seed.stream + t for trial t.
struct MomentVariance {
  double sample_variance = 0.0;
  double scaled = 0.0;  // N * sample_variance
};
MomentVariance moment_variance_check(int n, double gamma, int l, int trials,
                                     Seed seed);

/// The per-k constant with reciprocal sum of count/(k * spanning trees)
/// over that k's quotient classes; purely informational output of the
/// enumeration. Returns 0 when no quotient of that k exists for this l.
double quotient_constant(int l, int k);

}  // namespace sbmlab
