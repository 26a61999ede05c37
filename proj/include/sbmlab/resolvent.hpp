#pragma once

#include <vector>

#include <Eigen/Core>

#include "sbmlab/spectrum.hpp"

namespace sbmlab {

/// Everything needed to evaluate the secular function of the rank-two
/// block mean lambda1*v1*v1^T + lambda2*sigma*sigma^T added to a
/// symmetric perturbation with eigenpairs (mu_j, w_j): the perturbation
/// spectrum plus the overlaps r_j = <w_j, v1> and s_j = <w_j, sigma>.
struct ResolventContext {
  Eigen::VectorXd mu;  // perturbation eigenvalues, descending
  Eigen::VectorXd r;   // overlaps with v1
  Eigen::VectorXd s;   // overlaps with sigma
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

/// Builds the context from a full eigendecomposition of the perturbation
/// (all N eigenvectors). Validates that the overlap vectors have unit
/// norm to 1e-10 (the eigenvectors form a complete orthonormal basis)
/// and that lambda1 >= lambda2 > 0.
ResolventContext build_context(const Spectrum& perturbation_spectrum,
                               const Eigen::VectorXd& v1,
                               const Eigen::VectorXd& sigma, double lambda1,
                               double lambda2);

/// The secular function whose roots above mu_1 are exactly the
/// eigenvalues the rank-two addition pulls out of the perturbation
/// spectrum. Evaluated in the product form
///   f(theta) = (1 + lambda1*a1)(1 + lambda2*a2) - lambda1*lambda2*b^2,
/// with a_i(theta) = sum_j overlap_ij^2/(mu_j - theta) and
/// b(theta) = sum_j r_j s_j/(mu_j - theta), each sum compensated.
/// Requires theta > mu_1 (no poles in that region); throws otherwise.
double secular_value(const ResolventContext& ctx, double theta);

/// Derivative of the secular function in theta. At a detached root the
/// sign matches the sign of 1 + lambda1*a1(theta): positive at the top
/// root, typically negative at the second.
double secular_derivative(const ResolventContext& ctx, double theta);

/// All roots of the secular function in (mu_1, mu_1 + lambda1 + lambda2],
/// descending. The interval carries no poles and at most two roots; a
/// sign scan over a geometric grid seeded with the roots of
/// 1 + lambda_i*a_i = 0 (where f is guaranteed nonpositive) brackets
/// them, and bisection refines each bracket to 1e-12 relative width.
/// Throws std::runtime_error if more than two distinct roots emerge.
std::vector<double> detached_eigenvalues(const ResolventContext& ctx);

/// Squared overlap between sigma and the unit eigenvector at a detached
/// root theta:
///   corr(theta) = (1 + lambda1*a1(theta)) / (lambda2 * f'(theta)).
/// Exact in exact arithmetic at every root above mu_1. Values outside
/// [-1e-9, 1 + 1e-9] mean theta is not a root of this context (or the
/// numerator and derivative have contradictory signs) and throw
/// std::runtime_error; tiny excursions are clamped to [0, 1].
double predicted_correlation(const ResolventContext& ctx, double theta);

/// The eigenvalue separation certificate lambda2 >= 4*mu_1*(1 + epsilon),
/// with mu_1 taken from the context. When it holds, both detached roots
/// exist and the second one carries the community information.
struct SeparationCertificate {
  bool holds = false;
  double mu1 = 0.0;
  double lambda2 = 0.0;
  double threshold = 0.0;  // 4*mu_1*(1 + epsilon)
  double epsilon = 0.0;
};
SeparationCertificate separation_certificate(const ResolventContext& ctx,
                                             double epsilon);

}  // namespace sbmlab
