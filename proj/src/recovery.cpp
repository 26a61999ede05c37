#include "sbmlab/recovery.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sbmlab {

const char* to_string(RecoveryClass c) {
  switch (c) {
    case RecoveryClass::exact: return "exact";
    case RecoveryClass::weak: return "weak";
    case RecoveryClass::soft: return "soft";
    case RecoveryClass::none: return "none";
  }
  return "none";
}

namespace {

void require_unit(const Eigen::VectorXd& v, const char* name) {
  if (std::abs(v.norm() - 1.0) > 1e-8) {
    throw std::invalid_argument(std::string(name) + " must be unit norm");
  }
}

SpectralEstimate estimate_from_spectrum(const Spectrum& s, int index) {
  const int n = static_cast<int>(s.eigenvalues.size());
  SpectralEstimate est;
  est.eigenvalues = s.eigenvalues;
  est.x = s.eigenvectors.col(index);
  const double norm2 = std::max(std::abs(s.eigenvalues(0)),
                                std::abs(s.eigenvalues(n - 1)));
  est.deciding_gap = s.eigenvalues(index) - s.eigenvalues(index + 1);
  est.ambiguous = est.deciding_gap < 1e-8 * norm2;
  if (est.ambiguous) {
    est.subspace.resize(n, 2);
    est.subspace.col(0) = s.eigenvectors.col(index);
    est.subspace.col(1) = s.eigenvectors.col(index + 1);
  } else {
    est.subspace = est.x;
  }
  return est;
}

}  // namespace

SpectralEstimate naive_spectral_estimate(const Eigen::MatrixXd& a) {
  if (a.rows() < 3) {
    throw std::invalid_argument("naive estimator needs N >= 3");
  }
  return estimate_from_spectrum(eig_sym(a, 3), 1);
}

SpectralEstimate davis_kahan_estimate(const Eigen::MatrixXd& a,
                                      double mean_known) {
  if (a.rows() < 2) {
    throw std::invalid_argument("davis_kahan estimator needs N >= 2");
  }
  const Eigen::MatrixXd shifted = a.array() - mean_known;
  return estimate_from_spectrum(eig_sym(shifted, 2), 0);
}

Eigen::VectorXd sign_round(const Eigen::VectorXd& x) {
  const double a = 1.0 / std::sqrt(static_cast<double>(x.size()));
  Eigen::VectorXd r(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    r(i) = (x(i) >= 0.0) ? a : -a;
  }
  return r;
}

double overlap(const Eigen::VectorXd& x, const Eigen::VectorXd& sigma) {
  if (x.size() != sigma.size()) {
    throw std::invalid_argument("overlap: size mismatch");
  }
  require_unit(x, "x");
  require_unit(sigma, "sigma");
  return std::abs(x.dot(sigma));
}

RecoveryClass classify_recovery(double overlap_value,
                                double hamming_agreement, int min_mislabels,
                                double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("epsilon must lie in (0, 1)");
  }
  if (min_mislabels == 0) return RecoveryClass::exact;
  if (hamming_agreement >= 0.5 * (1.0 + epsilon)) return RecoveryClass::weak;
  if (overlap_value >= epsilon) return RecoveryClass::soft;
  return RecoveryClass::none;
}

RecoveryReport assess_recovery(const Eigen::VectorXd& x,
                               const Eigen::VectorXd& sigma, double epsilon) {
  const int n = static_cast<int>(x.size());
  RecoveryReport rep;
  rep.epsilon = epsilon;
  rep.overlap = overlap(x, sigma);

  int mismatches = 0;
  for (int i = 0; i < n; ++i) {
    const bool xp = x(i) >= 0.0;  // sign_round convention: zero is +
    const bool sp = sigma(i) > 0.0;
    if (xp != sp) ++mismatches;
  }
  const int min_mislabels = std::min(mismatches, n - mismatches);
  // Integer counts make the rounded metrics exact, so the identity
  // hamming = (1 + rounded)/2 holds to the last bit.
  rep.rounded_overlap =
      static_cast<double>(n - 2 * min_mislabels) / static_cast<double>(n);
  rep.hamming_agreement =
      static_cast<double>(n - min_mislabels) / static_cast<double>(n);
  rep.classification = classify_recovery(rep.overlap, rep.hamming_agreement,
                                         min_mislabels, epsilon);
  rep.subspace_overlap = rep.overlap;

  if (rep.rounded_overlap < 4.0 * rep.overlap - 3.0 - 1e-12) {
    throw std::runtime_error("sign-rounding inequality violated");
  }
  if (std::abs(rep.hamming_agreement - 0.5 * (1.0 + rep.rounded_overlap)) >
      1e-12) {
    throw std::runtime_error("hamming/rounded-overlap identity violated");
  }
  return rep;
}

RecoveryReport assess_recovery(const SpectralEstimate& estimate,
                               const Eigen::VectorXd& sigma, double epsilon) {
  RecoveryReport rep = assess_recovery(estimate.x, sigma, epsilon);
  rep.ambiguous = estimate.ambiguous;
  if (estimate.ambiguous) {
    // Best overlap achievable by a unit vector inside the flagged
    // eigenspace: the norm of sigma's projection onto it.
    const Eigen::VectorXd proj = estimate.subspace.transpose() * sigma;
    rep.subspace_overlap = proj.norm();
  }
  return rep;
}

DavisKahanCheck davis_kahan_check(const Eigen::MatrixXd& a,
                                  const BlockMatrix& p0,
                                  const Eigen::VectorXd& x) {
  require_unit(x, "x");
  const Eigen::VectorXd sigma = p0.v2();
  DavisKahanCheck chk;
  chk.distance = std::min((sigma - x).norm(), (sigma + x).norm());
  const Eigen::MatrixXd noise = a - p0.materialize();
  const Spectrum s = eig_sym(noise, 0);
  chk.noise_norm = std::max(std::abs(s.eigenvalues(0)),
                            std::abs(s.eigenvalues(s.eigenvalues.size() - 1)));
  chk.bound = 2.0 * std::sqrt(2.0) / p0.lambda2() * chk.noise_norm;
  chk.holds = chk.distance <= chk.bound;
  return chk;
}

}  // namespace sbmlab
