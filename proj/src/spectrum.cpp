#include "sbmlab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <lapacke.h>

namespace sbmlab {
namespace {

void require_symmetric(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("eig_sym needs a square matrix");
  }
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(scale, 1.0)) {
    throw std::invalid_argument("eig_sym input is not symmetric: |M - M^T| = " +
                                std::to_string(asym));
  }
}

}  // namespace

Spectrum eig_sym(const Eigen::MatrixXd& m, int k) {
  require_symmetric(m);
  const int n = static_cast<int>(m.rows());
  if (k < 0 || k > n) {
    throw std::invalid_argument("eig_sym: k must lie in [0, n]");
  }

  Eigen::MatrixXd work = m;  // dsyevd overwrites its input
  Eigen::VectorXd ascending(n);
  const char jobz = (k > 0) ? 'V' : 'N';
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, jobz, 'L', n,
                                         work.data(), n, ascending.data());
  if (info != 0) {
    throw std::runtime_error("dsyevd failed with info = " +
                             std::to_string(info));
  }

  Spectrum s;
  s.eigenvalues = ascending.reverse();
  const double norm2 =
      std::max(std::abs(s.eigenvalues(0)), std::abs(s.eigenvalues(n - 1)));

  if (k > 0) {
    s.eigenvectors.resize(n, k);
    for (int j = 0; j < k; ++j) {
      Eigen::VectorXd w = work.col(n - 1 - j);
      for (int i = 0; i < n; ++i) {
        if (std::abs(w(i)) > 1e-12) {
          if (w(i) < 0.0) w = -w;
          break;
        }
      }
      s.eigenvectors.col(j) = w;
    }

    const Eigen::MatrixXd residual =
        m * s.eigenvectors -
        s.eigenvectors * s.eigenvalues.head(k).asDiagonal();
    for (int j = 0; j < k; ++j) {
      if (residual.col(j).norm() > 1e-8 * std::max(norm2, 1e-300)) {
        throw std::runtime_error("eigenpair " + std::to_string(j) +
                                 " residual exceeds tolerance");
      }
    }
    const Eigen::MatrixXd gram =
        s.eigenvectors.transpose() * s.eigenvectors -
        Eigen::MatrixXd::Identity(k, k);
    if (gram.cwiseAbs().maxCoeff() > 1e-10 * n) {
      throw std::runtime_error("eigenvectors lost orthonormality");
    }
  }

  s.top_multiplicity = 1;
  for (int j = 1; j < n; ++j) {
    if (s.eigenvalues(0) - s.eigenvalues(j) <= 1e-8 * std::max(norm2, 1e-300))
      s.top_multiplicity = j + 1;
    else
      break;
  }
  return s;
}

std::pair<double, double> row_sum_bounds(const KernelMatrix& p) {
  if (p.size() > 0 && p.minCoeff() < 0.0) {
    throw std::invalid_argument("row_sum_bounds: kernel has a negative entry");
  }
  const Eigen::VectorXd sums = p.rowwise().sum();
  return {sums.minCoeff(), sums.maxCoeff()};
}

RowSumReport near_origin_row_sums(const KernelMatrix& p,
                                  const LatentPositions& latents,
                                  double gamma) {
  const int n = static_cast<int>(p.rows());
  if (latents.rows() != n) {
    throw std::invalid_argument("latents do not match kernel size");
  }
  if (!(gamma > 1.0)) {
    throw std::invalid_argument("near_origin_row_sums needs gamma > 1");
  }
  const double radius_sq = 2.0 * std::log(gamma) / gamma;
  RowSumReport rep;
  rep.target = static_cast<double>(n) / (2.0 * gamma);
  for (int i = 0; i < n; ++i) {
    if (latents.row(i).squaredNorm() <= radius_sq) {
      rep.vertices.push_back(i);
      const double s = p.row(i).sum();
      rep.row_sums.push_back(s);
      rep.max_relative_deviation = std::max(
          rep.max_relative_deviation, std::abs(s - rep.target) / rep.target);
    }
  }
  rep.empty = rep.vertices.empty();
  return rep;
}

namespace {

Histogram histogram_over(const Eigen::VectorXd& values, int bins, double lo,
                         double hi) {
  Histogram h;
  h.edges.resize(bins + 1);
  h.counts.assign(bins, 0);
  const double width = (hi - lo) / bins;
  for (int b = 0; b <= bins; ++b) h.edges[b] = lo + width * b;
  h.edges[bins] = hi;  // exact right edge
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double v = values(i);
    if (v < lo || v > hi) {
      throw std::invalid_argument("histogram value outside range");
    }
    int b = static_cast<int>((v - lo) / width);
    // The last bin is closed on the right so totals are conserved.
    if (b >= bins) b = bins - 1;
    ++h.counts[b];
  }
  return h;
}

}  // namespace

Histogram spectrum_histogram(const Eigen::VectorXd& values, int bins) {
  if (bins < 1) throw std::invalid_argument("histogram needs bins >= 1");
  if (values.size() == 0) {
    throw std::invalid_argument("histogram needs at least one value");
  }
  double lo = values.minCoeff();
  double hi = values.maxCoeff();
  if (lo == hi) {  // degenerate sample: widen to a unit-length window
    lo -= 0.5;
    hi += 0.5;
  }
  return histogram_over(values, bins, lo, hi);
}

Histogram spectrum_histogram(const Eigen::VectorXd& values, int bins,
                             double lo, double hi) {
  if (bins < 1) throw std::invalid_argument("histogram needs bins >= 1");
  if (!(lo < hi)) throw std::invalid_argument("histogram needs lo < hi");
  return histogram_over(values, bins, lo, hi);
}

SeparationGap separation_gap(const Eigen::VectorXd& eigenvalues) {
  if (eigenvalues.size() < 3) {
    throw std::invalid_argument("separation_gap needs at least 3 eigenvalues");
  }
  SeparationGap g;
  g.rho1 = eigenvalues(0);
  g.rho2 = eigenvalues(1);
  g.rho3 = eigenvalues(2);
  g.gap21 = g.rho1 - g.rho2;
  g.gap32 = g.rho2 - g.rho3;
  g.bulk_edge = g.rho3;
  return g;
}

int detached_top_count(const Eigen::VectorXd& eigenvalues,
                       double spacing_factor) {
  const int n = static_cast<int>(eigenvalues.size());
  if (n < 8) {
    throw std::invalid_argument("detached_top_count needs >= 8 eigenvalues");
  }
  // Median consecutive spacing among eigenvalues 3..min(33, n): a bulk
  // scale that ignores whatever the top two are doing.
  std::vector<double> spacings;
  const int last = std::min(32, n - 1);
  for (int j = 2; j < last; ++j) {
    spacings.push_back(eigenvalues(j) - eigenvalues(j + 1));
  }
  std::nth_element(spacings.begin(), spacings.begin() + spacings.size() / 2,
                   spacings.end());
  const double typical = spacings[spacings.size() / 2];
  const SeparationGap g = separation_gap(eigenvalues);
  if (g.gap32 > spacing_factor * typical) return 2;
  if (g.gap21 > spacing_factor * typical) return 1;
  return 0;
}

}  // namespace sbmlab
