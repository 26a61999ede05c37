#include "sbmlab/moments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "sbmlab/graphgen.hpp"
#include "sbmlab/model.hpp"
#include "sbmlab/neumaier.hpp"
#include "sbmlab/spectrum.hpp"

namespace sbmlab {
namespace {

void require_l(int l) {
  if (l < 2 || l > 8) {
    throw std::invalid_argument("walk length l must lie in [2, 8]");
  }
}

using EdgeList = std::vector<std::array<int, 3>>;

EdgeList quotient_edges(const std::vector<int>& block, int l) {
  std::map<std::pair<int, int>, int> mult;
  for (int i = 0; i < l; ++i) {
    int u = block[i];
    int v = block[(i + 1) % l];
    if (u > v) std::swap(u, v);
    // The cycle of length 2 visits its single edge twice.
    ++mult[{u, v}];
  }
  EdgeList edges;
  for (const auto& [uv, m] : mult) edges.push_back({uv.first, uv.second, m});
  return edges;
}

// Invariant hash bucket key: vertex count, sorted weighted degrees,
// sorted edge multiplicities.
std::vector<int> invariant_key(int k, const EdgeList& edges) {
  std::vector<int> degree(k, 0);
  std::vector<int> mults;
  for (const auto& e : edges) {
    degree[e[0]] += e[2];
    degree[e[1]] += e[2];
    mults.push_back(e[2]);
  }
  std::sort(degree.begin(), degree.end());
  std::sort(mults.begin(), mults.end());
  std::vector<int> key;
  key.push_back(k);
  key.insert(key.end(), degree.begin(), degree.end());
  key.push_back(-1);
  key.insert(key.end(), mults.begin(), mults.end());
  return key;
}

std::vector<std::vector<int>> adjacency_table(int k, const EdgeList& edges) {
  std::vector<std::vector<int>> a(k, std::vector<int>(k, 0));
  for (const auto& e : edges) {
    a[e[0]][e[1]] = e[2];
    a[e[1]][e[0]] = e[2];
  }
  return a;
}

bool isomorphic_rec(const std::vector<std::vector<int>>& a,
                    const std::vector<std::vector<int>>& b,
                    const std::vector<int>& deg_a,
                    const std::vector<int>& deg_b, std::vector<int>& map_ab,
                    std::vector<bool>& used, int next) {
  const int k = static_cast<int>(a.size());
  if (next == k) return true;
  for (int cand = 0; cand < k; ++cand) {
    if (used[cand] || deg_a[next] != deg_b[cand]) continue;
    bool ok = true;
    for (int prev = 0; prev < next; ++prev) {
      if (a[next][prev] != b[cand][map_ab[prev]]) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    map_ab[next] = cand;
    used[cand] = true;
    if (isomorphic_rec(a, b, deg_a, deg_b, map_ab, used, next + 1)) return true;
    used[cand] = false;
  }
  return false;
}

bool isomorphic(int k, const EdgeList& ea, const EdgeList& eb) {
  const auto a = adjacency_table(k, ea);
  const auto b = adjacency_table(k, eb);
  std::vector<int> deg_a(k, 0), deg_b(k, 0);
  for (const auto& e : ea) {
    deg_a[e[0]] += e[2];
    deg_a[e[1]] += e[2];
  }
  for (const auto& e : eb) {
    deg_b[e[0]] += e[2];
    deg_b[e[1]] += e[2];
  }
  std::vector<int> map_ab(k, -1);
  std::vector<bool> used(k, false);
  return isomorphic_rec(a, b, deg_a, deg_b, map_ab, used, 0);
}

// Exact determinant of a small integer matrix by fraction-free Bareiss
// elimination with row pivoting.
__int128 integer_determinant(std::vector<std::vector<__int128>> m) {
  const int k = static_cast<int>(m.size());
  if (k == 0) return 1;
  __int128 sign = 1;
  __int128 prev = 1;
  for (int col = 0; col < k - 1; ++col) {
    if (m[col][col] == 0) {
      int pivot = -1;
      for (int row = col + 1; row < k; ++row) {
        if (m[row][col] != 0) {
          pivot = row;
          break;
        }
      }
      if (pivot < 0) return 0;
      std::swap(m[col], m[pivot]);
      sign = -sign;
    }
    for (int row = col + 1; row < k; ++row) {
      for (int j = col + 1; j < k; ++j) {
        m[row][j] = (m[row][j] * m[col][col] - m[row][col] * m[col][j]) / prev;
      }
      m[row][col] = 0;
    }
    prev = m[col][col];
  }
  return sign * m[k - 1][k - 1];
}

std::vector<std::vector<__int128>> integer_laplacian(const CycleQuotient& q) {
  std::vector<std::vector<__int128>> l(q.k, std::vector<__int128>(q.k, 0));
  for (const auto& e : q.edges) {
    l[e[0]][e[1]] -= e[2];
    l[e[1]][e[0]] -= e[2];
    l[e[0]][e[0]] += e[2];
    l[e[1]][e[1]] += e[2];
  }
  return l;
}

double horner(const std::vector<long long>& coeffs, double t) {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    acc = acc * t + static_cast<double>(*it);
  }
  return acc;
}

}  // namespace

std::vector<CycleQuotient> enumerate_cycle_quotients(int l) {
  require_l(l);
  std::map<std::vector<int>, std::vector<CycleQuotient>> buckets;

  std::vector<int> block(l, -1);
  // Depth-first over set partitions in restricted-growth form, skipping
  // any block that already holds a cyclic neighbor.
  auto assign = [&](auto&& self, int vertex, int blocks_used) -> void {
    if (vertex == l) {
      EdgeList edges = quotient_edges(block, l);
      const auto key = invariant_key(blocks_used, edges);
      auto& bucket = buckets[key];
      for (CycleQuotient& q : bucket) {
        if (isomorphic(blocks_used, q.edges, edges)) {
          ++q.count;
          return;
        }
      }
      bucket.push_back(CycleQuotient{blocks_used, std::move(edges), 1});
      return;
    }
    const int prev = block[vertex - 1];
    const int wrap = (vertex == l - 1) ? block[0] : -1;
    for (int b = 0; b <= blocks_used && b < l; ++b) {
      if (b == prev || b == wrap) continue;
      block[vertex] = b;
      self(self, vertex + 1, std::max(blocks_used, b + 1));
      block[vertex] = -1;
    }
  };
  block[0] = 0;
  assign(assign, 1, 1);

  std::vector<CycleQuotient> out;
  for (auto& [key, bucket] : buckets) {
    for (CycleQuotient& q : bucket) out.push_back(std::move(q));
  }
  std::sort(out.begin(), out.end(), [](const CycleQuotient& a,
                                       const CycleQuotient& b) {
    if (a.k != b.k) return a.k > b.k;
    return a.edges < b.edges;
  });
  return out;
}

Eigen::MatrixXd multigraph_laplacian(const CycleQuotient& q) {
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(q.k, q.k);
  for (const auto& e : q.edges) {
    l(e[0], e[1]) -= e[2];
    l(e[1], e[0]) -= e[2];
    l(e[0], e[0]) += e[2];
    l(e[1], e[1]) += e[2];
  }
  return l;
}

std::vector<long long> det_polynomial_coeffs(const CycleQuotient& q) {
  const auto lap = integer_laplacian(q);
  const int k = q.k;
  std::vector<long long> coeffs(k + 1, 0);
  coeffs[0] = 1;  // empty principal minor
  for (int mask = 1; mask < (1 << k); ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < k; ++i) {
      if (mask & (1 << i)) idx.push_back(i);
    }
    const int m = static_cast<int>(idx.size());
    std::vector<std::vector<__int128>> sub(m, std::vector<__int128>(m));
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) sub[a][b] = lap[idx[a]][idx[b]];
    }
    coeffs[m] += static_cast<long long>(integer_determinant(std::move(sub)));
  }
  return coeffs;
}

long long spanning_tree_count(const CycleQuotient& q) {
  const auto lap = integer_laplacian(q);
  const int k = q.k;
  std::vector<std::vector<__int128>> sub(k - 1, std::vector<__int128>(k - 1));
  for (int a = 1; a < k; ++a) {
    for (int b = 1; b < k; ++b) sub[a - 1][b - 1] = lap[a][b];
  }
  return static_cast<long long>(integer_determinant(std::move(sub)));
}

double edge_product_expectation(const CycleQuotient& q, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("need gamma > 0");
  return 1.0 / horner(det_polynomial_coeffs(q), 2.0 * gamma);
}

double exact_expected_trace_moment(int n, double gamma, int l) {
  require_l(l);
  NeumaierSum total;
  for (const CycleQuotient& q : enumerate_cycle_quotients(l)) {
    double falling = 1.0;
    for (int i = 0; i < q.k; ++i) falling *= static_cast<double>(n - i);
    const double det = horner(det_polynomial_coeffs(q), 2.0 * gamma);
    total.add(static_cast<double>(q.count) * falling / det);
  }
  return total.value();
}

double empirical_trace_moment(const Eigen::VectorXd& eigenvalues, int l) {
  if (l < 1) throw std::invalid_argument("need l >= 1");
  NeumaierSum total;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    double p = eigenvalues(i);
    for (int j = 1; j < l; ++j) p *= eigenvalues(i);
    total.add(p);
  }
  return total.value();
}

double empirical_trace_moment(const Eigen::MatrixXd& p, int l) {
  return empirical_trace_moment(eig_sym(p, 0).eigenvalues, l);
}

MomentLimitCheck normalized_moment_limit_check(int n, double gamma, int l) {
  require_l(l);
  MomentLimitCheck chk;
  const double scale = 2.0 * gamma / static_cast<double>(n);
  double factor = 1.0 / (2.0 * gamma);
  for (int i = 0; i < l; ++i) factor *= scale;
  chk.value = factor * exact_expected_trace_moment(n, gamma, l);
  chk.limit = 1.0 / (static_cast<double>(l) * static_cast<double>(l));
  chk.relative_error = std::abs(chk.value - chk.limit) / chk.limit;
  chk.size_ratio = static_cast<double>(n) / (gamma * std::log(n));
  return chk;
}

double sample_variance(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) / n;
  NeumaierSum ss;
  for (double v : values) ss.add((v - mean) * (v - mean));
  return ss.value() / static_cast<double>(n - 1);
}

MomentVariance moment_variance_check(int n, double gamma, int l, int trials,
                                     Seed seed) {
  require_l(l);
  if (trials < 30) {
    throw std::invalid_argument("variance check needs at least 30 trials");
  }
  const double scale = 2.0 * gamma / static_cast<double>(n);
  double factor = 1.0 / (2.0 * gamma);
  for (int i = 0; i < l; ++i) factor *= scale;

  std::vector<double> samples;
  samples.reserve(trials);
  for (int t = 0; t < trials; ++t) {
    const LatentPositions x =
        sample_latents(n, Seed{seed.value, seed.stream + t});
    const KernelMatrix p = kernel_matrix(x, gamma);
    samples.push_back(factor *
                      empirical_trace_moment(eig_sym(p, 0).eigenvalues, l));
  }
  MomentVariance mv;
  mv.sample_variance = sample_variance(samples);
  mv.scaled = static_cast<double>(n) * mv.sample_variance;
  return mv;
}

double quotient_constant(int l, int k) {
  require_l(l);
  NeumaierSum inv;
  bool any = false;
  for (const CycleQuotient& q : enumerate_cycle_quotients(l)) {
    if (q.k != k) continue;
    any = true;
    inv.add(static_cast<double>(q.count) /
            (static_cast<double>(k) *
             static_cast<double>(spanning_tree_count(q))));
  }
  if (!any) return 0.0;
  return 1.0 / inv.value();
}

}  // namespace sbmlab
