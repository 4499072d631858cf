#pragma once
// Independent reference computations used to check the library. Nothing in
// here calls the code paths it is meant to verify.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "consensus/netgraph.hpp"

namespace oracle {

/// Number of strongly connected components (Tarjan, recursive).
inline std::size_t tarjan_scc_count(const consensus::Network& net) {
  const auto n = net.size();
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<std::size_t> stack;
  int counter = 0;
  std::size_t components = 0;
  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = 1;
    for (const auto& arc : net.out_arcs(v)) {
      const auto w = arc.to;
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      ++components;
      while (true) {
        auto w = stack.back();
        stack.pop_back();
        on_stack[w] = 0;
        if (w == v) break;
      }
    }
  };
  for (std::size_t v = 0; v < n; ++v)
    if (index[v] < 0) visit(v);
  return components;
}

/// Left null eigenvector through a full eigendecomposition of L^T: the
/// eigenvector whose eigenvalue is nearest zero, normalized to sum 1.
inline Eigen::VectorXd eigensolve_left_null(const consensus::Network& net) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(net.laplacian().transpose());
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < es.eigenvalues().size(); ++k)
    if (std::abs(es.eigenvalues()(k)) < std::abs(es.eigenvalues()(best))) best = k;
  Eigen::VectorXd v = es.eigenvectors().col(best).real();
  return v / v.sum();
}

/// Strongly connected random digraph: a directed ring through a random
/// permutation plus extra arcs with probability p and weights in (0,1].
inline consensus::Network random_strong_network(std::size_t n, double p, std::uint64_t seed,
                                                bool unit_weights = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
  auto weight = [&] { return unit_weights ? 1.0 : 0.05 + 0.95 * unif(rng); };
  for (std::size_t k = 0; k < n; ++k) w[perm[k]][perm[(k + 1) % n]] = weight();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && w[i][j] == 0.0 && unif(rng) < p) w[i][j] = weight();
  std::vector<consensus::Arc> arcs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (w[i][j] > 0.0) arcs.push_back({i, j, w[i][j]});
  return consensus::Network(n, arcs);
}

/// Optimum of  opt c^T z  s.t.  lower <= z <= upper (finite),  a^T z <= b,
/// by enumerating every vertex: all variables at a bound, or all but one at
/// a bound with the row active. nullopt when infeasible.
inline std::optional<double> box_row_lp(const Eigen::VectorXd& c, bool maximize,
                                        const Eigen::VectorXd& lower,
                                        const Eigen::VectorXd& upper,
                                        const Eigen::VectorXd& a, double b) {
  const auto n = static_cast<int>(c.size());
  std::optional<double> best;
  auto consider = [&](const Eigen::VectorXd& z) {
    if (a.dot(z) > b + 1e-12) return;
    const double v = c.dot(z);
    if (!best || (maximize ? v > *best : v < *best)) best = v;
  };
  Eigen::VectorXd z(n);
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    for (int i = 0; i < n; ++i) z(i) = (mask >> i) & 1U ? upper(i) : lower(i);
    consider(z);
    for (int k = 0; k < n; ++k) {
      if (a(k) == 0.0) continue;
      double rest = 0.0;
      for (int i = 0; i < n; ++i)
        if (i != k) rest += a(i) * z(i);
      const double zk = (b - rest) / a(k);
      if (zk < lower(k) - 1e-12 || zk > upper(k) + 1e-12) continue;
      Eigen::VectorXd w = z;
      w(k) = std::clamp(zk, lower(k), upper(k));
      consider(w);
    }
  }
  return best;
}

/// All size-k subsets of {0..n-1} in lexicographic order.
inline std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (cur.size() == k) {
      out.push_back(cur);
      return;
    }
    for (std::size_t i = start; i < n; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

}  // namespace oracle
