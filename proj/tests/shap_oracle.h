/*
 * Copyright 2026 The VDEP Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Shapley values by enumerating every feature subset, with absent features
// integrated out by cover-weighted averaging over both branches.

#ifndef VDEP_TESTS_SHAP_ORACLE_H_
#define VDEP_TESTS_SHAP_ORACLE_H_

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "vdep/gbdt.h"

namespace vdep::oracle {

inline double conditional_value(const gbdt::Tree& t, int node, const Eigen::VectorXd& x,
                                unsigned present) {
  const gbdt::TreeNode& n = t.nodes[node];
  if (n.is_leaf()) return n.weight;
  if (present & (1u << n.feature)) {
    return conditional_value(t, x(n.feature) < n.threshold ? n.left : n.right, x, present);
  }
  const double cl = t.nodes[n.left].cover;
  const double cr = t.nodes[n.right].cover;
  return (cl * conditional_value(t, n.left, x, present) +
          cr * conditional_value(t, n.right, x, present)) /
         (cl + cr);
}

inline Eigen::VectorXd subset_shapley(const gbdt::Tree& t, const Eigen::VectorXd& x) {
  const int m = static_cast<int>(x.size());
  std::vector<double> fact(static_cast<std::size_t>(m + 1), 1.0);
  for (int i = 1; i <= m; ++i) fact[i] = fact[i - 1] * i;
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(m);
  for (int j = 0; j < m; ++j) {
    for (unsigned s = 0; s < (1u << m); ++s) {
      if (s & (1u << j)) continue;
      const int size = __builtin_popcount(s);
      const double w = fact[size] * fact[m - size - 1] / fact[m];
      phi(j) += w * (conditional_value(t, 0, x, s | (1u << j)) - conditional_value(t, 0, x, s));
    }
  }
  return phi;
}

// Random pre-order tree over `n_features`, depth at most `max_depth`, with
// positive covers that add up from the leaves.
inline gbdt::Tree random_tree(std::mt19937_64& rng, int n_features, int max_depth) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  gbdt::Tree t;
  const std::function<int(int)> grow = [&](int depth) -> int {
    const int idx = static_cast<int>(t.nodes.size());
    t.nodes.emplace_back();
    if (depth >= max_depth || u(rng) < 0.2) {
      t.nodes[idx].weight = 4.0 * u(rng) - 2.0;
      t.nodes[idx].cover = 0.5 + 10.0 * u(rng);
      return idx;
    }
    t.nodes[idx].feature = static_cast<int>(rng() % static_cast<unsigned>(n_features));
    t.nodes[idx].threshold = u(rng);
    const int l = grow(depth + 1);
    const int r = grow(depth + 1);
    t.nodes[idx].left = l;
    t.nodes[idx].right = r;
    t.nodes[idx].cover = t.nodes[l].cover + t.nodes[r].cover;
    return idx;
  };
  grow(0);
  return t;
}

}  // namespace vdep::oracle

#endif  // VDEP_TESTS_SHAP_ORACLE_H_
