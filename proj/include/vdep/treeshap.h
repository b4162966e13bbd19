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

// Exact Shapley attributions for tree ensembles using cover-weighted path
// expectations (polynomial-time path algorithm, no sampling).

#ifndef VDEP_TREESHAP_H_
#define VDEP_TREESHAP_H_

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vdep/gbdt.h"

namespace vdep::shap {

struct Attribution {
  Eigen::VectorXd phi;  // one entry per model feature
  double base = 0.0;    // expected margin under the cover distribution
};

// Expected output of a single tree: leaf weights averaged by cover.
double expected_value(const gbdt::Tree& tree);

// Adds `scale` times the Shapley values of `tree` at `x` into `phi`.
void accumulate_tree_shap(const gbdt::Tree& tree, const Eigen::VectorXd& x,
                          double scale, Eigen::VectorXd& phi);

// base + phi.sum() equals model.margin(x).
Attribution shap_values(const gbdt::TreeEnsemble& model,
                        const Eigen::VectorXd& x);

template <typename Derived>
Attribution shap_values(const gbdt::TreeEnsemble& model,
                        const Eigen::DenseBase<Derived>& x) {
  Eigen::VectorXd dense(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) dense(i) = x(i);
  return shap_values(model, dense);
}

// One row of phi per row of `x`.
Eigen::MatrixXd shap_matrix(const gbdt::TreeEnsemble& model,
                            const Eigen::MatrixXd& x,
                            Eigen::VectorXd* bases = nullptr);

struct RankedFeature {
  int rank = 0;  // 1-based
  int feature = 0;
  std::string name;
  double mean_abs_phi = 0.0;
};

struct ShapPoint {
  int feature = 0;
  double value = 0.0;
  double phi = 0.0;
  int event_id = 0;
};

struct ShapReport {
  std::vector<RankedFeature> ranking;  // every feature, best first
  std::vector<ShapPoint> points;       // instances of the top features
};

// Ranks features by mean |phi| (ties to the lower index) and collects the
// (value, phi) pairs of the `top_k` leaders.
ShapReport summarize(const Eigen::MatrixXd& phis,
                     const Eigen::MatrixXd& values,
                     const std::vector<std::string>& names,
                     const std::vector<int>& event_ids, int top_k = 20);

// shap_summary.csv: rank,feature,mean_abs_phi (top_k rows when top_k > 0).
void write_summary_csv(const std::filesystem::path& path,
                       const ShapReport& report, int top_k = 20);
// shap_points.csv: feature,value,phi,event_id.
void write_points_csv(const std::filesystem::path& path,
                      const ShapReport& report,
                      const std::vector<std::string>& names);

}  // namespace vdep::shap

#endif  // VDEP_TREESHAP_H_
