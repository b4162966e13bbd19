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

// Second-order gradient boosted decision trees for binary classification
// with logistic loss and exact greedy split search.

#ifndef VDEP_GBDT_H_
#define VDEP_GBDT_H_

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "vdep/error.h"

namespace vdep::gbdt {

using Matrix = Eigen::MatrixXd;

struct TrainConfig {
  int rounds = 100;
  int max_depth = 6;
  double learning_rate = 0.3;
  double min_child_weight = 1.0;
  double reg_lambda = 1.0;
  double gamma = 0.0;
  double base_score = 0.5;
  std::uint64_t seed = 0;

  // Throws SchemaError on out-of-range values.
  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

// Split nodes send x[feature] < threshold left, NaN to the default branch.
// Leaves carry the unscaled Newton weight; the ensemble applies the
// learning rate.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  bool default_left = true;
  double weight = 0.0;
  double cover = 0.0;

  bool is_leaf() const { return left < 0; }
  bool operator==(const TreeNode&) const = default;
};

// Nodes in pre-order; node 0 is the root.
struct Tree {
  std::vector<TreeNode> nodes;

  template <typename Derived>
  int leaf_index(const Eigen::DenseBase<Derived>& x) const {
    int n = 0;
    while (!nodes[n].is_leaf()) {
      const TreeNode& node = nodes[n];
      const double v = x(node.feature);
      if (std::isnan(v)) {
        n = node.default_left ? node.left : node.right;
      } else {
        n = v < node.threshold ? node.left : node.right;
      }
    }
    return n;
  }

  template <typename Derived>
  double predict(const Eigen::DenseBase<Derived>& x) const {
    return nodes[leaf_index(x)].weight;
  }

  int depth() const;
  bool operator==(const Tree&) const = default;
};

inline double sigmoid(double margin) { return 1.0 / (1.0 + std::exp(-margin)); }
inline double logit(double p) { return std::log(p / (1.0 - p)); }

class TreeEnsemble {
 public:
  TreeEnsemble() = default;
  TreeEnsemble(double base_score, double learning_rate,
               std::vector<std::string> feature_names);

  double base_score() const { return base_score_; }
  double learning_rate() const { return learning_rate_; }
  const std::vector<Tree>& trees() const { return trees_; }
  std::vector<Tree>& mutable_trees() { return trees_; }
  const std::vector<std::string>& feature_names() const {
    return feature_names_;
  }
  int num_features() const { return static_cast<int>(feature_names_.size()); }
  const TrainConfig& config() const { return config_; }
  void set_config(const TrainConfig& cfg) { config_ = cfg; }

  // logit(base_score) + sum_t lr * tree_t(x).
  template <typename Derived>
  double margin(const Eigen::DenseBase<Derived>& x) const {
    check_dimension(x.size());
    double m = logit(base_score_);
    for (const Tree& t : trees_) m += learning_rate_ * t.predict(x);
    return m;
  }

  template <typename Derived>
  double predict_proba(const Eigen::DenseBase<Derived>& x) const {
    return sigmoid(margin(x));
  }

  Eigen::VectorXd margin(const Matrix& x) const;
  Eigen::VectorXd predict_proba(const Matrix& x) const;

  bool operator==(const TreeEnsemble&) const = default;

 private:
  void check_dimension(Eigen::Index n) const;

  double base_score_ = 0.5;
  double learning_rate_ = 0.3;
  std::vector<Tree> trees_;
  std::vector<std::string> feature_names_;
  TrainConfig config_;
};

// Regularized objective reduction of splitting a node into (L, R).
inline double split_gain(double g_left, double h_left, double g_right,
                         double h_right, double lambda, double gamma) {
  const double g = g_left + g_right;
  const double h = h_left + h_right;
  return 0.5 * (g_left * g_left / (h_left + lambda) +
                g_right * g_right / (h_right + lambda) - g * g / (h + lambda)) -
         gamma;
}

inline double leaf_weight(double g, double h, double lambda) {
  return -g / (h + lambda);
}

struct SplitCandidate {
  int feature = -1;  // -1: no admissible split with positive gain
  double threshold = 0.0;
  double gain = 0.0;
};

// Best split of a single node holding all rows of `x`. Ties resolve to the
// lowest feature index, then the lowest threshold.
SplitCandidate find_best_split(const Matrix& x, std::span<const double> grad,
                               std::span<const double> hess,
                               const TrainConfig& cfg);

// Training features sorted once per column; reusable across label vectors
// trained on the same matrix.
class SortedColumns {
 public:
  explicit SortedColumns(const Matrix& x);
  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return static_cast<Eigen::Index>(order_.size()); }
  const std::vector<int>& order(Eigen::Index f) const { return order_[f]; }
  const std::vector<double>& values(Eigen::Index f) const { return values_[f]; }

  // Columns with at most kMaxBins distinct values keep a per-row bin index
  // instead of the sorted order.
  static constexpr std::size_t kMaxBins = 256;
  bool is_constant(Eigen::Index f) const { return constant_[f]; }
  bool is_binned(Eigen::Index f) const { return !bin_values_[f].empty(); }
  const std::vector<std::uint8_t>& bins(Eigen::Index f) const { return bins_[f]; }
  const std::vector<double>& bin_values(Eigen::Index f) const {
    return bin_values_[f];
  }

 private:
  Eigen::Index rows_ = 0;
  std::vector<std::vector<int>> order_;
  std::vector<std::vector<double>> values_;
  std::vector<std::vector<std::uint8_t>> bins_;
  std::vector<std::vector<double>> bin_values_;
  std::vector<bool> constant_;
};

struct TrainTrace {
  // Mean logistic loss on the training set: entry 0 before the first tree,
  // entry t after round t.
  std::vector<double> loss;
};

double logistic_loss(std::span<const double> margins,
                     std::span<const double> labels);

// Labels are 0/1. Feature names default to f0..f{n-1} when empty.
TreeEnsemble train(const Matrix& x, std::span<const double> labels,
                   const TrainConfig& cfg,
                   std::vector<std::string> feature_names = {},
                   TrainTrace* trace = nullptr);

TreeEnsemble train(const Matrix& x, const SortedColumns& sorted,
                   std::span<const double> labels, const TrainConfig& cfg,
                   std::vector<std::string> feature_names = {},
                   TrainTrace* trace = nullptr);

// Portable text format; numbers carry 17 significant digits.
std::string serialize(const TreeEnsemble& model);
TreeEnsemble deserialize(std::string_view text);

void save_model(const std::filesystem::path& path, const TreeEnsemble& model);
TreeEnsemble load_model(const std::filesystem::path& path);

inline constexpr int kModelFormatVersion = 1;

}  // namespace vdep::gbdt

#endif  // VDEP_GBDT_H_
