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

#include "vdep/treeshap.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vdep/csv.h"

namespace vdep::shap {
namespace {

using gbdt::Tree;
using gbdt::TreeNode;

struct PathElement {
  int feature = -1;
  double zero_fraction = 0.0;  // share of cover following this path
  double one_fraction = 0.0;   // 1 if x follows this path, else 0
  double weight = 0.0;         // permutation weight of the subset size
};

// Fraction of the parent's cover routed to `child`.
double child_fraction(const Tree& tree, const TreeNode& parent, int child) {
  const double left = tree.nodes[parent.left].cover;
  const double right = tree.nodes[parent.right].cover;
  const double total = left + right;
  if (!(total > 0.0)) return 0.5;
  return tree.nodes[child].cover / total;
}

void extend_path(PathElement* path, int depth, double zero_fraction,
                 double one_fraction, int feature) {
  path[depth] = {feature, zero_fraction, one_fraction, depth == 0 ? 1.0 : 0.0};
  for (int i = depth - 1; i >= 0; --i) {
    path[i + 1].weight +=
        one_fraction * path[i].weight * (i + 1) / static_cast<double>(depth + 1);
    path[i].weight = zero_fraction * path[i].weight * (depth - i) /
                     static_cast<double>(depth + 1);
  }
}

void unwind_path(PathElement* path, int depth, int index) {
  const double one = path[index].one_fraction;
  const double zero = path[index].zero_fraction;
  double next_one_portion = path[depth].weight;
  for (int i = depth - 1; i >= 0; --i) {
    if (one != 0.0) {
      const double tmp = path[i].weight;
      path[i].weight =
          next_one_portion * (depth + 1) / static_cast<double>((i + 1) * one);
      next_one_portion = tmp - path[i].weight * zero * (depth - i) /
                                   static_cast<double>(depth + 1);
    } else {
      path[i].weight = path[i].weight * (depth + 1) /
                       static_cast<double>(zero * (depth - i));
    }
  }
  for (int i = index; i < depth; ++i) {
    path[i].feature = path[i + 1].feature;
    path[i].zero_fraction = path[i + 1].zero_fraction;
    path[i].one_fraction = path[i + 1].one_fraction;
  }
}

// Total permutation weight of the path with element `index` removed.
double unwound_path_sum(const PathElement* path, int depth, int index) {
  const double one = path[index].one_fraction;
  const double zero = path[index].zero_fraction;
  double next_one_portion = path[depth].weight;
  double total = 0.0;
  for (int i = depth - 1; i >= 0; --i) {
    if (one != 0.0) {
      const double tmp =
          next_one_portion * (depth + 1) / static_cast<double>((i + 1) * one);
      total += tmp;
      next_one_portion = path[i].weight -
                         tmp * zero * (depth - i) / static_cast<double>(depth + 1);
    } else if (zero != 0.0) {
      total += path[i].weight / zero /
               ((depth - i) / static_cast<double>(depth + 1));
    }
  }
  return total;
}

class PathWalker {
 public:
  PathWalker(const Tree& tree, const Eigen::VectorXd& x, double scale,
             Eigen::VectorXd& phi)
      : tree_(tree), x_(x), scale_(scale), phi_(phi) {
    const int d = tree.depth();
    storage_.resize(static_cast<std::size_t>((d + 2) * (d + 3) / 2));
  }

  void run() { recurse(0, 0, storage_.data(), 1.0, 1.0, -1); }

 private:
  void recurse(int node_index, int depth, PathElement* parent_path,
               double zero_fraction, double one_fraction, int feature) {
    PathElement* path = parent_path + depth + 1;
    std::copy(parent_path, parent_path + depth + 1, path);
    extend_path(path, depth, zero_fraction, one_fraction, feature);

    const TreeNode& node = tree_.nodes[node_index];
    if (node.is_leaf()) {
      for (int i = 1; i <= depth; ++i) {
        const double w = unwound_path_sum(path, depth, i);
        const PathElement& el = path[i];
        phi_(el.feature) += scale_ * w * (el.one_fraction - el.zero_fraction) *
                            node.weight;
      }
      return;
    }

    const double v = x_(node.feature);
    const bool go_left =
        std::isnan(v) ? node.default_left : v < node.threshold;
    const int hot = go_left ? node.left : node.right;
    const int cold = go_left ? node.right : node.left;
    const double hot_zero = child_fraction(tree_, node, hot);
    const double cold_zero = child_fraction(tree_, node, cold);

    double incoming_zero = 1.0;
    double incoming_one = 1.0;
    int index = 0;
    for (; index <= depth; ++index) {
      if (path[index].feature == node.feature) break;
    }
    if (index != depth + 1) {
      incoming_zero = path[index].zero_fraction;
      incoming_one = path[index].one_fraction;
      unwind_path(path, depth, index);
      depth -= 1;
    }
    recurse(hot, depth + 1, path, hot_zero * incoming_zero, incoming_one,
            node.feature);
    recurse(cold, depth + 1, path, cold_zero * incoming_zero, 0.0,
            node.feature);
  }

  const Tree& tree_;
  const Eigen::VectorXd& x_;
  double scale_;
  Eigen::VectorXd& phi_;
  std::vector<PathElement> storage_;
};

double expected_from(const Tree& tree, int n) {
  const TreeNode& node = tree.nodes[n];
  if (node.is_leaf()) return node.weight;
  return child_fraction(tree, node, node.left) * expected_from(tree, node.left) +
         child_fraction(tree, node, node.right) *
             expected_from(tree, node.right);
}

}  // namespace

double expected_value(const Tree& tree) { return expected_from(tree, 0); }

void accumulate_tree_shap(const Tree& tree, const Eigen::VectorXd& x,
                          double scale, Eigen::VectorXd& phi) {
  if (tree.nodes.empty() || tree.nodes[0].is_leaf()) return;
  PathWalker(tree, x, scale, phi).run();
}

Attribution shap_values(const gbdt::TreeEnsemble& model,
                        const Eigen::VectorXd& x) {
  if (x.size() != model.num_features()) {
    throw DimensionError("model expects " +
                         std::to_string(model.num_features()) +
                         " features, got " + std::to_string(x.size()));
  }
  Attribution out;
  out.phi = Eigen::VectorXd::Zero(model.num_features());
  out.base = gbdt::logit(model.base_score());
  for (const Tree& t : model.trees()) {
    out.base += model.learning_rate() * expected_value(t);
    accumulate_tree_shap(t, x, model.learning_rate(), out.phi);
  }
  return out;
}

Eigen::MatrixXd shap_matrix(const gbdt::TreeEnsemble& model,
                            const Eigen::MatrixXd& x, Eigen::VectorXd* bases) {
  Eigen::MatrixXd phis(x.rows(), model.num_features());
  if (bases != nullptr) bases->resize(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const Attribution a = shap_values(model, x.row(i));
    phis.row(i) = a.phi.transpose();
    if (bases != nullptr) (*bases)(i) = a.base;
  }
  return phis;
}

ShapReport summarize(const Eigen::MatrixXd& phis,
                     const Eigen::MatrixXd& values,
                     const std::vector<std::string>& names,
                     const std::vector<int>& event_ids, int top_k) {
  if (phis.rows() < 1) throw Error("summarize needs at least one instance");
  if (values.rows() != phis.rows() || values.cols() != phis.cols() ||
      static_cast<Eigen::Index>(names.size()) != phis.cols() ||
      static_cast<Eigen::Index>(event_ids.size()) != phis.rows()) {
    throw DimensionError("summarize inputs disagree in shape");
  }
  const Eigen::VectorXd mean_abs = phis.cwiseAbs().colwise().mean().transpose();
  std::vector<int> order(static_cast<std::size_t>(phis.cols()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&mean_abs](int a, int b) {
    return mean_abs(a) > mean_abs(b);
  });

  ShapReport report;
  for (std::size_t r = 0; r < order.size(); ++r) {
    report.ranking.push_back({static_cast<int>(r + 1), order[r],
                              names[order[r]], mean_abs(order[r])});
  }
  const std::size_t k =
      std::min(order.size(), static_cast<std::size_t>(std::max(top_k, 0)));
  for (std::size_t r = 0; r < k; ++r) {
    const int f = order[r];
    for (Eigen::Index i = 0; i < phis.rows(); ++i) {
      report.points.push_back({f, values(i, f), phis(i, f),
                               event_ids[static_cast<std::size_t>(i)]});
    }
  }
  return report;
}

void write_summary_csv(const std::filesystem::path& path,
                       const ShapReport& report, int top_k) {
  csv::Writer w(path);
  w.row("rank", "feature", "mean_abs_phi");
  for (const RankedFeature& f : report.ranking) {
    if (top_k > 0 && f.rank > top_k) break;
    w.row(f.rank, f.name, f.mean_abs_phi);
  }
}

void write_points_csv(const std::filesystem::path& path,
                      const ShapReport& report,
                      const std::vector<std::string>& names) {
  csv::Writer w(path);
  w.row("feature", "value", "phi", "event_id");
  for (const ShapPoint& p : report.points) {
    w.row(names[p.feature], p.value, p.phi, p.event_id);
  }
}

}  // namespace vdep::shap
