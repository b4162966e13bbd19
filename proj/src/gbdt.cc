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

#include "vdep/gbdt.h"

#include <algorithm>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "vdep/csv.h"

namespace vdep::gbdt {
namespace {

struct GradPair {
  double g = 0.0;
  double h = 0.0;
};


struct HistCell {
  double g = 0.0;
  double h = 0.0;
  long count = 0;
};


// Grows trees level by level. Each presorted column keeps a working copy of
// its row order, stably partitioned so that every node owns one contiguous,
// still-sorted segment. Columns with few distinct values are scanned through
// per-node value histograms instead; both visit the same thresholds.
class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const SortedColumns& sorted,
              const TrainConfig& cfg)
      : x_(x), sorted_(sorted), cfg_(cfg) {
    const auto n = static_cast<std::size_t>(x.rows());
    for (Eigen::Index f = 0; f < sorted.cols(); ++f) {
      if (!sorted.is_constant(f) && !sorted.is_binned(f)) {
        segmented_.push_back(f);
      }
    }
    work_.resize(segmented_.size() * n);
    work_values_.resize(segmented_.size() * n);
    scratch_.resize(n);
    scratch_values_.resize(n);
    node_of_.resize(n);
    goes_left_.resize(n);
    gh_.resize(n);
  }

  // Returns the tree (breadth-first node order) and each row's leaf.
  Tree build(const std::vector<GradPair>& gh, std::vector<int>& leaf_of_row) {
    const std::size_t n = gh.size();
    leaf_of_row.assign(n, -1);
    std::copy(gh.begin(), gh.end(), gh_.begin());
    std::fill(node_of_.begin(), node_of_.end(), 0);
    for (std::size_t c = 0; c < segmented_.size(); ++c) {
      const std::vector<int>& order = sorted_.order(segmented_[c]);
      const std::vector<double>& values = sorted_.values(segmented_[c]);
      std::copy(order.begin(), order.end(), work_.begin() + c * n);
      std::copy(values.begin(), values.end(), work_values_.begin() + c * n);
    }

    tree_ = Tree{};
    tree_.nodes.assign(1, TreeNode{});
    stats_.assign(1, NodeStats{});
    for (std::size_t r = 0; r < n; ++r) {
      stats_[0].g += gh_[r].g;
      stats_[0].h += gh_[r].h;
    }
    stats_[0].begin = 0;
    stats_[0].end = static_cast<int>(n);
    finish_stats(0);

    int level_begin = 0;
    int level_end = 1;
    for (int depth = 0; depth < cfg_.max_depth && level_begin < level_end;
         ++depth) {
      search_level(level_begin, level_end);
      const int next_begin = static_cast<int>(tree_.nodes.size());
      bool any_split = false;
      for (int node = level_begin; node < level_end; ++node) {
        const SplitCandidate best = stats_[node].best;
        if (best.feature < 0) {
          make_leaf(node);
          continue;
        }
        any_split = true;
        const int left = static_cast<int>(tree_.nodes.size());
        tree_.nodes.push_back(TreeNode{});
        tree_.nodes.push_back(TreeNode{});
        stats_.push_back(NodeStats{});
        stats_.push_back(NodeStats{});
        TreeNode& t = tree_.nodes[node];
        t.feature = best.feature;
        t.threshold = best.threshold;
        t.left = left;
        t.right = left + 1;
        t.default_left = true;
        t.cover = stats_[node].h;
      }
      // Route rows to children and accumulate child statistics.
      for (std::size_t r = 0; r < n; ++r) {
        const int node = node_of_[r];
        if (node < 0) continue;
        const TreeNode& t = tree_.nodes[node];
        if (t.is_leaf()) {
          leaf_of_row[r] = node;
          node_of_[r] = -1;
          continue;
        }
        const bool left =
            x_(static_cast<Eigen::Index>(r), t.feature) < t.threshold;
        const int child = left ? t.left : t.right;
        goes_left_[r] = left;
        node_of_[r] = child;
        stats_[child].g += gh_[r].g;
        stats_[child].h += gh_[r].h;
        ++stats_[child].count;
      }
      // The deepest level's children are never searched.
      if (any_split && depth + 1 < cfg_.max_depth) {
        partition_level(level_begin, level_end);
      }
      level_begin = next_begin;
      level_end = static_cast<int>(tree_.nodes.size());
      for (int node = level_begin; node < level_end; ++node) finish_stats(node);
    }
    for (int node = level_begin; node < level_end; ++node) make_leaf(node);
    for (std::size_t r = 0; r < n; ++r) {
      if (node_of_[r] >= 0) leaf_of_row[r] = node_of_[r];
    }
    return std::move(tree_);
  }

 private:
  struct NodeStats {
    double g = 0.0;
    double h = 0.0;
    double parent_score = 0.0;   // G^2 / (H + lambda)
    double score_to_beat = 0.0;  // child score a split must exceed
    int begin = 0;               // segment within every working column
    int end = 0;
    int count = 0;
    SplitCandidate best;
  };

  void finish_stats(int node) {
    NodeStats& st = stats_[node];
    st.parent_score = st.g * st.g / (st.h + cfg_.reg_lambda);
  }

  // Children segments follow the parent's: left rows first, then right.
  void partition_level(int begin, int end) {
    const std::size_t n = node_of_.size();
    for (int node = begin; node < end; ++node) {
      const TreeNode& t = tree_.nodes[node];
      if (t.is_leaf()) continue;
      NodeStats& left = stats_[t.left];
      NodeStats& right = stats_[t.right];
      left.begin = stats_[node].begin;
      left.end = left.begin + left.count;
      right.begin = left.end;
      right.end = stats_[node].end;
    }
    for (std::size_t c = 0; c < segmented_.size(); ++c) {
      int* col = work_.data() + c * n;
      double* vals = work_values_.data() + c * n;
      for (int node = begin; node < end; ++node) {
        const TreeNode& t = tree_.nodes[node];
        if (t.is_leaf()) continue;
        const NodeStats& st = stats_[node];
        int* out_left = col + st.begin;
        double* val_left = vals + st.begin;
        int* out_right = scratch_.data();
        double* val_right = scratch_values_.data();
        // Branch-free: write to both sides, advance only the chosen one.
        for (int k = st.begin; k < st.end; ++k) {
          const int r = col[k];
          const double v = vals[k];
          const int left = goes_left_[r];
          *out_left = r;
          *val_left = v;
          *out_right = r;
          *val_right = v;
          out_left += left;
          val_left += left;
          out_right += 1 - left;
          val_right += 1 - left;
        }
        const auto right_count = out_right - scratch_.data();
        std::copy(scratch_.data(), out_right, out_left);
        std::copy(scratch_values_.data(), scratch_values_.data() + right_count,
                  val_left);
      }
    }
  }

  // Offers the split with left sums (gl, hl) to `st`. A division-free
  // comparison rejects clear losers; survivors are judged on the exact gain.
  void offer(NodeStats& st, Eigen::Index f, double gl, double hl, double lo,
             double hi) const {
    const double hr = st.h - hl;
    const double mcw = cfg_.min_child_weight;
    if (hl < mcw || hr < mcw) return;
    const double lambda = cfg_.reg_lambda;
    const double gr = st.g - gl;
    const double a = hl + lambda;
    const double b = hr + lambda;
    if (gl * gl * b + gr * gr * a <= st.score_to_beat * (1.0 - 1e-9) * (a * b)) {
      return;
    }
    const double gain =
        0.5 * (gl * gl / a + gr * gr / b - st.parent_score) - cfg_.gamma;
    if (gain > st.best.gain) {
      st.best = {static_cast<int>(f), midpoint(lo, hi), gain};
      st.score_to_beat = 2.0 * (gain + cfg_.gamma) + st.parent_score;
    }
  }

  static double midpoint(double lo, double hi) {
    const double thr = 0.5 * (lo + hi);
    return thr > lo ? thr : hi;
  }

  // Split search over nodes [begin, end); fills stats_[node].best.
  void search_level(int begin, int end) {
    for (int node = begin; node < end; ++node) {
      NodeStats& st = stats_[node];
      st.best = SplitCandidate{};
      st.score_to_beat = 2.0 * cfg_.gamma + st.parent_score;
    }
    std::size_t c = 0;
    for (Eigen::Index f = 0; f < sorted_.cols(); ++f) {
      if (sorted_.is_constant(f)) continue;
      if (sorted_.is_binned(f)) {
        scan_binned(f, begin, end);
      } else {
        scan_segments(f, c++, begin, end);
      }
    }
  }

  void scan_segments(Eigen::Index f, std::size_t c, int begin, int end) {
    const std::size_t n = node_of_.size();
    const int* col = work_.data() + c * n;
    const double* values = work_values_.data() + c * n;
    const GradPair* gh = gh_.data();
    const double lambda = cfg_.reg_lambda;
    const double mcw = cfg_.min_child_weight;
    for (int node = begin; node < end; ++node) {
      NodeStats& st = stats_[node];
      if (st.end - st.begin < 2) continue;
      int r = col[st.begin];
      double last = values[st.begin];
      double gl = gh[r].g;
      double hl = gh[r].h;
      const double total_g = st.g;
      const double total_h = st.h;
      // Conditions are combined without branches; ties and rejected
      // candidates are the common case.
      for (int k = st.begin + 1; k < st.end; ++k) {
        // Gradient pairs are gathered out of row order; fetch ahead.
        __builtin_prefetch(gh + col[std::min(k + 24, st.end - 1)]);
        r = col[k];
        const double v = values[k];
        const double hr = total_h - hl;
        const double gr = total_g - gl;
        const double a = hl + lambda;
        const double b = hr + lambda;
        const bool admissible = (v != last) & (hl >= mcw) & (hr >= mcw) &
                                (gl * gl * b + gr * gr * a >
                                 st.score_to_beat * (1.0 - 1e-9) * (a * b));
        if (admissible) [[unlikely]] {
          offer(st, f, gl, hl, last, v);
        }
        gl += gh[r].g;
        hl += gh[r].h;
        last = v;
      }
    }
  }

  void scan_binned(Eigen::Index f, int begin, int end) {
    const std::vector<std::uint8_t>& bins = sorted_.bins(f);
    const std::vector<double>& levels = sorted_.bin_values(f);
    const std::size_t nb = levels.size();
    hist_.assign(static_cast<std::size_t>(end - begin) * nb, HistCell{});
    for (std::size_t r = 0; r < node_of_.size(); ++r) {
      const int node = node_of_[r];
      if (node < begin) continue;  // parked rows carry -1
      HistCell& cell =
          hist_[static_cast<std::size_t>(node - begin) * nb + bins[r]];
      cell.g += gh_[r].g;
      cell.h += gh_[r].h;
      ++cell.count;
    }
    for (int node = begin; node < end; ++node) {
      NodeStats& st = stats_[node];
      const HistCell* cells =
          &hist_[static_cast<std::size_t>(node - begin) * nb];
      double gl = 0.0;
      double hl = 0.0;
      int prev = -1;
      for (std::size_t b = 0; b < nb; ++b) {
        if (cells[b].count == 0) continue;
        if (prev >= 0) offer(st, f, gl, hl, levels[prev], levels[b]);
        gl += cells[b].g;
        hl += cells[b].h;
        prev = static_cast<int>(b);
      }
    }
  }

  void make_leaf(int node) {
    TreeNode& t = tree_.nodes[node];
    t.feature = -1;
    t.left = t.right = -1;
    t.weight = leaf_weight(stats_[node].g, stats_[node].h, cfg_.reg_lambda);
    t.cover = stats_[node].h;
  }

  const Matrix& x_;
  const SortedColumns& sorted_;
  const TrainConfig& cfg_;
  std::vector<Eigen::Index> segmented_;  // columns scanned via segments
  std::vector<int> work_;                // per segmented column, n row ids
  std::vector<double> work_values_;
  std::vector<int> scratch_;
  std::vector<double> scratch_values_;
  std::vector<int> node_of_;  // -1 once the row's node became a leaf
  std::vector<std::uint8_t> goes_left_;
  std::vector<GradPair> gh_;
  Tree tree_;
  std::vector<NodeStats> stats_;
  std::vector<HistCell> hist_;
};

// Rewrites a tree into pre-order; `remap` receives old -> new indices.
Tree to_preorder(const Tree& tree, std::vector<int>& remap) {
  Tree out;
  out.nodes.reserve(tree.nodes.size());
  remap.assign(tree.nodes.size(), -1);
  std::function<int(int)> visit = [&](int old) -> int {
    const int idx = static_cast<int>(out.nodes.size());
    remap[old] = idx;
    out.nodes.push_back(tree.nodes[old]);
    if (!tree.nodes[old].is_leaf()) {
      const int l = visit(tree.nodes[old].left);
      const int r = visit(tree.nodes[old].right);
      out.nodes[idx].left = l;
      out.nodes[idx].right = r;
    }
    return idx;
  };
  visit(0);
  return out;
}

void check_training_input(const Matrix& x, std::span<const double> labels) {
  if (x.rows() == 0 || x.cols() == 0) {
    throw Error("training requires a non-empty feature matrix");
  }
  if (static_cast<std::size_t>(x.rows()) != labels.size()) {
    throw DimensionError("feature rows (" + std::to_string(x.rows()) +
                         ") != labels (" + std::to_string(labels.size()) + ")");
  }
  if (!x.allFinite()) {
    throw Error("training features must be finite");
  }
  for (double y : labels) {
    if (y != 0.0 && y != 1.0) throw Error("labels must be 0 or 1");
  }
}

std::string fmt(double v) { return csv::format_double(v, 17); }

}  // namespace

void TrainConfig::validate() const {
  if (rounds < 1) throw SchemaError("rounds must be >= 1");
  if (max_depth < 1) throw SchemaError("max_depth must be >= 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw SchemaError("learning_rate must be in (0, 1]");
  }
  if (!(min_child_weight >= 0.0)) {
    throw SchemaError("min_child_weight must be >= 0");
  }
  if (!(reg_lambda >= 0.0)) throw SchemaError("reg_lambda must be >= 0");
  if (!(gamma >= 0.0)) throw SchemaError("gamma must be >= 0");
  if (!(base_score > 0.0 && base_score < 1.0)) {
    throw SchemaError("base_score must be in (0, 1)");
  }
}

int Tree::depth() const {
  std::function<int(int)> d = [&](int n) -> int {
    if (nodes[n].is_leaf()) return 0;
    return 1 + std::max(d(nodes[n].left), d(nodes[n].right));
  };
  return nodes.empty() ? 0 : d(0);
}

TreeEnsemble::TreeEnsemble(double base_score, double learning_rate,
                           std::vector<std::string> feature_names)
    : base_score_(base_score),
      learning_rate_(learning_rate),
      feature_names_(std::move(feature_names)) {}

void TreeEnsemble::check_dimension(Eigen::Index n) const {
  if (n != num_features()) {
    throw DimensionError("model expects " + std::to_string(num_features()) +
                         " features, got " + std::to_string(n));
  }
}

Eigen::VectorXd TreeEnsemble::margin(const Matrix& x) const {
  check_dimension(x.cols());
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out(i) = margin(x.row(i));
  return out;
}

Eigen::VectorXd TreeEnsemble::predict_proba(const Matrix& x) const {
  return margin(x).unaryExpr([](double m) { return sigmoid(m); });
}

SortedColumns::SortedColumns(const Matrix& x) : rows_(x.rows()) {
  const auto cols = static_cast<std::size_t>(x.cols());
  order_.resize(cols);
  values_.resize(cols);
  bins_.resize(cols);
  bin_values_.resize(cols);
  constant_.assign(cols, false);
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    auto& order = order_[f];
    order.resize(x.rows());
    std::iota(order.begin(), order.end(), 0);
    const auto col = x.col(f);
    std::stable_sort(order.begin(), order.end(),
                     [&col](int a, int b) { return col(a) < col(b); });
    auto& values = values_[f];
    values.resize(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) values[k] = col(order[k]);

    std::vector<double> distinct;
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (k == 0 || values[k] != values[k - 1]) distinct.push_back(values[k]);
      if (distinct.size() > kMaxBins) break;
    }
    constant_[f] = distinct.size() <= 1;
    if (distinct.size() <= kMaxBins && !constant_[f]) {
      auto& bins = bins_[f];
      bins.resize(order.size());
      std::size_t b = 0;
      for (std::size_t k = 0; k < values.size(); ++k) {
        if (values[k] != distinct[b]) ++b;
        bins[static_cast<std::size_t>(order[k])] = static_cast<std::uint8_t>(b);
      }
      bin_values_[f] = std::move(distinct);
      // The sorted order is not needed for histogram columns.
      std::vector<int>().swap(order);
      std::vector<double>().swap(values);
    }
  }
}

double logistic_loss(std::span<const double> margins,
                     std::span<const double> labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < margins.size(); ++i) {
    const double m = margins[i];
    // log(1 + e^m) - y m, computed without overflow.
    const double softplus = m > 0 ? m + std::log1p(std::exp(-m))
                                  : std::log1p(std::exp(m));
    total += softplus - labels[i] * m;
  }
  return total / static_cast<double>(margins.size());
}

SplitCandidate find_best_split(const Matrix& x, std::span<const double> grad,
                               std::span<const double> hess,
                               const TrainConfig& cfg) {
  if (grad.size() != static_cast<std::size_t>(x.rows()) ||
      hess.size() != grad.size()) {
    throw DimensionError("gradient size does not match rows");
  }
  std::vector<GradPair> gh(grad.size());
  for (std::size_t i = 0; i < gh.size(); ++i) gh[i] = {grad[i], hess[i]};
  const SortedColumns sorted(x);
  TrainConfig one_level = cfg;
  one_level.max_depth = 1;
  std::vector<int> leaf_of;
  TreeBuilder builder(x, sorted, one_level);
  const Tree t = builder.build(gh, leaf_of);
  if (t.nodes[0].is_leaf()) return {};
  // Recompute the winning gain from the children's statistics.
  double gl = 0, hl = 0, gr = 0, hr = 0;
  for (std::size_t i = 0; i < gh.size(); ++i) {
    if (leaf_of[i] == t.nodes[0].left) {
      gl += gh[i].g;
      hl += gh[i].h;
    } else {
      gr += gh[i].g;
      hr += gh[i].h;
    }
  }
  return {t.nodes[0].feature, t.nodes[0].threshold,
          split_gain(gl, hl, gr, hr, cfg.reg_lambda, cfg.gamma)};
}

TreeEnsemble train(const Matrix& x, std::span<const double> labels,
                   const TrainConfig& cfg,
                   std::vector<std::string> feature_names, TrainTrace* trace) {
  check_training_input(x, labels);
  const SortedColumns sorted(x);
  return train(x, sorted, labels, cfg, std::move(feature_names), trace);
}

TreeEnsemble train(const Matrix& x, const SortedColumns& sorted,
                   std::span<const double> labels, const TrainConfig& cfg,
                   std::vector<std::string> feature_names, TrainTrace* trace) {
  cfg.validate();
  check_training_input(x, labels);
  if (sorted.rows() != x.rows() || sorted.cols() != x.cols()) {
    throw DimensionError("presorted columns do not match the matrix");
  }
  if (feature_names.empty()) {
    for (Eigen::Index f = 0; f < x.cols(); ++f) {
      feature_names.push_back("f" + std::to_string(f));
    }
  }
  if (static_cast<Eigen::Index>(feature_names.size()) != x.cols()) {
    throw DimensionError("feature name count does not match columns");
  }

  TreeEnsemble model(cfg.base_score, cfg.learning_rate,
                     std::move(feature_names));
  model.set_config(cfg);

  const std::size_t n = labels.size();
  std::vector<double> margins(n, logit(cfg.base_score));
  std::vector<GradPair> gh(n);
  if (trace != nullptr) {
    trace->loss.assign(1, logistic_loss(margins, labels));
  }

  std::vector<int> leaf_of;
  std::vector<int> remap;
  TreeBuilder builder(x, sorted, cfg);
  for (int round = 0; round < cfg.rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(margins[i]);
      gh[i] = {p - labels[i], std::max(p * (1.0 - p), 1e-16)};
    }
    const Tree bfs = builder.build(gh, leaf_of);
    Tree tree = to_preorder(bfs, remap);
    for (std::size_t i = 0; i < n; ++i) {
      margins[i] += cfg.learning_rate * tree.nodes[remap[leaf_of[i]]].weight;
    }
    model.mutable_trees().push_back(std::move(tree));
    if (trace != nullptr) trace->loss.push_back(logistic_loss(margins, labels));
  }
  return model;
}

std::string serialize(const TreeEnsemble& model) {
  std::ostringstream out;
  const TrainConfig& c = model.config();
  out << "vdep-gbdt-model " << kModelFormatVersion << '\n';
  out << "config rounds=" << c.rounds << " max_depth=" << c.max_depth
      << " learning_rate=" << fmt(c.learning_rate)
      << " min_child_weight=" << fmt(c.min_child_weight)
      << " reg_lambda=" << fmt(c.reg_lambda) << " gamma=" << fmt(c.gamma)
      << " base_score=" << fmt(c.base_score) << " seed=" << c.seed << '\n';
  out << "base_score " << fmt(model.base_score()) << '\n';
  out << "learning_rate " << fmt(model.learning_rate()) << '\n';
  out << "features " << model.feature_names().size() << '\n';
  for (const std::string& name : model.feature_names()) {
    out << "f " << name << '\n';
  }
  out << "trees " << model.trees().size() << '\n';
  for (const Tree& t : model.trees()) {
    out << "tree " << t.nodes.size() << '\n';
    for (const TreeNode& node : t.nodes) {
      if (node.is_leaf()) {
        out << "leaf " << fmt(node.weight) << ' ' << fmt(node.cover) << '\n';
      } else {
        out << "split " << node.feature << ' ' << fmt(node.threshold) << ' '
            << (node.default_left ? 1 : 0) << ' ' << fmt(node.cover) << '\n';
      }
    }
  }
  out << "end\n";
  return out.str();
}

namespace {

class TokenReader {
 public:
  explicit TokenReader(std::string_view text) : in_(std::string(text)) {}

  std::string word(const char* what) {
    std::string w;
    if (!(in_ >> w)) fail(std::string("truncated model: expected ") + what);
    return w;
  }
  void expect(const char* keyword) {
    const std::string w = word(keyword);
    if (w != keyword) {
      fail(std::string("expected \"") + keyword + "\", got \"" + w + "\"");
    }
  }
  double number(const char* what) {
    const std::string w = word(what);
    try {
      return csv::parse_double(w, 0);
    } catch (const ParseError&) {
      fail(std::string("bad number for ") + what + ": " + w);
    }
  }
  long integer(const char* what) {
    const std::string w = word(what);
    char* end = nullptr;
    const long v = std::strtol(w.c_str(), &end, 10);
    if (end == w.c_str() || *end != '\0') {
      fail(std::string("bad integer for ") + what + ": " + w);
    }
    return v;
  }
  std::string rest_of_line() {
    std::string line;
    std::getline(in_ >> std::ws, line);
    return line;
  }
  [[noreturn]] static void fail(const std::string& msg) {
    throw ModelFormatError(msg);
  }

 private:
  std::istringstream in_;
};

void parse_config_pair(const std::string& pair, TrainConfig& c) {
  const auto eq = pair.find('=');
  if (eq == std::string::npos) TokenReader::fail("bad config entry " + pair);
  const std::string key = pair.substr(0, eq);
  const std::string value = pair.substr(eq + 1);
  const double v = csv::parse_double(value, 0);
  if (key == "rounds") {
    c.rounds = static_cast<int>(v);
  } else if (key == "max_depth") {
    c.max_depth = static_cast<int>(v);
  } else if (key == "learning_rate") {
    c.learning_rate = v;
  } else if (key == "min_child_weight") {
    c.min_child_weight = v;
  } else if (key == "reg_lambda") {
    c.reg_lambda = v;
  } else if (key == "gamma") {
    c.gamma = v;
  } else if (key == "base_score") {
    c.base_score = v;
  } else if (key == "seed") {
    c.seed = std::stoull(value);
  } else {
    TokenReader::fail("unknown config key " + key);
  }
}

// Checks that `nodes` is a well-formed pre-order tree and links children.
void link_preorder(std::vector<TreeNode>& nodes) {
  std::size_t next = 0;
  std::function<int()> visit = [&]() -> int {
    if (next >= nodes.size()) TokenReader::fail("tree node list is truncated");
    const int idx = static_cast<int>(next++);
    if (nodes[idx].feature >= 0) {
      const int l = visit();
      const int r = visit();
      nodes[idx].left = l;
      nodes[idx].right = r;
    }
    return idx;
  };
  visit();
  if (next != nodes.size()) TokenReader::fail("tree has unreachable nodes");
}

}  // namespace

TreeEnsemble deserialize(std::string_view text) {
  TokenReader in(text);
  in.expect("vdep-gbdt-model");
  const long version = in.integer("version");
  if (version != kModelFormatVersion) {
    TokenReader::fail("unsupported model version " + std::to_string(version));
  }
  in.expect("config");
  TrainConfig cfg;
  std::istringstream cfg_line(in.rest_of_line());
  for (std::string pair; cfg_line >> pair;) {
    try {
      parse_config_pair(pair, cfg);
    } catch (const ParseError&) {
      TokenReader::fail("bad config entry " + pair);
    }
  }
  in.expect("base_score");
  const double base = in.number("base_score");
  in.expect("learning_rate");
  const double lr = in.number("learning_rate");
  if (!(base > 0.0 && base < 1.0) || !(lr > 0.0)) {
    TokenReader::fail("invalid base_score or learning_rate");
  }
  in.expect("features");
  const long n_features = in.integer("feature count");
  if (n_features < 0) TokenReader::fail("negative feature count");
  std::vector<std::string> names;
  for (long i = 0; i < n_features; ++i) {
    in.expect("f");
    names.push_back(in.word("feature name"));
  }
  TreeEnsemble model(base, lr, std::move(names));
  model.set_config(cfg);
  in.expect("trees");
  const long n_trees = in.integer("tree count");
  if (n_trees < 0) TokenReader::fail("negative tree count");
  for (long t = 0; t < n_trees; ++t) {
    in.expect("tree");
    const long n_nodes = in.integer("node count");
    if (n_nodes < 1) TokenReader::fail("tree without nodes");
    Tree tree;
    tree.nodes.resize(static_cast<std::size_t>(n_nodes));
    for (TreeNode& node : tree.nodes) {
      const std::string kind = in.word("node kind");
      if (kind == "leaf") {
        node.weight = in.number("leaf weight");
        node.cover = in.number("leaf cover");
        if (!std::isfinite(node.weight)) TokenReader::fail("non-finite leaf");
      } else if (kind == "split") {
        const long f = in.integer("split feature");
        if (f < 0 || f >= n_features) {
          TokenReader::fail("split feature out of range");
        }
        node.feature = static_cast<int>(f);
        node.threshold = in.number("threshold");
        if (!std::isfinite(node.threshold)) {
          TokenReader::fail("non-finite threshold");
        }
        node.default_left = in.integer("default branch") != 0;
        node.cover = in.number("split cover");
        node.left = 0;  // Marks the node as a split until linked.
      } else {
        TokenReader::fail("unknown node kind \"" + kind + "\"");
      }
    }
    link_preorder(tree.nodes);
    model.mutable_trees().push_back(std::move(tree));
  }
  in.expect("end");
  return model;
}

void save_model(const std::filesystem::path& path, const TreeEnsemble& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << serialize(model);
}

TreeEnsemble load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

}  // namespace vdep::gbdt
