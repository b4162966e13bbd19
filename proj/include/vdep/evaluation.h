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

// Classifier metrics and week-grouped cross-validation.

#ifndef VDEP_EVALUATION_H_
#define VDEP_EVALUATION_H_

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "vdep/domain.h"
#include "vdep/error.h"
#include "vdep/features.h"
#include "vdep/gbdt.h"
#include "vdep/labeling.h"

namespace vdep::eval {

inline constexpr double kDefaultThreshold = 0.5;

// Area under the ROC curve as the Mann-Whitney statistic
// P(s+ > s-) + P(s+ == s-) / 2. Labels are positive when nonzero.
template <typename Scores, typename Labels>
double auc(const Eigen::DenseBase<Scores>& scores,
           const Eigen::DenseBase<Labels>& labels) {
  const Eigen::Index n = scores.size();
  if (labels.size() != n) throw DimensionError("auc: size mismatch");
  std::vector<std::pair<double, bool>> pairs(static_cast<std::size_t>(n));
  double n_pos = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool pos = labels(i) != 0;
    pairs[static_cast<std::size_t>(i)] = {static_cast<double>(scores(i)), pos};
    n_pos += pos ? 1.0 : 0.0;
  }
  const double n_neg = static_cast<double>(n) - n_pos;
  if (n_pos == 0.0 || n_neg == 0.0) {
    throw UndefinedMetricError("auc needs both classes present");
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  // Sum over positives of (#negatives below + #negatives tied / 2).
  double wins = 0.0;
  double neg_below = 0.0;
  for (std::size_t i = 0; i < pairs.size();) {
    std::size_t j = i;
    double pos = 0.0;
    double neg = 0.0;
    while (j < pairs.size() && pairs[j].first == pairs[i].first) {
      (pairs[j].second ? pos : neg) += 1.0;
      ++j;
    }
    wins += pos * neg_below + 0.5 * pos * neg;
    neg_below += neg;
    i = j;
  }
  return wins / (n_pos * n_neg);
}

// Mean squared error between probabilities and 0/1 outcomes.
template <typename Probs, typename Labels>
double brier(const Eigen::DenseBase<Probs>& probs,
             const Eigen::DenseBase<Labels>& labels) {
  if (probs.size() != labels.size()) throw DimensionError("brier: size mismatch");
  if (probs.size() == 0) throw UndefinedMetricError("brier of empty input");
  double total = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    const double p = static_cast<double>(probs(i));
    if (!(p >= 0.0 && p <= 1.0)) throw Error("brier: probability outside [0,1]");
    const double d = p - (labels(i) != 0 ? 1.0 : 0.0);
    total += d * d;
  }
  return total / static_cast<double>(probs.size());
}

struct Confusion {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  long tn = 0;

  long total() const { return tp + fp + fn + tn; }
  bool operator==(const Confusion&) const = default;
};

template <typename Preds, typename Labels>
Confusion confusion(const Eigen::DenseBase<Preds>& preds,
                    const Eigen::DenseBase<Labels>& labels) {
  if (preds.size() != labels.size()) {
    throw DimensionError("confusion: size mismatch");
  }
  Confusion c;
  for (Eigen::Index i = 0; i < preds.size(); ++i) {
    const bool p = preds(i) != 0;
    const bool y = labels(i) != 0;
    if (p && y) ++c.tp;
    if (p && !y) ++c.fp;
    if (!p && y) ++c.fn;
    if (!p && !y) ++c.tn;
  }
  return c;
}

// Thresholds probabilities at `threshold` (p >= threshold is positive).
template <typename Probs, typename Labels>
Confusion confusion_at(const Eigen::DenseBase<Probs>& probs,
                       const Eigen::DenseBase<Labels>& labels,
                       double threshold = kDefaultThreshold) {
  const Eigen::Array<bool, Eigen::Dynamic, 1> preds =
      probs.derived().array() >= threshold;
  return confusion(preds, labels);
}

// 2PR/(P+R); 0 when there are no true positives.
double f1(const Confusion& c);

template <typename Preds, typename Labels>
double f1(const Eigen::DenseBase<Preds>& preds,
          const Eigen::DenseBase<Labels>& labels) {
  return f1(confusion(preds, labels));
}

enum class Classifier { kRecovery = 0, kAttacked = 1, kScores = 2, kConcedes = 3 };
inline constexpr int kNumClassifiers = 4;
inline constexpr std::array<Classifier, kNumClassifiers> kClassifiers = {
    Classifier::kRecovery, Classifier::kAttacked, Classifier::kScores,
    Classifier::kConcedes};

std::string_view to_string(Classifier c);
Classifier parse_classifier(std::string_view name);
bool label_of(const Labels& labels, Classifier c);

struct FoldPlan {
  int num_folds = 0;
  std::vector<int> fold_of_match;  // parallel to corpus.matches
  std::string grouping;            // "week" or "week-round-robin"
};

// One fold per week when the corpus spans 5 weeks; other week counts are
// grouped round-robin into at most 5 folds. Throws FoldError below 2 folds.
FoldPlan make_fold_plan(const Corpus& corpus, int max_folds = 5);

struct FoldMetrics {
  Classifier classifier = Classifier::kRecovery;
  int fold = 0;
  std::optional<double> auc;  // empty when the test fold has one class
  double brier = 0.0;
  double f1 = 0.0;
  Confusion confusion;
};

struct MetricSummary {
  Classifier classifier = Classifier::kRecovery;
  std::optional<double> auc_mean, auc_std;
  double brier_mean = 0.0, brier_std = 0.0;
  double f1_mean = 0.0, f1_std = 0.0;
};

struct MetricReport {
  std::vector<FoldMetrics> rows;

  // Mean and sample standard deviation across folds.
  MetricSummary summary(Classifier c) const;
};

// Training-side label and event-flag counts of one fold.
struct FoldCounts {
  long train_events = 0;
  long recovery_labels = 0;
  long attacked_labels = 0;
  long recovery_events = 0;
  long attack_events = 0;
};

struct FoldModels {
  int fold = 0;
  FoldCounts counts;
  std::array<gbdt::TreeEnsemble, kNumClassifiers> models;
};

struct OofPrediction {
  int match_id = 0;
  int event_id = 0;
  int fold = 0;
  std::array<double, kNumClassifiers> p{};
};

struct CrossValidationResult {
  FoldPlan plan;
  MetricReport report;
  std::vector<OofPrediction> oof;  // corpus event order
  std::vector<FoldModels> folds;
};

struct CrossValidationOptions {
  LabelConfig labels;
  gbdt::TrainConfig train;
  double threshold = kDefaultThreshold;
  // Restricts training to these classifiers; others get p = 0 and no rows.
  std::vector<Classifier> classifiers{kClassifiers.begin(), kClassifiers.end()};
  // Called after each model is trained, with its wall time in seconds.
  std::function<void(int fold, Classifier c, double seconds)> on_model;
};

// Trains every classifier on four folds and predicts the held-out one.
// `features` may be supplied to skip rebuilding the corpus matrix.
CrossValidationResult cross_validate(const Corpus& corpus,
                                     const CrossValidationOptions& options,
                                     const FeatureMatrix* features = nullptr);

// metrics.csv: classifier,fold,auc,brier,f1,tp,fp,fn,tn.
void write_metrics_csv(const std::filesystem::path& path,
                       const MetricReport& report);
// metrics_summary.csv: classifier,auc_mean,auc_std,... per classifier.
void write_metrics_summary_csv(const std::filesystem::path& path,
                               const MetricReport& report);
// oof_probs.csv: match_id,event_id,p_recovery,p_attacked,p_scores,p_concedes.
void write_oof_csv(const std::filesystem::path& path,
                   const std::vector<OofPrediction>& oof);

}  // namespace vdep::eval

#endif  // VDEP_EVALUATION_H_
