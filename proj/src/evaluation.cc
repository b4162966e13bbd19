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

#include "vdep/evaluation.h"

#include <chrono>
#include <map>
#include <set>

#include "vdep/csv.h"

namespace vdep::eval {
namespace {

constexpr std::array<std::string_view, kNumClassifiers> kClassifierNames = {
    "recovery", "attacked", "scores", "concedes"};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& v) {
  MeanStd out;
  if (v.empty()) return out;
  out.mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / (v.size() - 1));
  }
  return out;
}

}  // namespace

double f1(const Confusion& c) {
  if (c.tp == 0) return 0.0;
  const double precision = static_cast<double>(c.tp) / (c.tp + c.fp);
  const double recall = static_cast<double>(c.tp) / (c.tp + c.fn);
  return 2.0 * precision * recall / (precision + recall);
}

std::string_view to_string(Classifier c) {
  return kClassifierNames[static_cast<int>(c)];
}

Classifier parse_classifier(std::string_view name) {
  for (Classifier c : kClassifiers) {
    if (to_string(c) == name) return c;
  }
  throw SchemaError("unknown classifier \"" + std::string(name) + "\"");
}

bool label_of(const Labels& labels, Classifier c) {
  switch (c) {
    case Classifier::kRecovery:
      return labels.recovery;
    case Classifier::kAttacked:
      return labels.attacked;
    case Classifier::kScores:
      return labels.scores;
    case Classifier::kConcedes:
      return labels.concedes;
  }
  return false;
}

FoldPlan make_fold_plan(const Corpus& corpus, int max_folds) {
  std::set<int> weeks;
  for (const MatchRecord& m : corpus.matches) weeks.insert(m.week);
  const int n_weeks = static_cast<int>(weeks.size());
  if (n_weeks < 2 || max_folds < 2) {
    throw FoldError("cross-validation needs matches from at least 2 weeks, "
                    "corpus spans " +
                    std::to_string(n_weeks));
  }
  std::map<int, int> week_rank;
  for (int w : weeks) week_rank.emplace(w, static_cast<int>(week_rank.size()));

  FoldPlan plan;
  plan.num_folds = std::min(n_weeks, max_folds);
  plan.grouping = n_weeks <= max_folds ? "week" : "week-round-robin";
  for (const MatchRecord& m : corpus.matches) {
    plan.fold_of_match.push_back(week_rank[m.week] % plan.num_folds);
  }
  return plan;
}

MetricSummary MetricReport::summary(Classifier c) const {
  std::vector<double> aucs, briers, f1s;
  for (const FoldMetrics& r : rows) {
    if (r.classifier != c) continue;
    if (r.auc) aucs.push_back(*r.auc);
    briers.push_back(r.brier);
    f1s.push_back(r.f1);
  }
  MetricSummary s;
  s.classifier = c;
  if (!aucs.empty()) {
    const MeanStd a = mean_std(aucs);
    s.auc_mean = a.mean;
    s.auc_std = a.std;
  }
  const MeanStd b = mean_std(briers);
  const MeanStd f = mean_std(f1s);
  s.brier_mean = b.mean;
  s.brier_std = b.std;
  s.f1_mean = f.mean;
  s.f1_std = f.std;
  return s;
}

CrossValidationResult cross_validate(const Corpus& corpus,
                                     const CrossValidationOptions& options,
                                     const FeatureMatrix* features) {
  CrossValidationResult result;
  result.plan = make_fold_plan(corpus);

  FeatureMatrix built;
  if (features == nullptr) {
    built = build_corpus_features(corpus);
    features = &built;
  }

  // Flatten labels and event bookkeeping in corpus order.
  std::vector<Labels> labels;
  std::vector<int> fold_of_row;
  std::vector<const Event*> event_of_row;
  result.oof.clear();
  for (std::size_t mi = 0; mi < corpus.matches.size(); ++mi) {
    const MatchRecord& m = corpus.matches[mi];
    const LabelSet ls = label_events(m.events, options.labels);
    for (std::size_t i = 0; i < m.events.size(); ++i) {
      labels.push_back(ls[i]);
      fold_of_row.push_back(result.plan.fold_of_match[mi]);
      event_of_row.push_back(&m.events[i]);
      result.oof.push_back(
          {m.match_id, m.events[i].event_id, result.plan.fold_of_match[mi], {}});
    }
  }
  if (static_cast<std::size_t>(features->rows()) != labels.size()) {
    throw DimensionError("feature rows do not match corpus events");
  }

  for (int fold = 0; fold < result.plan.num_folds; ++fold) {
    std::vector<Eigen::Index> train_rows, test_rows;
    for (std::size_t r = 0; r < labels.size(); ++r) {
      (fold_of_row[r] == fold ? test_rows : train_rows)
          .push_back(static_cast<Eigen::Index>(r));
    }
    if (train_rows.empty() || test_rows.empty()) {
      throw FoldError("fold " + std::to_string(fold) + " is empty");
    }
    const FeatureMatrix x_train = (*features)(train_rows, Eigen::all);
    const FeatureMatrix x_test = (*features)(test_rows, Eigen::all);
    const gbdt::SortedColumns sorted(x_train);

    FoldModels fm;
    fm.fold = fold;
    fm.counts.train_events = static_cast<long>(train_rows.size());
    for (Eigen::Index r : train_rows) {
      const Labels& l = labels[static_cast<std::size_t>(r)];
      const Event& e = *event_of_row[static_cast<std::size_t>(r)];
      fm.counts.recovery_labels += l.recovery;
      fm.counts.attacked_labels += l.attacked;
      fm.counts.recovery_events += e.flags.ball_recovery;
      fm.counts.attack_events += e.flags.effective_attack;
    }

    for (Classifier c : options.classifiers) {
      std::vector<double> y;
      y.reserve(train_rows.size());
      for (Eigen::Index r : train_rows) {
        y.push_back(label_of(labels[static_cast<std::size_t>(r)], c) ? 1.0
                                                                     : 0.0);
      }
      const auto t0 = std::chrono::steady_clock::now();
      gbdt::TreeEnsemble model =
          gbdt::train(x_train, sorted, y, options.train, feature_names());
      if (options.on_model) {
        const std::chrono::duration<double> dt =
            std::chrono::steady_clock::now() - t0;
        options.on_model(fold, c, dt.count());
      }
      const Eigen::VectorXd p = model.predict_proba(x_test);
      Eigen::VectorXd y_test(static_cast<Eigen::Index>(test_rows.size()));
      for (std::size_t k = 0; k < test_rows.size(); ++k) {
        y_test(static_cast<Eigen::Index>(k)) =
            label_of(labels[static_cast<std::size_t>(test_rows[k])], c) ? 1.0
                                                                        : 0.0;
        result.oof[static_cast<std::size_t>(test_rows[k])]
            .p[static_cast<int>(c)] = p(static_cast<Eigen::Index>(k));
      }
      FoldMetrics row;
      row.classifier = c;
      row.fold = fold;
      try {
        row.auc = auc(p, y_test);
      } catch (const UndefinedMetricError&) {
        row.auc.reset();
      }
      row.brier = brier(p, y_test);
      row.confusion = confusion_at(p, y_test, options.threshold);
      row.f1 = f1(row.confusion);
      result.report.rows.push_back(row);
      fm.models[static_cast<int>(c)] = std::move(model);
    }
    result.folds.push_back(std::move(fm));
  }
  std::stable_sort(result.report.rows.begin(), result.report.rows.end(),
                   [](const FoldMetrics& a, const FoldMetrics& b) {
                     return static_cast<int>(a.classifier) <
                            static_cast<int>(b.classifier);
                   });
  return result;
}

void write_metrics_csv(const std::filesystem::path& path,
                       const MetricReport& report) {
  csv::Writer w(path);
  w.row("classifier", "fold", "auc", "brier", "f1", "tp", "fp", "fn", "tn");
  for (const FoldMetrics& r : report.rows) {
    w.row(to_string(r.classifier), r.fold, r.auc, r.brier, r.f1, r.confusion.tp,
          r.confusion.fp, r.confusion.fn, r.confusion.tn);
  }
}

void write_metrics_summary_csv(const std::filesystem::path& path,
                               const MetricReport& report) {
  csv::Writer w(path);
  w.row("classifier", "auc_mean", "auc_std", "brier_mean", "brier_std",
        "f1_mean", "f1_std");
  std::set<Classifier> present;
  for (const FoldMetrics& r : report.rows) present.insert(r.classifier);
  for (Classifier c : kClassifiers) {
    if (present.count(c) == 0) continue;
    const MetricSummary s = report.summary(c);
    w.row(to_string(c), s.auc_mean, s.auc_std, s.brier_mean, s.brier_std,
          s.f1_mean, s.f1_std);
  }
}

void write_oof_csv(const std::filesystem::path& path,
                   const std::vector<OofPrediction>& oof) {
  csv::Writer w(path);
  w.row("match_id", "event_id", "p_recovery", "p_attacked", "p_scores",
        "p_concedes");
  for (const OofPrediction& o : oof) {
    w.row(o.match_id, o.event_id, o.p[0], o.p[1], o.p[2], o.p[3]);
  }
}

}  // namespace vdep::eval
