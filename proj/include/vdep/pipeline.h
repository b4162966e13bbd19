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

// End-to-end stages behind the command-line tool. Each stage reads and writes
// plain files and leaves a run_manifest.txt in its output directory.

#ifndef VDEP_PIPELINE_H_
#define VDEP_PIPELINE_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vdep/analysis.h"
#include "vdep/config.h"
#include "vdep/domain.h"
#include "vdep/evaluation.h"
#include "vdep/gbdt.h"
#include "vdep/ingestion.h"
#include "vdep/labeling.h"
#include "vdep/synthgen.h"
#include "vdep/treeshap.h"
#include "vdep/valuation.h"

namespace vdep::pipeline {

using Log = std::function<void(std::string_view)>;

// 64-bit FNV-1a, printed as 16 hex digits.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t value);
std::string file_hash(const std::filesystem::path& path);

// Ordered key=value record. Output hashes are listed after the settings so
// identical inputs give identical lines apart from the timing entries.
class RunManifest {
 public:
  explicit RunManifest(std::string command);
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, double value);
  void add_config(const KeyValueConfig& config);
  void add_output(const std::filesystem::path& dir, const std::string& name);
  void write(const std::filesystem::path& dir) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

synth::Generated run_synth(const synth::GenConfig& cfg,
                           const std::filesystem::path& out,
                           const Log& log = {});

Corpus run_ingest(const CorpusFiles& files, const std::filesystem::path& out,
                  const Log& log = {});

struct TrainOptions {
  std::filesystem::path corpus;
  std::filesystem::path out;
  LabelConfig labels;
  gbdt::TrainConfig train;
  double threshold = eval::kDefaultThreshold;

  // Keys: rounds, max_depth, learning_rate, min_child_weight, reg_lambda,
  // gamma, base_score, seed, k_vdep, k_vaep, threshold.
  static TrainOptions from_config(const KeyValueConfig& config);
  KeyValueConfig to_config() const;
};

// Writes models/ (one file per fold and classifier, fold_plan.csv and
// fold_constants.csv) plus metrics.csv, metrics_summary.csv and
// oof_probs.csv.
eval::CrossValidationResult run_train(const TrainOptions& options,
                                      const Log& log = {});

// The four classifiers of one fold and the trade-off constant estimated from
// that fold's training labels.
struct FoldModelSet {
  int fold = 0;
  double c = 0.0;
  std::array<gbdt::TreeEnsemble, eval::kNumClassifiers> models;
};

struct ModelBundle {
  std::vector<FoldModelSet> folds;
  std::map<int, int> fold_of_match;
};

// `models_dir` may also be the train output directory that contains it.
ModelBundle load_model_bundle(const std::filesystem::path& models_dir);

// Feature build plus prediction for every event of `match`. Matches outside
// the fold plan use the mean over all folds.
std::vector<valuation::ValuedEvent> value_match(
    const MatchRecord& match, const std::map<int, Team>& teams,
    const ModelBundle& bundle);

struct ValueOptions {
  std::filesystem::path corpus;
  std::filesystem::path models;
  std::filesystem::path out;
};

struct ValueResult {
  std::vector<valuation::ValuedEvent> events;
  std::vector<valuation::TeamMatchValue> team_match;
  valuation::SeasonTable season;
  double max_seconds_per_match = 0.0;
  double mean_seconds_per_match = 0.0;
};

// Writes valued_events.csv, team_match.csv, team_season.csv and teams.csv.
ValueResult run_value(const ValueOptions& options, const Log& log = {});

struct ExplainOptions {
  std::filesystem::path model;
  std::filesystem::path corpus;
  std::filesystem::path out;
  eval::Classifier classifier = eval::Classifier::kRecovery;
  int max_events = 5000;  // evenly strided sample; 0 keeps every event
  int top_k = 20;
};

// Writes shap_summary.csv and shap_points.csv.
shap::ShapReport run_explain(const ExplainOptions& options,
                             const Log& log = {});

struct ReportOptions {
  std::filesystem::path values;
  std::filesystem::path outcomes;  // matches.csv layout
  std::filesystem::path out;
};

// Writes correlations.csv (both levels) and season_scatter.csv. Undefined
// correlations become rows with an empty r and are reported through `log`.
std::vector<analysis::CorrelationRow> run_report(const ReportOptions& options,
                                                 const Log& log = {});

}  // namespace vdep::pipeline

#endif  // VDEP_PIPELINE_H_
