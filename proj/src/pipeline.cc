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

#include "vdep/pipeline.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vdep/csv.h"
#include "vdep/error.h"
#include "vdep/features.h"

namespace vdep::pipeline {
namespace fs = std::filesystem;

namespace {

class Stopwatch {
 public:
  double seconds() const {
    const std::chrono::duration<double> d =
        std::chrono::steady_clock::now() - start_;
    return d.count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void say(const Log& log, const std::string& text) {
  if (log) log(text);
}

void require_file(const fs::path& path) {
  if (!fs::is_regular_file(path)) {
    throw Error("missing file: " + path.string());
  }
}

void require_dir(const fs::path& path) {
  if (!fs::is_directory(path)) {
    throw Error("missing directory: " + path.string());
  }
}

std::string model_file_name(int fold, eval::Classifier c) {
  return "fold" + std::to_string(fold) + "_" + std::string(eval::to_string(c)) +
         ".model";
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(value));
  return buf;
}

std::string file_hash(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return hex64(fnv1a(ss.str()));
}

RunManifest::RunManifest(std::string command) {
  entries_.emplace_back("command", std::move(command));
}

void RunManifest::add(const std::string& key, const std::string& value) {
  entries_.emplace_back(key, value);
}

void RunManifest::add(const std::string& key, double value) {
  entries_.emplace_back(key, csv::format_double(value));
}

void RunManifest::add_config(const KeyValueConfig& config) {
  for (const auto& [k, v] : config.entries()) entries_.emplace_back("config." + k, v);
}

void RunManifest::add_output(const fs::path& dir, const std::string& name) {
  entries_.emplace_back("hash." + name, file_hash(dir / name));
}

void RunManifest::write(const fs::path& dir) const {
  std::ofstream out(dir / "run_manifest.txt", std::ios::binary);
  if (!out) throw Error("cannot write " + (dir / "run_manifest.txt").string());
  for (const auto& [k, v] : entries_) out << k << '=' << v << '\n';
}

// ---------------------------------------------------------------- synth

synth::Generated run_synth(const synth::GenConfig& cfg, const fs::path& out,
                           const Log& log) {
  Stopwatch sw;
  cfg.validate();
  synth::Generated gen = synth::generate(cfg);
  fs::create_directories(out);
  synth::write_generated(out, gen);
  say(log, "synth: " + std::to_string(gen.corpus.matches.size()) +
               " matches written to " + out.string());

  RunManifest m("synth");
  m.add_config(cfg.to_config());
  m.add("seed", std::to_string(cfg.seed));
  m.add("process.recovery_share", gen.params.recovery_share);
  m.add("process.attack_prob", gen.params.attack_prob);
  m.add("process.goal_prob", gen.params.goal_prob);
  m.add("process.goal_min_length", gen.params.goal_min_length);
  m.add("rate.recovery", gen.rates.recovery);
  m.add("rate.attacked", gen.rates.attacked);
  m.add("rate.scores", gen.rates.scores);
  m.add("rate.concedes", gen.rates.concedes);
  for (const char* f : {"events.jsonl", "tracking.csv", "teams.csv",
                        "matches.csv", "truth_labels.csv"}) {
    m.add_output(out, f);
  }
  m.add("time.total_s", sw.seconds());
  m.write(out);
  return gen;
}

// ---------------------------------------------------------------- ingest

Corpus run_ingest(const CorpusFiles& files, const fs::path& out,
                  const Log& log) {
  Stopwatch sw;
  require_file(files.events);
  require_file(files.tracking);
  require_file(files.teams);
  require_file(files.matches);
  Corpus corpus = load_corpus(files);
  fs::create_directories(out);
  write_corpus(out, corpus);
  long n_events = 0;
  for (const MatchRecord& mr : corpus.matches) {
    n_events += static_cast<long>(mr.events.size());
  }
  say(log, "ingest: " + std::to_string(corpus.matches.size()) + " matches, " +
               std::to_string(n_events) + " events");

  RunManifest m("ingest");
  m.add("input.events", files.events.string());
  m.add("input.tracking", files.tracking.string());
  m.add("input.teams", files.teams.string());
  m.add("input.matches", files.matches.string());
  m.add("matches", std::to_string(corpus.matches.size()));
  m.add("events", std::to_string(n_events));
  for (const char* f :
       {"events.jsonl", "tracking.csv", "teams.csv", "matches.csv"}) {
    m.add_output(out, f);
  }
  m.add("time.total_s", sw.seconds());
  m.write(out);
  return corpus;
}

// ---------------------------------------------------------------- train

TrainOptions TrainOptions::from_config(const KeyValueConfig& config) {
  config.require_known({"rounds", "max_depth", "learning_rate",
                        "min_child_weight", "reg_lambda", "gamma",
                        "base_score", "seed", "k_vdep", "k_vaep",
                        "threshold"});
  TrainOptions o;
  gbdt::TrainConfig& t = o.train;
  t.rounds = config.get_int("rounds", t.rounds);
  t.max_depth = config.get_int("max_depth", t.max_depth);
  t.learning_rate = config.get_double("learning_rate", t.learning_rate);
  t.min_child_weight = config.get_double("min_child_weight", t.min_child_weight);
  t.reg_lambda = config.get_double("reg_lambda", t.reg_lambda);
  t.gamma = config.get_double("gamma", t.gamma);
  t.base_score = config.get_double("base_score", t.base_score);
  t.seed = config.get_uint64("seed", t.seed);
  t.validate();
  o.labels.k_vdep = config.get_int("k_vdep", o.labels.k_vdep);
  o.labels.k_vaep = config.get_int("k_vaep", o.labels.k_vaep);
  if (o.labels.k_vdep < 1 || o.labels.k_vaep < 1) {
    throw SchemaError("k_vdep and k_vaep must be at least 1");
  }
  o.threshold = config.get_double("threshold", o.threshold);
  if (!(o.threshold > 0.0 && o.threshold < 1.0)) {
    throw SchemaError("threshold must lie in (0, 1)");
  }
  return o;
}

KeyValueConfig TrainOptions::to_config() const {
  KeyValueConfig c;
  c.set("rounds", std::to_string(train.rounds));
  c.set("max_depth", std::to_string(train.max_depth));
  c.set("learning_rate", csv::format_double(train.learning_rate));
  c.set("min_child_weight", csv::format_double(train.min_child_weight));
  c.set("reg_lambda", csv::format_double(train.reg_lambda));
  c.set("gamma", csv::format_double(train.gamma));
  c.set("base_score", csv::format_double(train.base_score));
  c.set("seed", std::to_string(train.seed));
  c.set("k_vdep", std::to_string(labels.k_vdep));
  c.set("k_vaep", std::to_string(labels.k_vaep));
  c.set("threshold", csv::format_double(threshold));
  return c;
}

eval::CrossValidationResult run_train(const TrainOptions& options,
                                      const Log& log) {
  Stopwatch sw;
  require_dir(options.corpus);
  const Corpus corpus = load_corpus(CorpusFiles::in_directory(options.corpus));
  const double t_load = sw.seconds();

  eval::CrossValidationOptions cv;
  cv.labels = options.labels;
  cv.train = options.train;
  cv.threshold = options.threshold;
  cv.on_model = [&log](int fold, eval::Classifier c, double s) {
    say(log, "train: fold " + std::to_string(fold) + " " +
                 std::string(eval::to_string(c)) + " " +
                 csv::format_double(s, 3) + " s");
  };
  // The fold plan is checked before any feature work.
  (void)eval::make_fold_plan(corpus);
  const FeatureMatrix x = build_corpus_features(corpus);
  const double t_features = sw.seconds() - t_load;
  eval::CrossValidationResult result = eval::cross_validate(corpus, cv, &x);
  const double t_cv = sw.seconds() - t_load - t_features;

  const fs::path models = options.out / "models";
  fs::create_directories(models);
  RunManifest m("train");
  m.add("input.corpus", options.corpus.string());
  m.add_config(options.to_config());
  m.add("seed", std::to_string(options.train.seed));
  m.add("fold_grouping", result.plan.grouping);
  m.add("folds", std::to_string(result.plan.num_folds));

  {
    csv::Writer w(models / "fold_plan.csv");
    w.row("match_id", "fold");
    for (std::size_t i = 0; i < corpus.matches.size(); ++i) {
      w.row(corpus.matches[i].match_id, result.plan.fold_of_match[i]);
    }
  }
  {
    csv::Writer w(models / "fold_constants.csv");
    w.row("fold", "c_labels", "c_events", "train_events", "recovery_labels",
          "attacked_labels", "recovery_events", "attack_events");
    for (const eval::FoldModels& fm : result.folds) {
      const eval::FoldCounts& k = fm.counts;
      std::optional<double> c_labels, c_events;
      if (k.recovery_labels > 0 && k.attacked_labels > 0) {
        c_labels = valuation::estimate_c(k.recovery_labels, k.attacked_labels);
      }
      if (k.recovery_events > 0 && k.attack_events > 0) {
        c_events = valuation::estimate_c(k.recovery_events, k.attack_events);
      }
      w.row(fm.fold, c_labels, c_events, k.train_events, k.recovery_labels,
            k.attacked_labels, k.recovery_events, k.attack_events);
    }
  }
  m.add_output(models, "fold_plan.csv");
  m.add_output(models, "fold_constants.csv");
  for (const eval::FoldModels& fm : result.folds) {
    for (eval::Classifier c : eval::kClassifiers) {
      const std::string name = model_file_name(fm.fold, c);
      gbdt::save_model(models / name, fm.models[static_cast<int>(c)]);
      m.add("hash.models/" + name, file_hash(models / name));
    }
  }

  eval::write_metrics_csv(options.out / "metrics.csv", result.report);
  eval::write_metrics_summary_csv(options.out / "metrics_summary.csv",
                                  result.report);
  eval::write_oof_csv(options.out / "oof_probs.csv", result.oof);
  for (const char* f : {"metrics.csv", "metrics_summary.csv", "oof_probs.csv"}) {
    m.add_output(options.out, f);
  }
  for (eval::Classifier c : eval::kClassifiers) {
    const eval::MetricSummary s = result.report.summary(c);
    say(log, "train: " + std::string(eval::to_string(c)) +
                 " f1=" + csv::format_double(s.f1_mean, 4) + " auc=" +
                 (s.auc_mean ? csv::format_double(*s.auc_mean, 4) : "NA"));
  }
  m.add("time.load_s", t_load);
  m.add("time.features_s", t_features);
  m.add("time.cross_validation_s", t_cv);
  m.add("time.total_s", sw.seconds());
  m.write(options.out);
  return result;
}

// ---------------------------------------------------------------- value

namespace {

// The train output directory or its models/ subdirectory.
fs::path resolve_models_dir(const fs::path& dir) {
  return !fs::is_regular_file(dir / "fold_plan.csv") &&
                 fs::is_regular_file(dir / "models" / "fold_plan.csv")
             ? dir / "models"
             : dir;
}

}  // namespace

ModelBundle load_model_bundle(const fs::path& dir) {
  const fs::path models_dir = resolve_models_dir(dir);
  require_dir(models_dir);
  require_file(models_dir / "fold_plan.csv");
  require_file(models_dir / "fold_constants.csv");
  ModelBundle bundle;
  {
    csv::Reader r(models_dir / "fold_plan.csv");
    const std::size_t cm = r.column("match_id");
    const std::size_t cf = r.column("fold");
    std::vector<std::string_view> f;
    while (r.next(f)) {
      const std::size_t ln = r.line_number();
      if (f.size() != r.header().size()) throw ParseError("wrong column count", ln);
      bundle.fold_of_match[csv::parse_int(f[cm], ln)] = csv::parse_int(f[cf], ln);
    }
  }
  csv::Reader r(models_dir / "fold_constants.csv");
  const std::size_t cf = r.column("fold");
  const std::size_t cc = r.column("c_labels");
  std::vector<std::string_view> f;
  while (r.next(f)) {
    const std::size_t ln = r.line_number();
    if (f.size() != r.header().size()) throw ParseError("wrong column count", ln);
    FoldModelSet set;
    set.fold = csv::parse_int(f[cf], ln);
    if (f[cc].empty()) {
      throw UndefinedMetricError("fold " + std::to_string(set.fold) +
                                 " has no trade-off constant");
    }
    set.c = csv::parse_double(f[cc], ln);
    for (eval::Classifier c : eval::kClassifiers) {
      const fs::path p = models_dir / model_file_name(set.fold, c);
      require_file(p);
      set.models[static_cast<int>(c)] = gbdt::load_model(p);
    }
    bundle.folds.push_back(std::move(set));
  }
  if (bundle.folds.empty()) throw SchemaError("no fold models found");
  std::sort(bundle.folds.begin(), bundle.folds.end(),
            [](const FoldModelSet& a, const FoldModelSet& b) {
              return a.fold < b.fold;
            });
  return bundle;
}

std::vector<valuation::ValuedEvent> value_match(
    const MatchRecord& match, const std::map<int, Team>& teams,
    const ModelBundle& bundle) {
  if (bundle.folds.empty()) throw SchemaError("no fold models");
  const FeatureMatrix x = build_match_features(match, teams);
  const Eigen::Index n = x.rows();

  std::vector<const FoldModelSet*> sets;
  const auto it = bundle.fold_of_match.find(match.match_id);
  if (it != bundle.fold_of_match.end()) {
    for (const FoldModelSet& s : bundle.folds) {
      if (s.fold == it->second) sets.push_back(&s);
    }
    if (sets.empty()) {
      throw SchemaError("no models for fold " + std::to_string(it->second));
    }
  } else {
    for (const FoldModelSet& s : bundle.folds) sets.push_back(&s);
  }

  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, eval::kNumClassifiers);
  double c = 0.0;
  for (const FoldModelSet* s : sets) {
    for (int k = 0; k < eval::kNumClassifiers; ++k) {
      p.col(k) += s->models[static_cast<std::size_t>(k)].predict_proba(x);
    }
    c += s->c;
  }
  const double w = 1.0 / static_cast<double>(sets.size());
  p *= w;
  c *= w;

  std::vector<valuation::EventProbabilities> probs(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    probs[static_cast<std::size_t>(i)] = {p(i, 0), p(i, 1), p(i, 2), p(i, 3)};
  }
  return valuation::value_events(match, probs, c);
}

ValueResult run_value(const ValueOptions& options, const Log& log) {
  Stopwatch sw;
  require_dir(options.corpus);
  const Corpus corpus = load_corpus(CorpusFiles::in_directory(options.corpus));
  const ModelBundle bundle = load_model_bundle(options.models);
  const double t_load = sw.seconds();

  ValueResult result;
  double total = 0.0;
  for (const MatchRecord& mr : corpus.matches) {
    Stopwatch match_sw;
    std::vector<valuation::ValuedEvent> ev =
        value_match(mr, corpus.teams, bundle);
    const double s = match_sw.seconds();
    total += s;
    result.max_seconds_per_match = std::max(result.max_seconds_per_match, s);
    for (int team : {mr.home_team_id, mr.away_team_id}) {
      result.team_match.push_back(
          valuation::aggregate_team_match(ev, team, mr.match_id));
    }
    result.events.insert(result.events.end(), ev.begin(), ev.end());
  }
  if (!corpus.matches.empty()) {
    result.mean_seconds_per_match =
        total / static_cast<double>(corpus.matches.size());
  }
  result.season = valuation::aggregate_team_season(result.team_match, corpus.teams);
  say(log, "value: " + std::to_string(corpus.matches.size()) +
               " matches, max " + csv::format_double(result.max_seconds_per_match, 3) +
               " s per match");

  fs::create_directories(options.out);
  valuation::write_valued_events_csv(options.out / "valued_events.csv",
                                     result.events);
  valuation::write_team_match_csv(options.out / "team_match.csv",
                                  result.team_match);
  valuation::write_team_season_csv(options.out / "team_season.csv",
                                   result.season);
  write_teams(options.out / "teams.csv", corpus);

  RunManifest m("value");
  m.add("input.corpus", options.corpus.string());
  m.add("input.models", options.models.string());
  for (const FoldModelSet& s : bundle.folds) {
    m.add("c.fold" + std::to_string(s.fold), s.c);
    for (eval::Classifier c : eval::kClassifiers) {
      const std::string name = model_file_name(s.fold, c);
      m.add("hash.models/" + name,
            file_hash(resolve_models_dir(options.models) / name));
    }
  }
  for (const char* f :
       {"valued_events.csv", "team_match.csv", "team_season.csv", "teams.csv"}) {
    m.add_output(options.out, f);
  }
  m.add("time.load_s", t_load);
  m.add("time.inference_mean_s_per_match", result.mean_seconds_per_match);
  m.add("time.inference_max_s_per_match", result.max_seconds_per_match);
  m.add("time.total_s", sw.seconds());
  m.write(options.out);
  return result;
}

// ---------------------------------------------------------------- explain

shap::ShapReport run_explain(const ExplainOptions& options, const Log& log) {
  Stopwatch sw;
  require_file(options.model);
  require_dir(options.corpus);
  if (options.max_events < 0) throw SchemaError("max_events must be >= 0");
  const gbdt::TreeEnsemble model = gbdt::load_model(options.model);
  if (model.feature_names() != feature_names()) {
    throw ModelFormatError("model feature table does not match this build");
  }
  const Corpus corpus = load_corpus(CorpusFiles::in_directory(options.corpus));

  long total = 0;
  for (const MatchRecord& mr : corpus.matches) {
    total += static_cast<long>(mr.events.size());
  }
  if (total == 0) throw SchemaError("corpus has no events");
  const long limit = options.max_events == 0 ? total : options.max_events;
  const long stride = (total + limit - 1) / limit;

  std::vector<Eigen::Index> rows_of_match;
  FeatureMatrix values(0, kNumFeatures);
  std::vector<int> event_ids;
  {
    std::vector<Eigen::VectorXd> picked;
    long global = 0;
    for (const MatchRecord& mr : corpus.matches) {
      const long n = static_cast<long>(mr.events.size());
      const long first = (stride - global % stride) % stride;
      if (first < n) {
        const FeatureMatrix x = build_match_features(mr, corpus.teams);
        for (long i = first; i < n; i += stride) {
          picked.push_back(x.row(i).transpose());
          event_ids.push_back(mr.events[static_cast<std::size_t>(i)].event_id);
        }
      }
      global += n;
    }
    values.resize(static_cast<Eigen::Index>(picked.size()), kNumFeatures);
    for (std::size_t i = 0; i < picked.size(); ++i) {
      values.row(static_cast<Eigen::Index>(i)) = picked[i].transpose();
    }
  }

  const Eigen::MatrixXd phis = shap::shap_matrix(model, values);
  shap::ShapReport report =
      shap::summarize(phis, values, feature_names(), event_ids, options.top_k);
  fs::create_directories(options.out);
  shap::write_summary_csv(options.out / "shap_summary.csv", report, options.top_k);
  shap::write_points_csv(options.out / "shap_points.csv", report, feature_names());
  say(log, "explain: " + std::to_string(values.rows()) + " events, top feature " +
               (report.ranking.empty() ? std::string("none")
                                       : report.ranking.front().name));

  RunManifest m("explain");
  m.add("input.model", options.model.string());
  m.add("hash.input_model", file_hash(options.model));
  m.add("input.corpus", options.corpus.string());
  m.add("classifier", std::string(eval::to_string(options.classifier)));
  m.add("max_events", std::to_string(options.max_events));
  m.add("top_k", std::to_string(options.top_k));
  m.add("sampled_events", std::to_string(values.rows()));
  m.add_output(options.out, "shap_summary.csv");
  m.add_output(options.out, "shap_points.csv");
  m.add("time.total_s", sw.seconds());
  m.write(options.out);
  return report;
}

// ---------------------------------------------------------------- report

std::vector<analysis::CorrelationRow> run_report(const ReportOptions& options,
                                                 const Log& log) {
  Stopwatch sw;
  require_dir(options.values);
  require_file(options.values / "team_match.csv");
  require_file(options.outcomes);
  const std::vector<valuation::TeamMatchValue> values =
      valuation::read_team_match_csv(options.values / "team_match.csv");
  const std::vector<MatchRecord> matches = parse_matches(options.outcomes);
  const std::vector<analysis::TeamOutcome> outcomes =
      analysis::outcomes_from_matches(matches);

  std::vector<analysis::CorrelationRow> rows;
  for (analysis::Level level : {analysis::Level::kMatch, analysis::Level::kSeason}) {
    std::vector<analysis::CorrelationRow> part =
        analysis::correlation_report(values, outcomes, level, false);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  for (const analysis::CorrelationRow& r : rows) {
    if (!r.r) {
      say(log, "warning: correlation undefined for " +
                   std::string(analysis::to_string(r.level)) + " " + r.index +
                   " vs " + r.outcome + " (constant input)");
    }
  }

  std::map<int, Team> teams;
  if (fs::is_regular_file(options.values / "teams.csv")) {
    teams = parse_teams(options.values / "teams.csv");
  }
  const valuation::SeasonTable season =
      valuation::aggregate_team_season(values, teams);

  fs::create_directories(options.out);
  analysis::write_correlations_csv(options.out / "correlations.csv", rows);
  analysis::write_season_scatter_csv(options.out / "season_scatter.csv", season);

  RunManifest m("report");
  m.add("input.values", options.values.string());
  m.add("input.outcomes", options.outcomes.string());
  m.add("hash.input_team_match", file_hash(options.values / "team_match.csv"));
  m.add("hash.input_outcomes", file_hash(options.outcomes));
  m.add_output(options.out, "correlations.csv");
  m.add_output(options.out, "season_scatter.csv");
  m.add("time.total_s", sw.seconds());
  m.write(options.out);
  return rows;
}

}  // namespace vdep::pipeline
