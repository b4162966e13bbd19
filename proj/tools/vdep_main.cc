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

// vdep: synth, ingest, train, value, explain and report stages.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vdep/config.h"
#include "vdep/csv.h"
#include "vdep/pipeline.h"

namespace {

namespace fs = std::filesystem;
namespace pl = vdep::pipeline;

struct Common {
  std::string config_file;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;

  vdep::KeyValueConfig load() const {
    vdep::KeyValueConfig cfg;
    if (!config_file.empty()) {
      if (!fs::is_regular_file(config_file)) {
        throw vdep::Error("missing file: " + config_file);
      }
      cfg = vdep::KeyValueConfig::from_file(config_file);
    }
    cfg.apply_overrides(sets);
    if (seed) cfg.set("seed", std::to_string(*seed));
    return cfg;
  }
};

void log_line(std::string_view text) { std::cerr << text << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Team defense valuation from event and tracking data"};
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  app.add_option("--config", common.config_file, "key=value config file");
  app.add_option("--set", common.sets, "override, key=value (repeatable)");
  app.add_option("--seed", common.seed, "seed for all randomness");

  std::string out;

  CLI::App* synth = app.add_subcommand("synth", "write a synthetic corpus");
  synth->add_option("--out", out, "output directory")->required();

  vdep::CorpusFiles files;
  CLI::App* ingest = app.add_subcommand("ingest", "validate and normalize a corpus");
  ingest->add_option("--events", files.events, "events.jsonl")->required();
  ingest->add_option("--tracking", files.tracking, "tracking.csv")->required();
  ingest->add_option("--teams", files.teams, "teams.csv")->required();
  ingest->add_option("--matches", files.matches,
                     "matches.csv (default: next to --teams)");
  ingest->add_option("--out", out, "output directory")->required();

  std::string corpus;
  std::optional<int> k_vdep, k_vaep, rounds;
  std::optional<double> threshold;
  CLI::App* train = app.add_subcommand("train", "five-fold cross-validation");
  train->add_option("--corpus", corpus, "corpus directory")->required();
  train->add_option("--out", out, "output directory")->required();
  train->add_option("--k-vdep", k_vdep, "recovery/attacked window (default 5)");
  train->add_option("--k-vaep", k_vaep, "scores/concedes window (default 10)");
  train->add_option("--rounds", rounds, "boosting rounds (default 100)");
  train->add_option("--threshold", threshold, "F1 decision threshold (default 0.5)");

  std::string models;
  CLI::App* value = app.add_subcommand("value", "value every game state");
  value->add_option("--corpus", corpus, "corpus directory")->required();
  value->add_option("--models", models, "models directory from train")->required();
  value->add_option("--out", out, "output directory")->required();

  pl::ExplainOptions ex;
  std::string classifier = "recovery";
  CLI::App* explain = app.add_subcommand("explain", "SHAP summary of a model");
  explain->add_option("--model", ex.model, "model file")->required();
  explain->add_option("--corpus", ex.corpus, "corpus directory")->required();
  explain->add_option("--classifier", classifier, "recovery|attacked")
      ->check(CLI::IsMember({"recovery", "attacked"}));
  explain->add_option("--out", ex.out, "output directory")->required();
  explain->add_option("--max-events", ex.max_events,
                      "events sampled for attribution (0 = all)");
  explain->add_option("--top-k", ex.top_k, "features kept in the summary");

  pl::ReportOptions rep;
  CLI::App* report = app.add_subcommand("report", "correlations with outcomes");
  report->add_option("--values", rep.values, "directory from value")->required();
  report->add_option("--outcomes", rep.outcomes, "matches.csv")->required();
  report->add_option("--out", rep.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const vdep::KeyValueConfig cfg = common.load();
    if (synth->parsed()) {
      pl::run_synth(vdep::synth::GenConfig::from_config(cfg), out, log_line);
    } else if (ingest->parsed()) {
      if (files.matches.empty()) files.matches = files.teams.parent_path() / "matches.csv";
      pl::run_ingest(files, out, log_line);
    } else if (train->parsed()) {
      vdep::KeyValueConfig c = cfg;
      if (k_vdep) c.set("k_vdep", std::to_string(*k_vdep));
      if (k_vaep) c.set("k_vaep", std::to_string(*k_vaep));
      if (rounds) c.set("rounds", std::to_string(*rounds));
      if (threshold) c.set("threshold", vdep::csv::format_double(*threshold));
      pl::TrainOptions o = pl::TrainOptions::from_config(c);
      o.corpus = corpus;
      o.out = out;
      pl::run_train(o, log_line);
    } else if (value->parsed()) {
      pl::run_value({corpus, models, out}, log_line);
    } else if (explain->parsed()) {
      ex.classifier = vdep::eval::parse_classifier(classifier);
      pl::run_explain(ex, log_line);
    } else if (report->parsed()) {
      pl::run_report(rep, log_line);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
