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

// Seeded synthetic league. Event flags come from a possession process whose
// rates are calibrated to the configured label frequencies; event geometry is
// then sampled conditioned on the resulting labels so that nearest-defender
// distance predicts recovery and attacker position predicts being attacked.

#ifndef VDEP_SYNTHGEN_H_
#define VDEP_SYNTHGEN_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "vdep/config.h"
#include "vdep/domain.h"

namespace vdep::synth {

struct GenConfig {
  std::uint64_t seed = 20200101;
  int n_teams = 18;
  int n_weeks = 5;
  int matches_per_week = 9;
  int events_per_match = 2163;

  // Target positive-label rates over the corpus.
  double recovery_rate = 0.363;
  double attacked_rate = 0.137;
  double scores_rate = 0.0077;
  double concedes_rate = 0.0023;

  // 0 removes the corresponding dependency entirely.
  double recovery_signal = 0.5;  // nearest-defender distance -> recovery
  double attack_signal = 0.4;    // attacker x and displacement -> attacked
  double team_signal = 0.5;      // spread of team strengths

  int k_vdep = 5;
  int k_vaep = 10;

  // Throws SchemaError on out-of-range values.
  void validate() const;

  // Unknown keys are rejected.
  static GenConfig from_config(const KeyValueConfig& cfg);
  KeyValueConfig to_config() const;
};

// Possession process parameters found by calibration.
struct ProcessParams {
  double recovery_share = 0.5;  // possession endings that are recoveries
  double attack_prob = 0.1;     // per-event effective-attack probability
  double goal_prob = 0.005;     // possessions that end in a goal
  double goal_min_length = 6;   // minimum length of a scoring possession
};

struct LabelRates {
  double recovery = 0.0;
  double attacked = 0.0;
  double scores = 0.0;
  double concedes = 0.0;
};

struct Generated {
  Corpus corpus;
  std::map<int, LabelSet> truth;  // by match_id, aligned with events
  ProcessParams params;
  LabelRates rates;
};

Generated generate(const GenConfig& cfg);

// Corpus files plus truth_labels.csv
// (match_id,event_id,recovery,attacked,scores,concedes).
void write_generated(const std::filesystem::path& dir, const Generated& gen);

}  // namespace vdep::synth

#endif  // VDEP_SYNTHGEN_H_
