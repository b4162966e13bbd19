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

// Defensive valuation of game states and its team-level aggregates, plus the
// goal-probability baseline valued as probability changes between states.

#ifndef VDEP_VALUATION_H_
#define VDEP_VALUATION_H_

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vdep/domain.h"

namespace vdep::valuation {

struct EventProbabilities {
  double recoveries = 0.0;
  double attacked = 0.0;
  double scores = 0.0;
  double concedes = 0.0;
};

struct ValuedEvent {
  int match_id = 0;
  int event_id = 0;
  int acting_team = 0;
  int defending_team = 0;
  EventProbabilities p;
  double c = 0.0;
  double v_vdep = 0.0;  // for the defending team
  double v_vaep = 0.0;  // for the acting team
};

// Ratio of recovery to being-attacked positives. Throws
// UndefinedMetricError when either count is not positive.
double estimate_c(long recovery_positives, long attacked_positives);
double estimate_c(const LabelSet& training_labels);

inline double vdep_value(double p_recoveries, double p_attacked, double c) {
  return p_recoveries - c * p_attacked;
}

// `probs` is parallel to `events` (one match, stream order). The baseline
// value is the change in the acting team's scoring minus conceding
// probability since the previous state; the first event of each period
// starts from zero.
std::vector<ValuedEvent> value_events(const MatchRecord& match,
                                      std::span<const EventProbabilities> probs,
                                      double c);

struct TeamMatchValue {
  int team_id = 0;
  int match_id = 0;
  long m = 0;  // defending events
  double c = 0.0;
  double r_vdep = 0.0;
  double r_recoveries = 0.0;
  double r_attacked = 0.0;
  double s_vaep = 0.0;
  double s_scores = 0.0;
  double s_concedes = 0.0;
};

// r_* average the events where `team_id` defends; s_* sum over the events it
// acts in. Throws Error when the team has no defending events.
TeamMatchValue aggregate_team_match(std::span<const ValuedEvent> events,
                                    int team_id, int match_id);

struct TeamSeasonValue {
  int team_id = 0;
  std::string name;
  long n_matches = 0;
  double r_recoveries = 0.0;
  double r_attacked = 0.0;
  double r_vdep = 0.0;
  double s_vaep = 0.0;
};

struct SeasonTable {
  std::vector<TeamSeasonValue> teams;  // ascending team_id
  TeamSeasonValue league;              // mean over teams
};

SeasonTable aggregate_team_season(std::span<const TeamMatchValue> matches,
                                  const std::map<int, Team>& teams = {});

// Scatter quadrant relative to the league means: recovery above the mean is
// "high-return", attacked above the mean is "high-risk".
std::string quadrant(const TeamSeasonValue& team, const TeamSeasonValue& league);

void write_valued_events_csv(const std::filesystem::path& path,
                             std::span<const ValuedEvent> events);
void write_team_match_csv(const std::filesystem::path& path,
                          std::span<const TeamMatchValue> rows);
std::vector<TeamMatchValue> read_team_match_csv(
    const std::filesystem::path& path);
// Footer row carries the league means with team_id "league".
void write_team_season_csv(const std::filesystem::path& path,
                           const SeasonTable& table);

}  // namespace vdep::valuation

#endif  // VDEP_VALUATION_H_
