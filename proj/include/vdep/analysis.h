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

// Correlation of team valuations with match outcomes.

#ifndef VDEP_ANALYSIS_H_
#define VDEP_ANALYSIS_H_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "vdep/domain.h"
#include "vdep/error.h"
#include "vdep/valuation.h"

namespace vdep::analysis {

// 3 for a win, 1 for a draw, 0 for a loss.
int winning_points(int goals_for, int goals_against);

// Product-moment correlation. Throws UndefinedMetricError for fewer than 3
// points or zero variance in either series.
template <typename X, typename Y>
double pearson_r(const Eigen::DenseBase<X>& x, const Eigen::DenseBase<Y>& y) {
  if (x.size() != y.size()) throw DimensionError("pearson_r: size mismatch");
  if (x.size() < 3) throw UndefinedMetricError("pearson_r needs >= 3 points");
  const Eigen::ArrayXd a = x.derived().template cast<double>().array();
  const Eigen::ArrayXd b = y.derived().template cast<double>().array();
  const Eigen::ArrayXd da = a - a.mean();
  const Eigen::ArrayXd db = b - b.mean();
  const double saa = (da * da).sum();
  const double sbb = (db * db).sum();
  if (!(saa > 0.0) || !(sbb > 0.0)) {
    throw UndefinedMetricError("pearson_r: zero variance");
  }
  const double r = (da * db).sum() / std::sqrt(saa * sbb);
  return std::clamp(r, -1.0, 1.0);
}

// Effect-size band of |r| rounded to three decimals; bands are right-open.
std::string_view guilford_band(double r);

struct TeamOutcome {
  int team_id = 0;
  int match_id = 0;
  int goals_for = 0;
  int goals_against = 0;
  int points() const { return winning_points(goals_for, goals_against); }
};

// Two rows per match (home, away).
std::vector<TeamOutcome> outcomes_from_matches(
    std::span<const MatchRecord> matches);

enum class Level { kMatch, kSeason };
std::string_view to_string(Level level);

struct CorrelationRow {
  Level level = Level::kMatch;
  std::string index;    // r_vdep, s_vaep, r_recoveries, r_attacked
  std::string outcome;  // points, goals_for, goals_against
  std::optional<double> r;
  std::string band;     // "undefined" when r is missing
  long n = 0;
};

// Every (index, outcome) pair at `level`. Season level averages indices and
// sums outcomes per team. With `strict`, undefined correlations throw;
// otherwise they produce rows with an empty r.
std::vector<CorrelationRow> correlation_report(
    std::span<const valuation::TeamMatchValue> values,
    std::span<const TeamOutcome> outcomes, Level level, bool strict = true);

// correlations.csv: level,index,outcome,r,band,n.
void write_correlations_csv(const std::filesystem::path& path,
                            std::span<const CorrelationRow> rows);

// season_scatter.csv: team_id,name,r_recoveries,r_attacked,r_vdep,quadrant
// plus a league row.
void write_season_scatter_csv(const std::filesystem::path& path,
                              const valuation::SeasonTable& table);

}  // namespace vdep::analysis

#endif  // VDEP_ANALYSIS_H_
