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

#include "vdep/analysis.h"

#include <array>
#include <map>
#include <set>
#include <utility>

#include "vdep/csv.h"

namespace vdep::analysis {

int winning_points(int goals_for, int goals_against) {
  if (goals_for < 0 || goals_against < 0) {
    throw Error("goal counts must be non-negative");
  }
  if (goals_for > goals_against) return 3;
  if (goals_for == goals_against) return 1;
  return 0;
}

std::string_view guilford_band(double r) {
  const double a = std::round(std::abs(r) * 1000.0) / 1000.0;
  if (a < 0.20) return "slight/negligible";
  if (a < 0.40) return "low";
  if (a < 0.70) return "moderate";
  if (a < 0.90) return "high";
  return "very high";
}

std::vector<TeamOutcome> outcomes_from_matches(
    std::span<const MatchRecord> matches) {
  std::vector<TeamOutcome> out;
  for (const MatchRecord& m : matches) {
    out.push_back({m.home_team_id, m.match_id, m.home_goals, m.away_goals});
    out.push_back({m.away_team_id, m.match_id, m.away_goals, m.home_goals});
  }
  return out;
}

std::string_view to_string(Level level) {
  return level == Level::kMatch ? "match" : "season";
}

namespace {

constexpr std::array<std::string_view, 4> kIndices = {"r_vdep", "s_vaep",
                                                      "r_recoveries",
                                                      "r_attacked"};
constexpr std::array<std::string_view, 3> kOutcomes = {"points", "goals_for",
                                                       "goals_against"};

double index_value(const valuation::TeamMatchValue& v, std::string_view name) {
  if (name == "r_vdep") return v.r_vdep;
  if (name == "s_vaep") return v.s_vaep;
  if (name == "r_recoveries") return v.r_recoveries;
  return v.r_attacked;
}

double outcome_value(const TeamOutcome& o, std::string_view name) {
  if (name == "points") return o.points();
  if (name == "goals_for") return o.goals_for;
  return o.goals_against;
}

}  // namespace

std::vector<CorrelationRow> correlation_report(
    std::span<const valuation::TeamMatchValue> values,
    std::span<const TeamOutcome> outcomes, Level level, bool strict) {
  std::map<std::pair<int, int>, const TeamOutcome*> by_key;
  for (const TeamOutcome& o : outcomes) by_key[{o.team_id, o.match_id}] = &o;

  std::set<int> teams;
  for (const auto& v : values) teams.insert(v.team_id);
  if (teams.size() < 3) {
    throw Error("correlation report needs at least 3 teams, got " +
                std::to_string(teams.size()));
  }

  // Rows of (index values..., outcome values...) at the requested level.
  std::vector<std::array<double, 4>> idx_rows;
  std::vector<std::array<double, 3>> out_rows;
  if (level == Level::kMatch) {
    for (const auto& v : values) {
      const auto it = by_key.find({v.team_id, v.match_id});
      if (it == by_key.end()) {
        throw SchemaError("no outcome for team " + std::to_string(v.team_id) +
                          " in match " + std::to_string(v.match_id));
      }
      std::array<double, 4> iv{};
      std::array<double, 3> ov{};
      for (std::size_t k = 0; k < kIndices.size(); ++k) {
        iv[k] = index_value(v, kIndices[k]);
      }
      for (std::size_t k = 0; k < kOutcomes.size(); ++k) {
        ov[k] = outcome_value(*it->second, kOutcomes[k]);
      }
      idx_rows.push_back(iv);
      out_rows.push_back(ov);
    }
  } else {
    std::map<int, std::pair<std::array<double, 4>, long>> idx_acc;
    std::map<int, std::array<double, 3>> out_acc;
    for (const auto& v : values) {
      const auto it = by_key.find({v.team_id, v.match_id});
      if (it == by_key.end()) {
        throw SchemaError("no outcome for team " + std::to_string(v.team_id) +
                          " in match " + std::to_string(v.match_id));
      }
      auto& [sum, count] = idx_acc[v.team_id];
      for (std::size_t k = 0; k < kIndices.size(); ++k) {
        sum[k] += index_value(v, kIndices[k]);
      }
      ++count;
      auto& o = out_acc[v.team_id];
      for (std::size_t k = 0; k < kOutcomes.size(); ++k) {
        o[k] += outcome_value(*it->second, kOutcomes[k]);
      }
    }
    for (const auto& [team, acc] : idx_acc) {
      std::array<double, 4> mean = acc.first;
      for (double& x : mean) x /= static_cast<double>(acc.second);
      idx_rows.push_back(mean);
      out_rows.push_back(out_acc[team]);
    }
  }

  const Eigen::Index n = static_cast<Eigen::Index>(idx_rows.size());
  std::vector<CorrelationRow> rows;
  for (std::size_t i = 0; i < kIndices.size(); ++i) {
    Eigen::VectorXd x(n);
    for (Eigen::Index r = 0; r < n; ++r) x(r) = idx_rows[r][i];
    for (std::size_t o = 0; o < kOutcomes.size(); ++o) {
      Eigen::VectorXd y(n);
      for (Eigen::Index r = 0; r < n; ++r) y(r) = out_rows[r][o];
      CorrelationRow row;
      row.level = level;
      row.index = kIndices[i];
      row.outcome = kOutcomes[o];
      row.n = n;
      try {
        row.r = pearson_r(x, y);
        row.band = guilford_band(*row.r);
      } catch (const UndefinedMetricError&) {
        if (strict) throw;
        row.band = "undefined";
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_correlations_csv(const std::filesystem::path& path,
                            std::span<const CorrelationRow> rows) {
  csv::Writer w(path);
  w.row("level", "index", "outcome", "r", "band", "n");
  for (const CorrelationRow& r : rows) {
    w.row(to_string(r.level), r.index, r.outcome, r.r, r.band, r.n);
  }
}

void write_season_scatter_csv(const std::filesystem::path& path,
                              const valuation::SeasonTable& table) {
  csv::Writer w(path);
  w.row("team_id", "name", "r_recoveries", "r_attacked", "r_vdep", "quadrant");
  for (const auto& t : table.teams) {
    w.row(t.team_id, t.name, t.r_recoveries, t.r_attacked, t.r_vdep,
          valuation::quadrant(t, table.league));
  }
  w.row("league", "league", table.league.r_recoveries,
        table.league.r_attacked, table.league.r_vdep, "");
}

}  // namespace vdep::analysis
