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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <stdexcept>
#include <tuple>

#include <gtest/gtest.h>

#include "fixtures.h"
#include "vdep/analysis.h"
#include "vdep/error.h"

namespace vdep::analysis {
namespace {

TEST(Points, WinDrawLoss) {
  EXPECT_EQ(winning_points(3, 0), 3);
  EXPECT_EQ(winning_points(1, 1), 1);
  EXPECT_EQ(winning_points(0, 2), 0);
  EXPECT_EQ(winning_points(0, 0), 1);
  EXPECT_THROW(winning_points(-1, 0), Error);
}

TEST(Pearson, ExactLines) {
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(10, 0.0, 9.0);
  EXPECT_NEAR(pearson_r(x, x), 1.0, 1e-15);
  EXPECT_NEAR(pearson_r(x, Eigen::VectorXd((-2.0 * x).array() + 5.0)), -1.0, 1e-15);
}

TEST(Pearson, HandComputedFixture) {
  // x = 1..5, y = (2, 4, 5, 4, 5): sxy = 6, sxx = 10, syy = 6.
  Eigen::VectorXd x(5), y(5);
  x << 1, 2, 3, 4, 5;
  y << 2, 4, 5, 4, 5;
  EXPECT_NEAR(pearson_r(x, y), 6.0 / std::sqrt(60.0), 1e-15);
}

TEST(Pearson, SymmetryScaleAndTranslation) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int rep = 0; rep < 30; ++rep) {
    Eigen::VectorXd x(18), y(18);
    for (int i = 0; i < 18; ++i) {
      x(i) = n(rng);
      y(i) = 0.5 * x(i) + n(rng);
    }
    const double r = pearson_r(x, y);
    EXPECT_NEAR(pearson_r(y, x), r, 1e-14);
    for (double a : {3.0, 0.01, -2.5}) {
      const Eigen::VectorXd ax = (a * x).array() + 7.0;
      EXPECT_NEAR(pearson_r(ax, y), (a > 0 ? 1 : -1) * r, 1e-12);
    }
    EXPECT_LE(std::abs(r), 1.0);
  }
}

TEST(Pearson, Errors) {
  EXPECT_THROW(pearson_r(Eigen::Vector3d(1, 1, 1), Eigen::Vector3d(1, 2, 3)),
               UndefinedMetricError);
  EXPECT_THROW(pearson_r(Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(4, 4, 4)),
               UndefinedMetricError);
  EXPECT_THROW(pearson_r(Eigen::Vector2d(1, 2), Eigen::Vector2d(1, 2)), UndefinedMetricError);
  EXPECT_THROW(pearson_r(Eigen::Vector3d(1, 2, 3), Eigen::Vector2d(1, 2)), DimensionError);
}

TEST(Bands, PublishedValues) {
  EXPECT_EQ(guilford_band(0.464), "moderate");
  EXPECT_EQ(guilford_band(0.953), "very high");
  EXPECT_EQ(guilford_band(-0.040), "slight/negligible");
  // Banded by the stated thresholds even where prose says otherwise.
  EXPECT_EQ(guilford_band(0.397), "low");
  EXPECT_EQ(guilford_band(-0.75), "high");
}

TEST(Bands, BoundariesAreRightOpen) {
  EXPECT_EQ(guilford_band(0.1999), "low");  // rounds to 0.200
  EXPECT_EQ(guilford_band(0.1994), "slight/negligible");
  EXPECT_EQ(guilford_band(0.20), "low");
  EXPECT_EQ(guilford_band(0.40), "moderate");
  EXPECT_EQ(guilford_band(0.70), "high");
  EXPECT_EQ(guilford_band(0.90), "very high");
  EXPECT_EQ(guilford_band(1.0), "very high");
  EXPECT_EQ(guilford_band(0.0), "slight/negligible");
}

TEST(Outcomes, TwoRowsPerMatch) {
  MatchRecord m = testing::simple_match(4, 5);
  m.home_goals = 3;
  m.away_goals = 0;
  const std::vector<MatchRecord> ms{m};
  const std::vector<TeamOutcome> o = outcomes_from_matches(ms);
  ASSERT_EQ(o.size(), 2u);
  EXPECT_EQ(o[0].team_id, testing::kHome);
  EXPECT_EQ(o[0].points(), 3);
  EXPECT_EQ(o[1].goals_for, 0);
  EXPECT_EQ(o[1].goals_against, 3);
  EXPECT_EQ(o[1].points(), 0);
}

// Round-robin league where each team's r_vdep is planted from its result.
struct League {
  std::vector<valuation::TeamMatchValue> values;
  std::vector<TeamOutcome> outcomes;
};

League engineered_league(std::uint64_t seed, int n_teams) {
  std::mt19937_64 rng(seed);
  std::poisson_distribution<int> goals(1.4);
  std::normal_distribution<double> eps(0.0, 0.01);
  League l;
  int match = 0;
  for (int a = 1; a <= n_teams; ++a) {
    for (int b = a + 1; b <= n_teams; ++b) {
      ++match;
      const int ga = goals(rng), gb = goals(rng);
      for (const auto& [team, gf, ga2] : {std::tuple{a, ga, gb}, std::tuple{b, gb, ga}}) {
        l.outcomes.push_back({team, match, gf, ga2});
        valuation::TeamMatchValue v;
        v.team_id = team;
        v.match_id = match;
        v.m = 100;
        v.c = 2.6;
        v.r_recoveries = 0.35 + eps(rng);
        v.r_attacked = 0.13 + eps(rng);
        v.r_vdep = 0.1 * winning_points(gf, ga2) + eps(rng);
        v.s_vaep = 0.2 * gf + eps(rng);
        l.values.push_back(v);
      }
    }
  }
  return l;
}

const CorrelationRow& find(const std::vector<CorrelationRow>& rows, std::string_view index,
                           std::string_view outcome) {
  for (const CorrelationRow& r : rows) {
    if (r.index == index && r.outcome == outcome) return r;
  }
  throw std::runtime_error("row not found");
}

TEST(Report, PlantedDependencyIsVeryHigh) {
  const League l = engineered_league(22, 18);
  const auto rows = correlation_report(l.values, l.outcomes, Level::kMatch);
  EXPECT_EQ(rows.size(), 12u);
  const CorrelationRow& r = find(rows, "r_vdep", "points");
  ASSERT_TRUE(r.r);
  EXPECT_GT(*r.r, 0.9);
  EXPECT_EQ(r.band, "very high");
  EXPECT_EQ(r.n, 18 * 17);
  EXPECT_GT(*find(rows, "s_vaep", "goals_for").r, 0.9);

  const auto season = correlation_report(l.values, l.outcomes, Level::kSeason);
  EXPECT_EQ(find(season, "r_vdep", "points").n, 18);
  EXPECT_GT(*find(season, "r_vdep", "points").r, 0.9);
}

TEST(Report, SeasonLevelAveragesIndicesAndSumsOutcomes) {
  const League l = engineered_league(23, 5);
  const auto season = correlation_report(l.values, l.outcomes, Level::kSeason);
  // Independent recomputation for one pair.
  std::map<int, double> idx, pts;
  std::map<int, int> cnt;
  for (const auto& v : l.values) {
    idx[v.team_id] += v.r_attacked;
    ++cnt[v.team_id];
  }
  for (const auto& o : l.outcomes) pts[o.team_id] += o.points();
  Eigen::VectorXd x(5), y(5);
  for (int t = 1; t <= 5; ++t) {
    x(t - 1) = idx[t] / cnt[t];
    y(t - 1) = pts[t];
  }
  EXPECT_NEAR(*find(season, "r_attacked", "points").r, pearson_r(x, y), 1e-12);
}

TEST(Report, ShuffledOutcomesGiveSmallCorrelation) {
  League l = engineered_league(24, 30);
  std::mt19937_64 rng(25);
  // Permute the outcome rows among keys.
  std::vector<TeamOutcome> shuffled = l.outcomes;
  std::vector<std::pair<int, int>> keys;
  for (const auto& o : shuffled) keys.push_back({o.team_id, o.match_id});
  std::shuffle(keys.begin(), keys.end(), rng);
  for (std::size_t i = 0; i < shuffled.size(); ++i) {
    shuffled[i].team_id = keys[i].first;
    shuffled[i].match_id = keys[i].second;
  }
  const auto rows = correlation_report(l.values, shuffled, Level::kMatch);
  EXPECT_LT(std::abs(*find(rows, "r_vdep", "points").r), 0.1);
}

TEST(Report, ConstantIndexIsUndefined) {
  League l = engineered_league(26, 6);
  for (auto& v : l.values) v.r_attacked = 0.1;
  EXPECT_THROW(correlation_report(l.values, l.outcomes, Level::kMatch), UndefinedMetricError);
  const auto rows = correlation_report(l.values, l.outcomes, Level::kMatch, false);
  const CorrelationRow& r = find(rows, "r_attacked", "points");
  EXPECT_FALSE(r.r);
  EXPECT_EQ(r.band, "undefined");
  EXPECT_TRUE(find(rows, "r_vdep", "points").r);

  const auto dir = testing::scratch_dir("analysis_csv");
  write_correlations_csv(dir / "c.csv", rows);
  std::ifstream in(dir / "c.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "level,index,outcome,r,band,n");
  bool saw = false;
  while (std::getline(in, line)) saw |= line == "match,r_attacked,points,,undefined,30";
  EXPECT_TRUE(saw);
}

TEST(Report, NeedsThreeTeamsAndMatchingOutcomes) {
  League l = engineered_league(27, 2);
  EXPECT_THROW(correlation_report(l.values, l.outcomes, Level::kMatch), Error);
  League big = engineered_league(27, 4);
  big.outcomes.pop_back();
  EXPECT_THROW(correlation_report(big.values, big.outcomes, Level::kMatch), SchemaError);
}

TEST(Scatter, QuadrantColumn) {
  valuation::SeasonTable t;
  t.teams.push_back({1, "A", 3, 0.40, 0.16, 0.0, 0.0});
  t.teams.push_back({2, "B", 3, 0.30, 0.10, 0.0, 0.0});
  t.league = {0, "league", 6, 0.35, 0.13, 0.0, 0.0};
  const auto dir = testing::scratch_dir("scatter_csv");
  write_season_scatter_csv(dir / "s.csv", t);
  std::ifstream in(dir / "s.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "team_id,name,r_recoveries,r_attacked,r_vdep,quadrant");
  std::getline(in, line);
  EXPECT_NE(line.find("high-return/high-risk"), std::string::npos);
  std::getline(in, line);
  EXPECT_NE(line.find("low-return/low-risk"), std::string::npos);
  std::getline(in, line);
  EXPECT_EQ(line.rfind("league,league,", 0), 0u);
}

}  // namespace
}  // namespace vdep::analysis
