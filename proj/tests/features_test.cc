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
#include <fstream>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "fixtures.h"
#include "vdep/features.h"

namespace vdep {
namespace {

using testing::kAway;
using testing::kHome;
using testing::make_event;

int at(const char* name) { return feature_index(name); }
int in_block(const char* base) { return feature_index(std::string(base) + "_a0"); }

TEST(Names, BijectiveAndStable) {
  const auto& names = feature_names();
  ASSERT_EQ(names.size(), 139u);
  EXPECT_EQ(std::set<std::string>(names.begin(), names.end()).size(), 139u);
  for (std::size_t i = 0; i < names.size(); ++i) {
    EXPECT_EQ(feature_index(names[i]), static_cast<int>(i));
  }
  EXPECT_EQ(at("type_pass_a0"), 0);
  EXPECT_EQ(at("type_goal_kick_a0"), 18);
  EXPECT_EQ(at("event_id_a0"), 19);
  EXPECT_EQ(at("team_1_a0"), 35);
  EXPECT_EQ(at("type_pass_a1"), 36);
  EXPECT_EQ(at("team_1_a1"), 71);
  EXPECT_EQ(at("offense_x1_a0"), 72);
  EXPECT_EQ(at("offense_y1_a0"), 73);
  EXPECT_EQ(at("defense_x1_a0"), 94);
  EXPECT_EQ(at("offense_p1_a0"), 116);
  EXPECT_EQ(at("defense_p1_a0"), 127);
  EXPECT_EQ(at("defense_p11_a0"), 137);
  EXPECT_EQ(at("opponent_season_goals"), 138);
  EXPECT_THROW(feature_index("nope"), std::out_of_range);
}

TEST(EventBlock, ZeroMotionPass) {
  Event e = make_event(1, 1, 0, kHome, {}, {52.5, 34}, {52.5, 34});
  const EventBlock b = build_event_block(e, nullptr);
  EXPECT_EQ(b(in_block("dx")), 0.0);
  EXPECT_EQ(b(in_block("dy")), 0.0);
  EXPECT_EQ(b(in_block("movement")), 0.0);
  EXPECT_EQ(b(0), 1.0);
  EXPECT_EQ(b.head(19).sum(), 1.0);
}

TEST(EventBlock, BallAtGoalCenter) {
  Event e = make_event(1, 1, 0, kHome, {}, {105, 34}, {105, 34});
  const EventBlock b = build_event_block(e, nullptr);
  EXPECT_EQ(b(in_block("goal_distance")), 0.0);
  EXPECT_EQ(b(in_block("goal_angle")), 0.0);
}

TEST(EventBlock, ShortRunToGoal) {
  Event e = make_event(1, 1, 0, kHome, {}, {95, 34}, {105, 34});
  const EventBlock b = build_event_block(e, nullptr);
  EXPECT_DOUBLE_EQ(b(in_block("goal_distance")), 10.0);
  EXPECT_DOUBLE_EQ(b(in_block("dx")), 10.0);
  EXPECT_DOUBLE_EQ(b(in_block("movement")), 10.0);
  EXPECT_DOUBLE_EQ(b(in_block("goal_angle")), 0.0);
}

TEST(EventBlock, AngleRangeAndSign) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ux(0, 105), uy(0, 68);
  for (int i = 0; i < 2000; ++i) {
    Event e = make_event(1, 1, 0, kHome, {}, {ux(rng), uy(rng)});
    const double a = build_event_block(e, nullptr)(in_block("goal_angle"));
    EXPECT_GT(a, -std::numbers::pi);
    EXPECT_LE(a, std::numbers::pi);
    EXPECT_NEAR(a, std::atan2(34 - e.ball_start.y, 105 - e.ball_start.x), 1e-15);
  }
  // Directly in front of the goal center.
  Event e = make_event(1, 1, 0, kHome, {}, {105, 34});
  e.ball_start = {104.0, 34.0};
  EXPECT_DOUBLE_EQ(build_event_block(e, nullptr)(in_block("goal_angle")), 0.0);
}

TEST(EventBlock, PreviousDisplacementAndPossessionFlag) {
  Event prev = make_event(1, 1, 0, kAway, {}, {40, 30}, {45, 30});
  Event e = make_event(2, 1, 1, kHome, {}, {43, 34}, {50, 30});
  const EventBlock b = build_event_block(e, &prev);
  EXPECT_DOUBLE_EQ(b(in_block("prev_dx")), 3.0);
  EXPECT_DOUBLE_EQ(b(in_block("prev_dy")), 4.0);
  EXPECT_DOUBLE_EQ(b(in_block("prev_movement")), 5.0);
  EXPECT_EQ(b(in_block("team_1")), 1.0);
  prev.team_id = kHome;
  EXPECT_EQ(build_event_block(e, &prev)(in_block("team_1")), 0.0);
  EXPECT_EQ(build_event_block(e, nullptr)(in_block("prev_movement")), 0.0);
}

TEST(OffballBlock, EquidistantPlayersSortByPlayerId) {
  // Twelve lattice offsets at distance exactly 5 from the ball.
  const std::vector<Point> ring = {{3, 4}, {4, 3}, {5, 0}, {0, 5}, {-3, 4}, {-4, 3},
                                   {-5, 0}, {0, -5}, {3, -4}, {4, -3}, {-3, -4}, {-4, -3}};
  std::mt19937_64 rng(8);
  std::vector<int> ids = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
  std::shuffle(ids.begin(), ids.end(), rng);
  TrackingFrame f;
  f.ball = {50, 30};
  for (int k = 0; k < 11; ++k) {
    f.players.push_back({kHome, 100 + ids[k], {50 + ring[k].x, 30 + ring[k].y}});
    f.players.push_back({kAway, 200 + ids[k], {50 + ring[k + 1].x, 30 + ring[k + 1].y}});
  }
  const OffballBlock b = build_offball_block(f, kHome);
  for (int r = 0; r < 11; ++r) {
    EXPECT_EQ(b(44 + r), 5.0);
    EXPECT_EQ(b(55 + r), 5.0);
    // Rank r holds the player with id r+1.
    const auto pos = std::find(ids.begin(), ids.end(), r + 1) - ids.begin();
    EXPECT_EQ(b(2 * r), 50 + ring[pos].x);
    EXPECT_EQ(b(2 * r + 1), 30 + ring[pos].y);
    EXPECT_EQ(b(22 + 2 * r), 50 + ring[pos + 1].x);
  }
}

TEST(OffballBlock, DefenderOnTheBall) {
  TrackingFrame f = testing::grid_frame(1, 0.0, {70, 20});
  for (auto& p : f.players) {
    if (p.player_id == 207) p.xy = {70, 20};
  }
  const OffballBlock b = build_offball_block(f, kHome);
  EXPECT_EQ(b(at("defense_p1_a0") - 72), 0.0);
  EXPECT_EQ(b(at("defense_x1_a0") - 72), 70.0);
  EXPECT_EQ(b(at("defense_y1_a0") - 72), 20.0);
}

// Independent projection: stable sort of (distance, id) pairs per side.
OffballBlock offball_oracle(const TrackingFrame& f, int team) {
  OffballBlock out;
  for (int side = 0; side < 2; ++side) {
    std::vector<std::tuple<double, int, double, double>> rows;
    for (const auto& p : f.players) {
      if ((p.team_id == team) == (side == 0)) {
        rows.emplace_back(std::hypot(p.xy.x - f.ball.x, p.xy.y - f.ball.y),
                          p.player_id, p.xy.x, p.xy.y);
      }
    }
    std::sort(rows.begin(), rows.end());
    for (int r = 0; r < 11; ++r) {
      out(side * 22 + 2 * r) = std::get<2>(rows[r]);
      out(side * 22 + 2 * r + 1) = std::get<3>(rows[r]);
      out(44 + side * 11 + r) = std::get<0>(rows[r]);
    }
  }
  return out;
}

TrackingFrame random_frame(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ux(0, 105), uy(0, 68);
  TrackingFrame f;
  f.ball = {ux(rng), uy(rng)};
  for (int k = 1; k <= 11; ++k) {
    f.players.push_back({kHome, 100 + k, {ux(rng), uy(rng)}});
    f.players.push_back({kAway, 200 + k, {ux(rng), uy(rng)}});
  }
  // Force some exact ties.
  f.players[3].xy = f.players[5].xy;
  return f;
}

TEST(OffballBlock, MatchesSortAndProjectOracle) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 500; ++i) {
    const TrackingFrame f = random_frame(rng);
    const int team = i % 2 ? kHome : kAway;
    EXPECT_EQ(build_offball_block(f, team), offball_oracle(f, team));
  }
}

TEST(OffballBlock, InvariantToPlayerOrder) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 200; ++i) {
    TrackingFrame f = random_frame(rng);
    const OffballBlock a = build_offball_block(f, kHome);
    std::shuffle(f.players.begin(), f.players.end(), rng);
    EXPECT_EQ(build_offball_block(f, kHome), a);
  }
}

TEST(OffballBlock, WrongPlayerCountIsInternalError) {
  TrackingFrame f = testing::grid_frame(1, 0);
  f.players.pop_back();
  EXPECT_THROW(build_offball_block(f, kHome), std::logic_error);
}

// Two-event match with hand-chosen geometry; expected values computed by
// hand for the away team's event in period 1 (mirrored frame).
MatchRecord golden_match() {
  MatchRecord m;
  m.match_id = 3;
  m.home_team_id = kHome;
  m.away_team_id = kAway;
  Event a = make_event(10, 1, 4.0, kHome, {}, {60, 30}, {70, 40});
  a.action = ActionType::kPass;
  a.t_end = 5.5;
  Event b = make_event(11, 1, 6.0, kAway, {}, {75, 44}, {80, 50});
  b.action = ActionType::kInterception;
  b.t_end = 6.25;
  m.events = {a, b};
  TrackingFrame f0 = testing::grid_frame(1, 4.0, {60, 30});
  TrackingFrame f1 = testing::grid_frame(1, 6.0, {75, 44});
  m.frames = {f0, f1};
  return m;
}

TEST(StateVector, HandComputedGolden) {
  const MatchRecord m = golden_match();
  const auto teams = testing::two_teams();
  const FeatureMatrix x = build_match_features(m, teams);
  ASSERT_EQ(x.rows(), 2);
  ASSERT_EQ(x.cols(), 139);

  // Event 0: home attacks +x in period 1, so no mirroring.
  const auto r0 = x.row(0);
  EXPECT_EQ(r0(at("type_pass_a0")), 1.0);
  EXPECT_EQ(r0(at("event_id_a0")), 10.0);
  EXPECT_EQ(r0(at("start_time_a0")), 4.0);
  EXPECT_EQ(r0(at("end_time_a0")), 5.5);
  EXPECT_EQ(r0(at("duration_a0")), 1.5);
  EXPECT_EQ(r0(at("start_x_a0")), 60.0);
  EXPECT_EQ(r0(at("end_y_a0")), 40.0);
  EXPECT_EQ(r0(at("dx_a0")), 10.0);
  EXPECT_EQ(r0(at("dy_a0")), 10.0);
  EXPECT_DOUBLE_EQ(r0(at("movement_a0")), std::sqrt(200.0));
  EXPECT_DOUBLE_EQ(r0(at("goal_distance_a0")), std::sqrt(45.0 * 45 + 4 * 4));
  EXPECT_DOUBLE_EQ(r0(at("goal_angle_a0")), std::atan2(4.0, 45.0));
  EXPECT_TRUE(r0.segment(36, 36).isZero());
  EXPECT_EQ(r0(at("opponent_season_goals")), 40.0);

  // Event 1: away attacks -x in period 1; its frame is mirrored, so the ball
  // (75,44) becomes (30,24) and the previous event (60,30) becomes (45,38).
  const auto r1 = x.row(1);
  EXPECT_EQ(r1(at("type_interception_a0")), 1.0);
  EXPECT_EQ(r1.head(19).sum(), 1.0);
  EXPECT_DOUBLE_EQ(r1(at("start_x_a0")), 30.0);
  EXPECT_DOUBLE_EQ(r1(at("start_y_a0")), 24.0);
  EXPECT_DOUBLE_EQ(r1(at("end_x_a0")), 25.0);
  EXPECT_DOUBLE_EQ(r1(at("end_y_a0")), 18.0);
  EXPECT_DOUBLE_EQ(r1(at("dx_a0")), -5.0);
  EXPECT_DOUBLE_EQ(r1(at("dy_a0")), -6.0);
  EXPECT_DOUBLE_EQ(r1(at("prev_dx_a0")), 30.0 - 45.0);
  EXPECT_DOUBLE_EQ(r1(at("prev_dy_a0")), 24.0 - 38.0);
  EXPECT_DOUBLE_EQ(r1(at("goal_distance_a0")), std::hypot(75.0, 10.0));
  EXPECT_DOUBLE_EQ(r1(at("goal_angle_a0")), std::atan2(10.0, 75.0));
  EXPECT_EQ(r1(at("team_1_a0")), 1.0);
  EXPECT_DOUBLE_EQ(r1(at("duration_a0")), 0.25);
  // The a1 block is the previous event in the same mirrored frame.
  EXPECT_EQ(r1(at("type_pass_a1")), 1.0);
  EXPECT_EQ(r1(at("event_id_a1")), 10.0);
  EXPECT_DOUBLE_EQ(r1(at("start_x_a1")), 45.0);
  EXPECT_DOUBLE_EQ(r1(at("start_y_a1")), 38.0);
  EXPECT_DOUBLE_EQ(r1(at("end_x_a1")), 35.0);
  EXPECT_DOUBLE_EQ(r1(at("end_y_a1")), 28.0);
  EXPECT_EQ(r1(at("prev_movement_a1")), 0.0);
  EXPECT_EQ(r1(at("team_1_a1")), 0.0);
  EXPECT_EQ(r1(at("opponent_season_goals")), 55.0);
  // Off-ball: the offense is the away team. Away player k sits at
  // (10+4k, 40+3(k%6)) in the stadium frame.
  std::vector<std::tuple<double, int, double, double>> away;
  for (int k = 1; k <= 11; ++k) {
    const double px = 105 - (10.0 + 4 * k);
    const double py = 68 - (40.0 + 3 * (k % 6));
    away.emplace_back(std::hypot(px - 30, py - 24), 200 + k, px, py);
  }
  std::sort(away.begin(), away.end());
  for (int r = 0; r < 11; ++r) {
    const std::string idx = std::to_string(r + 1);
    EXPECT_DOUBLE_EQ(r1(feature_index("offense_x" + idx + "_a0")), std::get<2>(away[r]));
    EXPECT_DOUBLE_EQ(r1(feature_index("offense_y" + idx + "_a0")), std::get<3>(away[r]));
    EXPECT_DOUBLE_EQ(r1(feature_index("offense_p" + idx + "_a0")), std::get<0>(away[r]));
  }
}

TEST(StateVector, FirstEventHasZeroPreviousBlock) {
  const MatchRecord m = testing::simple_match(30);
  const FeatureMatrix x = build_match_features(m, testing::two_teams());
  EXPECT_TRUE(x.row(0).segment(36, 36).isZero());
  EXPECT_FALSE(x.row(1).segment(36, 36).isZero());
  EXPECT_TRUE(x.allFinite());
}

TEST(StateVector, NormalizesSecondPeriod) {
  // An event of the home team in period 2 is mirrored.
  MatchRecord m = testing::simple_match(30);
  const FeatureMatrix x = build_match_features(m, testing::two_teams());
  for (std::size_t i = 0; i < m.events.size(); ++i) {
    const Event& e = m.events[i];
    const bool plus = attacks_toward_positive_x(m, e.team_id, e.period);
    const Point s = to_attacking_frame(e.ball_start, plus);
    EXPECT_DOUBLE_EQ(x(static_cast<Eigen::Index>(i), at("start_x_a0")), s.x);
    EXPECT_DOUBLE_EQ(x(static_cast<Eigen::Index>(i), at("start_y_a0")), s.y);
  }
}

TEST(FeatureTable, WritesNameIndexRows) {
  const auto dir = testing::scratch_dir("features_table");
  write_feature_table(dir / "features.csv");
  std::ifstream in(dir / "features.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "name,index");
  int n = 0;
  while (std::getline(in, line)) ++n;
  EXPECT_EQ(n, 139);
}

}  // namespace
}  // namespace vdep
