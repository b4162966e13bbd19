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

#include <random>

#include <gtest/gtest.h>

#include "fixtures.h"
#include "label_oracle.h"
#include "vdep/labeling.h"

namespace vdep {
namespace {

using testing::kAway;
using testing::kHome;
using testing::make_event;

std::vector<Event> quiet_stream(int n, int team = kHome) {
  std::vector<Event> ev;
  for (int i = 0; i < n; ++i) ev.push_back(make_event(i + 1, 1, i, team));
  return ev;
}

TEST(Recovery, DefenderWinsBallInsideWindow) {
  auto ev = quiet_stream(10);
  ev[2].team_id = kAway;
  ev[2].flags.ball_recovery = true;
  EXPECT_TRUE(label_recovery(ev, 0, 5));
}

TEST(Recovery, OutsideWindow) {
  auto ev = quiet_stream(10);
  ev[6].team_id = kAway;
  ev[6].flags.ball_recovery = true;
  EXPECT_FALSE(label_recovery(ev, 0, 5));
  EXPECT_TRUE(label_recovery(ev, 0, 6));
}

TEST(Recovery, LastEventHasEmptyWindow) {
  auto ev = quiet_stream(4);
  ev[3].team_id = kAway;
  ev[3].flags.ball_recovery = true;
  EXPECT_FALSE(label_recovery(ev, 3, 5));
  EXPECT_TRUE(label_recovery(ev, 2, 5));
}

TEST(Recovery, OwnTeamFlagDoesNotCount) {
  auto ev = quiet_stream(5);
  ev[1].flags.ball_recovery = true;
  EXPECT_FALSE(label_recovery(ev, 0, 5));
}

TEST(Recovery, WindowStopsAtPeriodBoundary) {
  auto ev = quiet_stream(6);
  for (int i = 3; i < 6; ++i) ev[i].period = 2;
  ev[3].team_id = kAway;
  ev[3].flags.ball_recovery = true;
  EXPECT_FALSE(label_recovery(ev, 1, 5));
  EXPECT_FALSE(label_recovery(ev, 2, 5));
  // Inside the second period the window works as usual.
  ev[5].flags.ball_recovery = true;
  EXPECT_TRUE(label_recovery(ev, 3, 5));
}

TEST(Attacked, EffectiveAttackNextEvent) {
  auto ev = quiet_stream(6);
  ev[1].flags.effective_attack = true;
  EXPECT_TRUE(label_attacked(ev, 0, 5));
}

TEST(Attacked, NoFlagInWindow) {
  EXPECT_FALSE(label_attacked(quiet_stream(8), 0, 5));
}

TEST(Attacked, OpponentAttackDoesNotCount) {
  auto ev = quiet_stream(6);
  ev[2].team_id = kAway;
  ev[2].flags.effective_attack = true;
  EXPECT_FALSE(label_attacked(ev, 0, 5));
}

TEST(Attacked, TwentyEventFixtureMatchesOracle) {
  std::mt19937_64 rng(20);
  const auto ev = testing::random_stream(rng, 20);
  for (int k = 1; k <= 8; ++k) {
    for (std::size_t i = 0; i < ev.size(); ++i) {
      EXPECT_EQ(label_attacked(ev, i, k), oracle::scan(ev, i, k).attacked);
    }
  }
}

TEST(Goals, GoalByAttackingTeamScoresForItAndConcedesForOpponent) {
  auto ev = quiet_stream(8);
  ev[3].flags.goal = true;
  EXPECT_EQ(label_goals(ev, 0, 10), std::make_pair(true, false));
  // Same physical goal seen from an event of the other team.
  ev[1].team_id = kAway;
  EXPECT_EQ(label_goals(ev, 1, 10), std::make_pair(false, true));
}

TEST(Goals, NoGoal) {
  EXPECT_EQ(label_goals(quiet_stream(12), 0), std::make_pair(false, false));
}

TEST(Goals, OwnGoalIsCreditedToTheOpponent) {
  auto ev = quiet_stream(5);
  ev[2].team_id = kAway;
  ev[2].action = ActionType::kOwnGoal;
  ev[2].flags.goal = true;
  EXPECT_EQ(label_goals(ev, 0, 10), std::make_pair(true, false));
  EXPECT_TRUE(goal_credited_to(ev[2], kHome));
  EXPECT_FALSE(goal_credited_to(ev[2], kAway));
}

TEST(Labels, MatchOracleOnRandomStreams) {
  std::mt19937_64 rng(77);
  for (int rep = 0; rep < 500; ++rep) {
    const int n = 1 + static_cast<int>(rng() % 60);
    const auto ev = testing::random_stream(rng, n);
    const LabelConfig cfg{1 + static_cast<int>(rng() % 8), 1 + static_cast<int>(rng() % 12)};
    const LabelSet got = label_events(ev, cfg);
    ASSERT_EQ(got.size(), ev.size());
    for (std::size_t i = 0; i < ev.size(); ++i) {
      EXPECT_EQ(got[i], oracle::labels(ev, i, cfg)) << "rep " << rep << " i " << i;
    }
  }
}

TEST(Labels, MonotoneInK) {
  std::mt19937_64 rng(78);
  for (int rep = 0; rep < 200; ++rep) {
    const auto ev = testing::random_stream(rng, 40);
    for (std::size_t i = 0; i < ev.size(); ++i) {
      for (int k = 1; k < 10; ++k) {
        if (label_recovery(ev, i, k)) EXPECT_TRUE(label_recovery(ev, i, k + 1));
        if (label_attacked(ev, i, k)) EXPECT_TRUE(label_attacked(ev, i, k + 1));
        const auto [s, c] = label_goals(ev, i, k);
        const auto [s2, c2] = label_goals(ev, i, k + 1);
        if (s) EXPECT_TRUE(s2);
        if (c) EXPECT_TRUE(c2);
      }
    }
  }
}

TEST(Labels, IgnorePastEvents) {
  std::mt19937_64 rng(79);
  for (int rep = 0; rep < 200; ++rep) {
    auto ev = testing::random_stream(rng, 30);
    const std::size_t i = rng() % ev.size();
    const LabelSet before = label_events(ev);
    for (std::size_t j = 0; j < i; ++j) {
      ev[j].flags = {rng() % 2 == 0, rng() % 2 == 0, rng() % 2 == 0};
      ev[j].team_id = rng() % 2 ? kHome : kAway;
    }
    EXPECT_EQ(label_events(ev)[i], before[i]);
  }
}

}  // namespace
}  // namespace vdep
