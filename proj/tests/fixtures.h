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

// Small hand-built records shared by the unit tests.

#ifndef VDEP_TESTS_FIXTURES_H_
#define VDEP_TESTS_FIXTURES_H_

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "vdep/domain.h"

namespace vdep::testing {

inline constexpr int kHome = 1;
inline constexpr int kAway = 2;

// 11 + 11 players on a loose grid; home ids 101..111, away 201..211.
inline TrackingFrame grid_frame(int period, double t, Point ball = {52.5, 34}) {
  TrackingFrame f;
  f.period = period;
  f.t = t;
  f.ball = ball;
  for (int k = 1; k <= kPlayersPerTeam; ++k) {
    f.players.push_back({kHome, 100 + k, {5.0 + 4.0 * k, 10.0 + 4.0 * (k % 5)}});
    f.players.push_back({kAway, 200 + k, {10.0 + 4.0 * k, 40.0 + 3.0 * (k % 6)}});
  }
  return f;
}

inline Event make_event(int id, int period, double t, int team,
                        EventFlags flags = {}, Point start = {52.5, 34},
                        Point end = {60, 34}) {
  Event e;
  e.event_id = id;
  e.period = period;
  e.t_start = t;
  e.t_end = t + 1.0;
  e.team_id = team;
  e.player_id = team * 100 + 1;
  e.ball_start = start;
  e.ball_end = end;
  e.flags = flags;
  return e;
}

// Well-formed match: `n` events alternating teams every three events, one
// frame per event at the event's start time.
inline MatchRecord simple_match(int n, int match_id = 1) {
  MatchRecord m;
  m.match_id = match_id;
  m.week = 1;
  m.home_team_id = kHome;
  m.away_team_id = kAway;
  for (int i = 0; i < n; ++i) {
    const int period = i < n / 2 ? 1 : 2;
    const double t = 2.0 * i;
    m.events.push_back(make_event(i + 1, period, t, (i / 3) % 2 ? kAway : kHome,
                                  {}, {30.0 + i % 40, 20.0 + i % 20},
                                  {35.0 + i % 40, 25.0 + i % 20}));
    m.frames.push_back(grid_frame(period, t, m.events.back().ball_start));
  }
  return m;
}

inline std::map<int, Team> two_teams() {
  return {{kHome, {kHome, "Home", 40}}, {kAway, {kAway, "Away", 55}}};
}

// Random event stream over two teams and two periods with independent
// flags; ordering is valid.
inline std::vector<Event> random_stream(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Event> out;
  const int half = std::uniform_int_distribution<int>(0, n)(rng);
  for (int i = 0; i < n; ++i) {
    EventFlags f;
    f.effective_attack = u(rng) < 0.2;
    f.ball_recovery = u(rng) < 0.25;
    f.goal = u(rng) < 0.05;
    Event e = make_event(i + 1, i < half ? 1 : 2, 1.0 * i, u(rng) < 0.5 ? kHome : kAway, f);
    if (f.goal && u(rng) < 0.2) e.action = ActionType::kOwnGoal;
    out.push_back(e);
  }
  return out;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const std::filesystem::path p =
      std::filesystem::temp_directory_path() / ("vdep_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace vdep::testing

#endif  // VDEP_TESTS_FIXTURES_H_
