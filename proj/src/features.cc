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

#include "vdep/features.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vdep/csv.h"
#include "vdep/ingestion.h"

namespace vdep {
namespace {

constexpr int kOffenseXY = 0;
constexpr int kDefenseXY = 2 * kPlayersPerTeam;
constexpr int kOffenseDist = 4 * kPlayersPerTeam;
constexpr int kDefenseDist = 5 * kPlayersPerTeam;

std::vector<std::string> event_block_names(const std::string& suffix) {
  std::vector<std::string> names;
  for (ActionType a : all_action_types()) {
    names.push_back("type_" + std::string(to_string(a)) + suffix);
  }
  for (const char* base :
       {"event_id", "start_time", "end_time", "duration", "start_x",
        "start_y", "end_x", "end_y", "dx", "dy", "movement", "prev_dx",
        "prev_dy", "prev_movement", "goal_distance", "goal_angle",
        "team_1"}) {
    names.push_back(base + suffix);
  }
  return names;
}

std::vector<std::string> make_names() {
  std::vector<std::string> names = event_block_names("_a0");
  const auto a1 = event_block_names("_a1");
  names.insert(names.end(), a1.begin(), a1.end());
  for (const char* side : {"offense", "defense"}) {
    for (int r = 1; r <= kPlayersPerTeam; ++r) {
      names.push_back(std::string(side) + "_x" + std::to_string(r) + "_a0");
      names.push_back(std::string(side) + "_y" + std::to_string(r) + "_a0");
    }
  }
  for (const char* side : {"offense", "defense"}) {
    for (int r = 1; r <= kPlayersPerTeam; ++r) {
      names.push_back(std::string(side) + "_p" + std::to_string(r) + "_a0");
    }
  }
  names.push_back("opponent_season_goals");
  return names;
}

Event normalized(const Event& e, bool toward_positive_x) {
  Event out = e;
  out.ball_start = to_attacking_frame(e.ball_start, toward_positive_x);
  out.ball_end = to_attacking_frame(e.ball_end, toward_positive_x);
  return out;
}

TrackingFrame normalized(const TrackingFrame& f, bool toward_positive_x) {
  TrackingFrame out = f;
  out.ball = to_attacking_frame(f.ball, toward_positive_x);
  for (PlayerPosition& p : out.players) {
    p.xy = to_attacking_frame(p.xy, toward_positive_x);
  }
  return out;
}

}  // namespace

const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> kNames = [] {
    auto names = make_names();
    if (names.size() != kNumFeatures) {
      throw std::logic_error("feature name table has wrong size");
    }
    return names;
  }();
  return kNames;
}

int feature_index(std::string_view name) {
  const auto& names = feature_names();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    throw std::out_of_range("unknown feature " + std::string(name));
  }
  return static_cast<int>(it - names.begin());
}

EventBlock build_event_block(const Event& e, const Event* prev) {
  EventBlock b = EventBlock::Zero();
  b(static_cast<int>(e.action)) = 1.0;
  int k = kNumActionTypes;
  b(k++) = e.event_id;
  b(k++) = e.t_start;
  b(k++) = e.t_end;
  b(k++) = e.duration();
  b(k++) = e.ball_start.x;
  b(k++) = e.ball_start.y;
  b(k++) = e.ball_end.x;
  b(k++) = e.ball_end.y;
  const double dx = e.ball_end.x - e.ball_start.x;
  const double dy = e.ball_end.y - e.ball_start.y;
  b(k++) = dx;
  b(k++) = dy;
  b(k++) = std::hypot(dx, dy);
  if (prev != nullptr) {
    const double pdx = e.ball_start.x - prev->ball_start.x;
    const double pdy = e.ball_start.y - prev->ball_start.y;
    b(k++) = pdx;
    b(k++) = pdy;
    b(k++) = std::hypot(pdx, pdy);
  } else {
    k += 3;
  }
  const double gx = kAttackedGoal.x - e.ball_start.x;
  const double gy = kAttackedGoal.y - e.ball_start.y;
  b(k++) = std::hypot(gx, gy);
  double angle = std::atan2(gy, gx);
  if (angle <= -std::numbers::pi) angle = std::numbers::pi;
  b(k++) = angle;
  b(k++) = (prev != nullptr && prev->team_id != e.team_id) ? 1.0 : 0.0;
  return b;
}

OffballBlock build_offball_block(const TrackingFrame& frame,
                                 int possession_team) {
  struct Ranked {
    double dist;
    int player_id;
    Point xy;
  };
  std::vector<Ranked> offense;
  std::vector<Ranked> defense;
  for (const PlayerPosition& p : frame.players) {
    auto& side = p.team_id == possession_team ? offense : defense;
    side.push_back({distance(p.xy, frame.ball), p.player_id, p.xy});
  }
  if (offense.size() != kPlayersPerTeam || defense.size() != kPlayersPerTeam) {
    throw std::logic_error("off-ball block needs 11 players per side, got " +
                           std::to_string(offense.size()) + "/" +
                           std::to_string(defense.size()));
  }
  const auto by_distance = [](const Ranked& a, const Ranked& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.player_id < b.player_id;
  };
  std::sort(offense.begin(), offense.end(), by_distance);
  std::sort(defense.begin(), defense.end(), by_distance);

  OffballBlock b;
  for (int r = 0; r < kPlayersPerTeam; ++r) {
    b(kOffenseXY + 2 * r) = offense[r].xy.x;
    b(kOffenseXY + 2 * r + 1) = offense[r].xy.y;
    b(kDefenseXY + 2 * r) = defense[r].xy.x;
    b(kDefenseXY + 2 * r + 1) = defense[r].xy.y;
    b(kOffenseDist + r) = offense[r].dist;
    b(kDefenseDist + r) = defense[r].dist;
  }
  return b;
}

FeatureVector build_state_vector(const GameState& state) {
  FeatureVector v = FeatureVector::Zero();
  const Event* prev = state.previous ? &state.previous->event : nullptr;
  v.segment<kEventBlockSize>(0) = build_event_block(state.current.event, prev);
  if (state.previous) {
    const Event* before =
        state.before_previous ? &*state.before_previous : nullptr;
    v.segment<kEventBlockSize>(kEventBlockSize) =
        build_event_block(state.previous->event, before);
  }
  v.segment<kOffballBlockSize>(2 * kEventBlockSize) =
      build_offball_block(state.current.frame, state.attacking_team);
  v(kNumFeatures - 1) = state.opponent_season_goals;
  return v;
}

std::vector<GameState> build_game_states(const MatchRecord& match,
                                         const std::map<int, Team>& teams) {
  const auto frame_idx = align_frame_indices(match.events, match.frames);
  std::vector<GameState> states;
  states.reserve(match.events.size());
  for (std::size_t i = 0; i < match.events.size(); ++i) {
    const Event& e = match.events[i];
    const int attacker = e.team_id;
    const auto frame_of = [&](std::size_t j) {
      return attacks_toward_positive_x(match, attacker, match.events[j].period);
    };
    GameState s;
    s.attacking_team = attacker;
    s.defending_team = match.opponent_of(attacker);
    const auto team = teams.find(attacker);
    s.opponent_season_goals = team == teams.end() ? 0 : team->second.season_goals;
    s.current = {normalized(e, frame_of(i)),
                 normalized(match.frames[frame_idx[i]], frame_of(i))};
    if (i >= 1) {
      s.previous = StateEvent{
          normalized(match.events[i - 1], frame_of(i - 1)),
          normalized(match.frames[frame_idx[i - 1]], frame_of(i - 1))};
    }
    if (i >= 2) {
      s.before_previous = normalized(match.events[i - 2], frame_of(i - 2));
    }
    states.push_back(std::move(s));
  }
  return states;
}

FeatureMatrix build_match_features(const MatchRecord& match,
                                   const std::map<int, Team>& teams) {
  const auto states = build_game_states(match, teams);
  FeatureMatrix x(static_cast<Eigen::Index>(states.size()), kNumFeatures);
  for (std::size_t i = 0; i < states.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) =
        build_state_vector(states[i]).transpose();
  }
  return x;
}

FeatureMatrix build_corpus_features(const Corpus& corpus) {
  Eigen::Index rows = 0;
  for (const MatchRecord& m : corpus.matches) {
    rows += static_cast<Eigen::Index>(m.events.size());
  }
  FeatureMatrix x(rows, kNumFeatures);
  Eigen::Index at = 0;
  for (const MatchRecord& m : corpus.matches) {
    const FeatureMatrix block = build_match_features(m, corpus.teams);
    x.middleRows(at, block.rows()) = block;
    at += block.rows();
  }
  return x;
}

void write_feature_table(const std::filesystem::path& path) {
  csv::Writer w(path);
  w.row("name", "index");
  const auto& names = feature_names();
  for (std::size_t i = 0; i < names.size(); ++i) w.row(names[i], i);
}

}  // namespace vdep
