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

#include "vdep/domain.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <tuple>

#include "vdep/error.h"

namespace vdep {
namespace {

constexpr std::array<std::string_view, kNumActionTypes> kActionNames = {
    "pass",         "cross",       "throw_in",      "free_kick",
    "corner_kick",  "trap",        "foul",          "tackle",
    "interception", "shot",        "penalty_kick",  "own_goal",
    "gk_hand_clear", "gk_catch",   "clearance",     "block",
    "dribble",      "offside",     "goal_kick",
};

bool in_pitch(const Point& p) {
  return p.x >= 0.0 && p.x <= kPitchLength && p.y >= 0.0 &&
         p.y <= kPitchWidth;
}

std::string frame_label(const TrackingFrame& f) {
  return "frame " + std::to_string(f.period) + "@" + std::to_string(f.t);
}

}  // namespace

const std::array<ActionType, kNumActionTypes>& all_action_types() {
  static const auto kAll = [] {
    std::array<ActionType, kNumActionTypes> all{};
    for (int i = 0; i < kNumActionTypes; ++i) {
      all[i] = static_cast<ActionType>(i);
    }
    return all;
  }();
  return kAll;
}

std::string_view to_string(ActionType action) {
  return kActionNames[static_cast<int>(action)];
}

ActionType parse_action_type(std::string_view token) {
  const auto it = std::find(kActionNames.begin(), kActionNames.end(), token);
  if (it == kActionNames.end()) {
    throw ParseError("unknown action type \"" + std::string(token) + "\"");
  }
  return static_cast<ActionType>(it - kActionNames.begin());
}

double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

bool event_order_less(const Event& a, const Event& b) {
  return std::tie(a.period, a.t_start, a.event_id) <
         std::tie(b.period, b.t_start, b.event_id);
}

bool attacks_toward_positive_x(const MatchRecord& match, int team_id,
                               int period) {
  const bool home = team_id == match.home_team_id;
  return home == (period == 1);
}

Point to_attacking_frame(const Point& p, bool toward_positive_x) {
  if (toward_positive_x) return p;
  return {kPitchLength - p.x, kPitchWidth - p.y};
}

std::vector<Violation> validate_match(const MatchRecord& match) {
  std::vector<Violation> out;
  const auto add = [&out](std::string rule, std::string where,
                          std::string detail) {
    out.push_back({std::move(rule), std::move(where), std::move(detail)});
  };

  if (match.week < 1) {
    add("week", "match " + std::to_string(match.match_id),
        "week index must be >= 1");
  }
  if (match.home_team_id == match.away_team_id) {
    add("team", "match " + std::to_string(match.match_id),
        "home and away team are identical");
  }

  std::set<int> ids;
  for (std::size_t i = 0; i < match.events.size(); ++i) {
    const Event& e = match.events[i];
    const std::string where = "event " + std::to_string(e.event_id);
    if (!ids.insert(e.event_id).second) {
      add("duplicate-id", where, "event_id is not unique");
    }
    if (e.period != 1 && e.period != 2) {
      add("period", where, "period must be 1 or 2");
    }
    if (!(e.t_end >= e.t_start)) {
      add("time", where, "t_end precedes t_start");
    }
    if (!in_pitch(e.ball_start) || !in_pitch(e.ball_end)) {
      add("bounds", where, "ball coordinates outside the pitch");
    }
    if (e.team_id != match.home_team_id && e.team_id != match.away_team_id) {
      add("team", where, "team_id is not playing this match");
    }
    if (i > 0 && !event_order_less(match.events[i - 1], e)) {
      add("ordering", where,
          "not strictly after event " +
              std::to_string(match.events[i - 1].event_id));
    }
  }

  for (std::size_t i = 0; i < match.frames.size(); ++i) {
    const TrackingFrame& f = match.frames[i];
    int home = 0;
    int away = 0;
    for (const PlayerPosition& p : f.players) {
      if (p.team_id == match.home_team_id) {
        ++home;
      } else if (p.team_id == match.away_team_id) {
        ++away;
      }
    }
    if (home != kPlayersPerTeam || away != kPlayersPerTeam ||
        f.players.size() != 2 * kPlayersPerTeam) {
      add("player-count", frame_label(f),
          "expected 11 players per team, got " + std::to_string(home) + "/" +
              std::to_string(away));
    }
    if (f.period != 1 && f.period != 2) {
      add("period", frame_label(f), "period must be 1 or 2");
    }
    if (i > 0 && std::tie(match.frames[i - 1].period, match.frames[i - 1].t) >=
                     std::tie(f.period, f.t)) {
      add("frame-ordering", frame_label(f), "frames not strictly increasing");
    }
  }
  return out;
}

}  // namespace vdep
