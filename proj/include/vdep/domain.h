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

// Canonical records shared by every stage of the pipeline.

#ifndef VDEP_DOMAIN_H_
#define VDEP_DOMAIN_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vdep {

inline constexpr double kPitchLength = 105.0;
inline constexpr double kPitchWidth = 68.0;
inline constexpr int kPlayersPerTeam = 11;

enum class ActionType : std::uint8_t {
  kPass,
  kCross,
  kThrowIn,
  kFreeKick,
  kCornerKick,
  kTrap,
  kFoul,
  kTackle,
  kInterception,
  kShot,
  kPenaltyKick,
  kOwnGoal,
  kGkHandClear,
  kGkCatch,
  kClearance,
  kBlock,
  kDribble,
  kOffside,
  kGoalKick,
};

inline constexpr int kNumActionTypes = 19;

// All actions in declaration order.
const std::array<ActionType, kNumActionTypes>& all_action_types();

std::string_view to_string(ActionType action);

// Throws ParseError naming the token for anything outside the closed set.
ActionType parse_action_type(std::string_view token);

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

double distance(const Point& a, const Point& b);

struct EventFlags {
  bool effective_attack = false;
  bool ball_recovery = false;
  bool goal = false;
  bool operator==(const EventFlags&) const = default;
};

struct Event {
  int event_id = 0;
  int period = 1;
  double t_start = 0.0;
  double t_end = 0.0;
  ActionType action = ActionType::kPass;
  int team_id = 0;
  int player_id = 0;
  Point ball_start;
  Point ball_end;
  EventFlags flags;

  double duration() const { return t_end - t_start; }
  bool operator==(const Event&) const = default;
};

// Total order used for every event stream: (period, t_start, event_id).
bool event_order_less(const Event& a, const Event& b);

struct PlayerPosition {
  int team_id = 0;
  int player_id = 0;
  Point xy;
  bool operator==(const PlayerPosition&) const = default;
};

struct TrackingFrame {
  int period = 1;
  double t = 0.0;
  std::vector<PlayerPosition> players;
  Point ball;
  bool operator==(const TrackingFrame&) const = default;
};

struct MatchRecord {
  int match_id = 0;
  int week = 1;
  int home_team_id = 0;
  int away_team_id = 0;
  int home_goals = 0;
  int away_goals = 0;
  std::vector<Event> events;
  std::vector<TrackingFrame> frames;

  int opponent_of(int team_id) const {
    return team_id == home_team_id ? away_team_id : home_team_id;
  }
  bool operator==(const MatchRecord&) const = default;
};

struct Team {
  int team_id = 0;
  std::string name;
  int season_goals = 0;
  bool operator==(const Team&) const = default;
};

struct Corpus {
  std::vector<MatchRecord> matches;
  std::map<int, Team> teams;
  bool operator==(const Corpus&) const = default;
};

// Look-ahead targets of one event.
struct Labels {
  bool recovery = false;
  bool attacked = false;
  bool scores = false;
  bool concedes = false;
  bool operator==(const Labels&) const = default;
};

using LabelSet = std::vector<Labels>;

// One side of a game state: event plus the frame aligned to it, both in the
// frame where the state's attacking team plays toward x = 105.
struct StateEvent {
  Event event;
  TrackingFrame frame;
};

struct GameState {
  StateEvent current;
  std::optional<StateEvent> previous;
  // Event i-2; only its start point and team feed the a1 block.
  std::optional<Event> before_previous;
  int attacking_team = 0;
  int defending_team = 0;
  int opponent_season_goals = 0;
};

// Stadium frame: the home team attacks toward x = 105 in period 1 and
// toward x = 0 in period 2.
bool attacks_toward_positive_x(const MatchRecord& match, int team_id,
                               int period);

// Mirrors a stadium-frame point into `team_id`'s attacking frame.
Point to_attacking_frame(const Point& p, bool toward_positive_x);

struct Violation {
  std::string rule;   // "ordering", "player-count", ...
  std::string where;  // "event 17", "frame 1@10.04"
  std::string detail;
};

// Reports every invariant violation; an empty result means the match is valid.
std::vector<Violation> validate_match(const MatchRecord& match);

}  // namespace vdep

#endif  // VDEP_DOMAIN_H_
