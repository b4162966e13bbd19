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

#include "vdep/labeling.h"

#include <algorithm>

#include "vdep/error.h"

namespace vdep {
namespace {

void check_window(std::span<const Event> events, std::size_t i, int k) {
  if (i >= events.size()) throw Error("label index out of range");
  if (k < 1) throw Error("label window k must be >= 1");
}

// Calls `hit(j)` for j in the window of i; returns true on the first hit.
template <typename Pred>
bool any_in_window(std::span<const Event> events, std::size_t i, int k,
                   Pred hit) {
  const std::size_t last =
      std::min(events.size() - 1, i + static_cast<std::size_t>(k));
  for (std::size_t j = i + 1; j <= last; ++j) {
    if (events[j].period != events[i].period) return false;
    if (hit(events[j])) return true;
  }
  return false;
}

}  // namespace

bool goal_credited_to(const Event& e, int perspective_team) {
  const bool actor_is_perspective = e.team_id == perspective_team;
  return e.action == ActionType::kOwnGoal ? !actor_is_perspective
                                          : actor_is_perspective;
}

bool label_recovery(std::span<const Event> events, std::size_t i, int k) {
  check_window(events, i, k);
  const int attacker = events[i].team_id;
  return any_in_window(events, i, k, [attacker](const Event& e) {
    return e.flags.ball_recovery && e.team_id != attacker;
  });
}

bool label_attacked(std::span<const Event> events, std::size_t i, int k) {
  check_window(events, i, k);
  const int attacker = events[i].team_id;
  return any_in_window(events, i, k, [attacker](const Event& e) {
    return e.flags.effective_attack && e.team_id == attacker;
  });
}

std::pair<bool, bool> label_goals(std::span<const Event> events, std::size_t i,
                                  int k) {
  check_window(events, i, k);
  const int team = events[i].team_id;
  const bool scores = any_in_window(events, i, k, [team](const Event& e) {
    return e.flags.goal && goal_credited_to(e, team);
  });
  const bool concedes = any_in_window(events, i, k, [team](const Event& e) {
    return e.flags.goal && !goal_credited_to(e, team);
  });
  return {scores, concedes};
}

LabelSet label_events(std::span<const Event> events, const LabelConfig& cfg) {
  LabelSet out(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    out[i].recovery = label_recovery(events, i, cfg.k_vdep);
    out[i].attacked = label_attacked(events, i, cfg.k_vdep);
    const auto [scores, concedes] = label_goals(events, i, cfg.k_vaep);
    out[i].scores = scores;
    out[i].concedes = concedes;
  }
  return out;
}

}  // namespace vdep
