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

// Exhaustive window scan used as an independent check of the labeler.

#ifndef VDEP_TESTS_LABEL_ORACLE_H_
#define VDEP_TESTS_LABEL_ORACLE_H_

#include <cstddef>
#include <vector>

#include "vdep/domain.h"
#include "vdep/labeling.h"

namespace vdep::oracle {

struct Scan {
  bool recovery = false;
  bool attacked = false;
  bool scores = false;
  bool concedes = false;
};

// Visits every later event and keeps those within k steps and in the same
// period as event i.
inline Scan scan(const std::vector<Event>& ev, std::size_t i, int k) {
  Scan s;
  const int team = ev[i].team_id;
  for (std::size_t j = 0; j < ev.size(); ++j) {
    if (j <= i || j - i > static_cast<std::size_t>(k)) continue;
    bool same_period = true;
    for (std::size_t m = i; m <= j; ++m) same_period &= ev[m].period == ev[i].period;
    if (!same_period) continue;
    const Event& e = ev[j];
    if (e.flags.ball_recovery && e.team_id != team) s.recovery = true;
    if (e.flags.effective_attack && e.team_id == team) s.attacked = true;
    if (e.flags.goal) {
      const bool own = e.action == ActionType::kOwnGoal;
      const bool actor_is_team = e.team_id == team;
      const bool team_scored = own ? !actor_is_team : actor_is_team;
      (team_scored ? s.scores : s.concedes) = true;
    }
  }
  return s;
}

inline Labels labels(const std::vector<Event>& ev, std::size_t i,
                     const LabelConfig& cfg) {
  const Scan a = scan(ev, i, cfg.k_vdep);
  const Scan b = scan(ev, i, cfg.k_vaep);
  return {a.recovery, a.attacked, b.scores, b.concedes};
}

}  // namespace vdep::oracle

#endif  // VDEP_TESTS_LABEL_ORACLE_H_
