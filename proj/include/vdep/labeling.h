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

// Look-ahead labels. Every label of event i inspects events i+1 .. i+k only,
// truncated at the end of the stream and at period boundaries.

#ifndef VDEP_LABELING_H_
#define VDEP_LABELING_H_

#include <cstddef>
#include <span>
#include <utility>

#include "vdep/domain.h"

namespace vdep {

inline constexpr int kDefaultKVdep = 5;
inline constexpr int kDefaultKVaep = 10;

struct LabelConfig {
  int k_vdep = kDefaultKVdep;
  int k_vaep = kDefaultKVaep;
};

// Recovery by the team defending at event i (the team not acting at i).
bool label_recovery(std::span<const Event> events, std::size_t i, int k);

// Effective attack by the team acting at event i.
bool label_attacked(std::span<const Event> events, std::size_t i, int k);

// (scores, concedes) from the perspective of the team acting at event i.
// Own goals are credited to the opponent of the acting player.
std::pair<bool, bool> label_goals(std::span<const Event> events, std::size_t i,
                                  int k = kDefaultKVaep);

// Team credited with the goal of event `e` (which must carry the goal flag),
// expressed relative to `perspective_team`: true if that team scored.
bool goal_credited_to(const Event& e, int perspective_team);

LabelSet label_events(std::span<const Event> events,
                      const LabelConfig& cfg = {});

}  // namespace vdep

#endif  // VDEP_LABELING_H_
