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

// The 139-dimensional game-state encoding.
//
// Layout: [event block a0 (36) | event block a1 (36) | off-ball block a0 (66)
// | opponent_season_goals (1)]. Event block: action one-hot (19), event_id,
// start/end time and duration, ball start/end xy, ball displacement (dx, dy,
// norm), displacement from the previous event's start (dx, dy, norm), distance
// and angle from the ball to the attacked goal, possession-change flag.
// Off-ball block: offense then defense players sorted by distance to the
// ball, x/y per player (44) then distance per player (22).

#ifndef VDEP_FEATURES_H_
#define VDEP_FEATURES_H_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "vdep/domain.h"

namespace vdep {

inline constexpr int kEventBlockSize = 36;
inline constexpr int kOffballBlockSize = 66;
inline constexpr int kNumFeatures =
    2 * kEventBlockSize + kOffballBlockSize + 1;
static_assert(kNumFeatures == 139);

inline constexpr Point kAttackedGoal{kPitchLength, kPitchWidth / 2.0};

using EventBlock = Eigen::Matrix<double, kEventBlockSize, 1>;
using OffballBlock = Eigen::Matrix<double, kOffballBlockSize, 1>;
using FeatureVector = Eigen::Matrix<double, kNumFeatures, 1>;
// One row per event.
using FeatureMatrix = Eigen::MatrixXd;

// Shared, index-aligned name table.
const std::vector<std::string>& feature_names();
// Throws std::out_of_range for unknown names.
int feature_index(std::string_view name);

// `e` and `prev` must already be in the attacking frame. `prev` may be null.
EventBlock build_event_block(const Event& e, const Event* prev);

// Throws std::logic_error if the frame lacks 11 players per side.
OffballBlock build_offball_block(const TrackingFrame& frame,
                                 int possession_team);

FeatureVector build_state_vector(const GameState& state);

// Game states of every event of `match`, normalized so the acting team of
// each state attacks toward x = 105.
std::vector<GameState> build_game_states(const MatchRecord& match,
                                         const std::map<int, Team>& teams);

FeatureMatrix build_match_features(const MatchRecord& match,
                                   const std::map<int, Team>& teams);

// Matches stacked in corpus order.
FeatureMatrix build_corpus_features(const Corpus& corpus);

// features.csv: name,index.
void write_feature_table(const std::filesystem::path& path);

}  // namespace vdep

#endif  // VDEP_FEATURES_H_
