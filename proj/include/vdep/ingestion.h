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

// Readers and writers for the on-disk corpus formats.
//
//   events.jsonl   one JSON object per line: match_id, event_id, period,
//                  t_start, t_end, action, team_id, player_id, ball_start_x,
//                  ball_start_y, ball_end_x, ball_end_y, flags (array of
//                  "effective_attack" | "ball_recovery" | "goal").
//   tracking.csv   match_id,period,t,entity_id,team_id,x,y ("ball" entity).
//   teams.csv      team_id,name,season_goals
//   matches.csv    match_id,week,home_team_id,away_team_id,home_goals,
//                  away_goals

#ifndef VDEP_INGESTION_H_
#define VDEP_INGESTION_H_

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <string_view>
#include <utility>
#include <vector>

#include "vdep/domain.h"

namespace vdep {

// Maximum |t_frame - t_event| accepted by the aligner, seconds.
inline constexpr double kAlignmentTolerance = 0.5;

struct MatchEvent {
  int match_id = 0;
  Event event;
  bool operator==(const MatchEvent&) const = default;
};

MatchEvent parse_event_line(std::string_view line, std::size_t line_no);

// Sorted by (match_id, period, t_start, event_id).
std::vector<MatchEvent> parse_events(std::istream& in);
std::vector<MatchEvent> parse_events(const std::filesystem::path& path);

// Frames per match, sorted by (period, t).
std::map<int, std::vector<TrackingFrame>> parse_tracking(
    const std::filesystem::path& path);

std::map<int, Team> parse_teams(const std::filesystem::path& path);

// Match metadata only; events and frames are empty.
std::vector<MatchRecord> parse_matches(const std::filesystem::path& path);

// Index into `frames` of the frame paired with each event: minimal
// |t_frame - t_start| within the event's period, ties to the earlier frame.
// Throws AlignmentError listing every event farther than the tolerance.
std::vector<std::size_t> align_frame_indices(
    const std::vector<Event>& events, const std::vector<TrackingFrame>& frames,
    double tolerance = kAlignmentTolerance);

std::vector<std::pair<Event, TrackingFrame>> align_tracking(
    const std::vector<Event>& events, const std::vector<TrackingFrame>& frames,
    double tolerance = kAlignmentTolerance);

struct CorpusFiles {
  std::filesystem::path events;
  std::filesystem::path tracking;
  std::filesystem::path teams;
  std::filesystem::path matches;

  static CorpusFiles in_directory(const std::filesystem::path& dir);
};

// Parses, assembles and validates a corpus. Throws SchemaError listing all
// violations when any match or team reference is invalid, and AlignmentError
// when an event has no frame within tolerance.
Corpus load_corpus(const CorpusFiles& files);

// Every violation across the corpus, including unknown team references.
std::vector<Violation> validate_corpus(const Corpus& corpus);

void write_events(const std::filesystem::path& path, const Corpus& corpus);
void write_tracking(const std::filesystem::path& path, const Corpus& corpus);
void write_teams(const std::filesystem::path& path, const Corpus& corpus);
void write_matches(const std::filesystem::path& path, const Corpus& corpus);
void write_corpus(const std::filesystem::path& dir, const Corpus& corpus);

}  // namespace vdep

#endif  // VDEP_INGESTION_H_
