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

#include "vdep/ingestion.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <tuple>

#include "json.hpp"
#include "vdep/csv.h"
#include "vdep/error.h"

namespace vdep {
namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key, std::size_t line_no) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(std::string("missing field \"") + key + "\"", line_no);
  }
  return *it;
}

int require_int(const json& obj, const char* key, std::size_t line_no) {
  const json& v = require(obj, key, line_no);
  if (!v.is_number_integer()) {
    throw ParseError(std::string("field \"") + key + "\" must be an integer",
                     line_no);
  }
  return v.get<int>();
}

double require_number(const json& obj, const char* key, std::size_t line_no) {
  const json& v = require(obj, key, line_no);
  if (!v.is_number()) {
    throw ParseError(std::string("field \"") + key + "\" must be a number",
                     line_no);
  }
  return v.get<double>();
}

std::string event_line(int match_id, const Event& e) {
  using csv::format_double;
  std::string flags;
  const auto add_flag = [&flags](bool on, const char* name) {
    if (!on) return;
    if (!flags.empty()) flags += ",";
    flags += std::string("\"") + name + "\"";
  };
  add_flag(e.flags.effective_attack, "effective_attack");
  add_flag(e.flags.ball_recovery, "ball_recovery");
  add_flag(e.flags.goal, "goal");
  std::string out = "{\"match_id\":" + std::to_string(match_id);
  out += ",\"event_id\":" + std::to_string(e.event_id);
  out += ",\"period\":" + std::to_string(e.period);
  out += ",\"t_start\":" + format_double(e.t_start);
  out += ",\"t_end\":" + format_double(e.t_end);
  out += ",\"action\":\"" + std::string(to_string(e.action)) + "\"";
  out += ",\"team_id\":" + std::to_string(e.team_id);
  out += ",\"player_id\":" + std::to_string(e.player_id);
  out += ",\"ball_start_x\":" + format_double(e.ball_start.x);
  out += ",\"ball_start_y\":" + format_double(e.ball_start.y);
  out += ",\"ball_end_x\":" + format_double(e.ball_end.x);
  out += ",\"ball_end_y\":" + format_double(e.ball_end.y);
  out += ",\"flags\":[" + flags + "]}";
  return out;
}

}  // namespace

MatchEvent parse_event_line(std::string_view line, std::size_t line_no) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed record: ") + e.what(), line_no);
  }
  if (!obj.is_object()) throw ParseError("record is not an object", line_no);

  MatchEvent out;
  out.match_id = require_int(obj, "match_id", line_no);
  Event& e = out.event;
  e.event_id = require_int(obj, "event_id", line_no);
  e.period = require_int(obj, "period", line_no);
  e.t_start = require_number(obj, "t_start", line_no);
  e.t_end = require_number(obj, "t_end", line_no);
  const json& action = require(obj, "action", line_no);
  if (!action.is_string()) throw ParseError("action must be a string", line_no);
  try {
    e.action = parse_action_type(action.get<std::string>());
  } catch (const ParseError& err) {
    throw ParseError(err.what(), line_no);
  }
  e.team_id = require_int(obj, "team_id", line_no);
  e.player_id = require_int(obj, "player_id", line_no);
  e.ball_start = {require_number(obj, "ball_start_x", line_no),
                  require_number(obj, "ball_start_y", line_no)};
  e.ball_end = {require_number(obj, "ball_end_x", line_no),
                require_number(obj, "ball_end_y", line_no)};
  const json& flags = require(obj, "flags", line_no);
  if (!flags.is_array()) throw ParseError("flags must be an array", line_no);
  for (const json& f : flags) {
    const std::string name = f.is_string() ? f.get<std::string>() : "";
    if (name == "effective_attack") {
      e.flags.effective_attack = true;
    } else if (name == "ball_recovery") {
      e.flags.ball_recovery = true;
    } else if (name == "goal") {
      e.flags.goal = true;
    } else {
      throw ParseError("unknown flag " + f.dump(), line_no);
    }
  }
  return out;
}

std::vector<MatchEvent> parse_events(std::istream& in) {
  std::vector<MatchEvent> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(parse_event_line(line, line_no));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const MatchEvent& a, const MatchEvent& b) {
                     if (a.match_id != b.match_id) {
                       return a.match_id < b.match_id;
                     }
                     return event_order_less(a.event, b.event);
                   });
  return out;
}

std::vector<MatchEvent> parse_events(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return parse_events(in);
}

std::map<int, std::vector<TrackingFrame>> parse_tracking(
    const std::filesystem::path& path) {
  csv::Reader reader(path);
  const std::size_t c_match = reader.column("match_id");
  const std::size_t c_period = reader.column("period");
  const std::size_t c_t = reader.column("t");
  const std::size_t c_entity = reader.column("entity_id");
  const std::size_t c_team = reader.column("team_id");
  const std::size_t c_x = reader.column("x");
  const std::size_t c_y = reader.column("y");
  const std::size_t n_cols = reader.header().size();

  std::map<std::tuple<int, int, double>, TrackingFrame> frames;
  std::map<std::tuple<int, int, double>, bool> has_ball;
  TrackingFrame* current = nullptr;
  std::tuple<int, int, double> current_key{-1, -1, -1.0};

  std::vector<std::string_view> f;
  while (reader.next(f)) {
    const std::size_t ln = reader.line_number();
    if (f.size() != n_cols) {
      throw ParseError("expected " + std::to_string(n_cols) + " columns", ln);
    }
    const std::tuple<int, int, double> key{csv::parse_int(f[c_match], ln),
                                           csv::parse_int(f[c_period], ln),
                                           csv::parse_double(f[c_t], ln)};
    if (current == nullptr || key != current_key) {
      current = &frames[key];
      current->period = std::get<1>(key);
      current->t = std::get<2>(key);
      current_key = key;
    }
    const Point xy{csv::parse_double(f[c_x], ln),
                   csv::parse_double(f[c_y], ln)};
    if (f[c_entity] == "ball") {
      if (has_ball[key]) throw ParseError("duplicate ball row", ln);
      has_ball[key] = true;
      current->ball = xy;
    } else {
      current->players.push_back({csv::parse_int(f[c_team], ln),
                                  csv::parse_int(f[c_entity], ln), xy});
    }
  }

  std::map<int, std::vector<TrackingFrame>> out;
  for (auto& [key, frame] : frames) {
    if (!has_ball[key]) {
      throw SchemaError("frame " + std::to_string(std::get<1>(key)) + "@" +
                        csv::format_double(std::get<2>(key)) + " of match " +
                        std::to_string(std::get<0>(key)) + " has no ball row");
    }
    out[std::get<0>(key)].push_back(std::move(frame));
  }
  return out;
}

std::map<int, Team> parse_teams(const std::filesystem::path& path) {
  csv::Reader reader(path);
  const std::size_t c_id = reader.column("team_id");
  const std::size_t c_name = reader.column("name");
  const std::size_t c_goals = reader.column("season_goals");
  std::map<int, Team> out;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    const std::size_t ln = reader.line_number();
    if (f.size() != reader.header().size()) {
      throw ParseError("wrong column count", ln);
    }
    Team t{csv::parse_int(f[c_id], ln), std::string(f[c_name]),
           csv::parse_int(f[c_goals], ln)};
    if (!out.emplace(t.team_id, t).second) {
      throw ParseError("duplicate team_id " + std::to_string(t.team_id), ln);
    }
  }
  return out;
}

std::vector<MatchRecord> parse_matches(const std::filesystem::path& path) {
  csv::Reader reader(path);
  const std::size_t c_id = reader.column("match_id");
  const std::size_t c_week = reader.column("week");
  const std::size_t c_home = reader.column("home_team_id");
  const std::size_t c_away = reader.column("away_team_id");
  const std::size_t c_hg = reader.column("home_goals");
  const std::size_t c_ag = reader.column("away_goals");
  std::vector<MatchRecord> out;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    const std::size_t ln = reader.line_number();
    if (f.size() != reader.header().size()) {
      throw ParseError("wrong column count", ln);
    }
    MatchRecord m;
    m.match_id = csv::parse_int(f[c_id], ln);
    m.week = csv::parse_int(f[c_week], ln);
    m.home_team_id = csv::parse_int(f[c_home], ln);
    m.away_team_id = csv::parse_int(f[c_away], ln);
    m.home_goals = csv::parse_int(f[c_hg], ln);
    m.away_goals = csv::parse_int(f[c_ag], ln);
    out.push_back(std::move(m));
  }
  std::sort(out.begin(), out.end(),
            [](const MatchRecord& a, const MatchRecord& b) {
              return a.match_id < b.match_id;
            });
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].match_id == out[i - 1].match_id) {
      throw ParseError("duplicate match_id " +
                       std::to_string(out[i].match_id));
    }
  }
  return out;
}

std::vector<std::size_t> align_frame_indices(
    const std::vector<Event>& events, const std::vector<TrackingFrame>& frames,
    double tolerance) {
  std::vector<std::size_t> out;
  out.reserve(events.size());
  std::vector<int> failed;
  const auto frame_less = [](const TrackingFrame& f, std::pair<int, double> k) {
    return std::tie(f.period, f.t) < std::tie(k.first, k.second);
  };
  for (const Event& e : events) {
    const auto key = std::make_pair(e.period, e.t_start);
    const auto it =
        std::lower_bound(frames.begin(), frames.end(), key, frame_less);
    std::size_t best = frames.size();
    double best_gap = 0.0;
    const auto consider = [&](std::vector<TrackingFrame>::const_iterator c) {
      if (c->period != e.period) return;
      const double gap = std::abs(c->t - e.t_start);
      // Candidates arrive earlier-first, so strict < keeps the earlier frame.
      if (best == frames.size() || gap < best_gap) {
        best = static_cast<std::size_t>(c - frames.begin());
        best_gap = gap;
      }
    };
    if (it != frames.begin()) consider(std::prev(it));
    if (it != frames.end()) consider(it);
    if (best == frames.size() || best_gap > tolerance) {
      failed.push_back(e.event_id);
      out.push_back(0);
      continue;
    }
    out.push_back(best);
  }
  if (!failed.empty()) {
    std::string ids;
    for (std::size_t i = 0; i < failed.size() && i < 20; ++i) {
      ids += (i ? "," : "") + std::to_string(failed[i]);
    }
    if (failed.size() > 20) ids += ",...";
    throw AlignmentError("no tracking frame within " +
                             csv::format_double(tolerance) +
                             " s for events " + ids,
                         std::move(failed));
  }
  return out;
}

std::vector<std::pair<Event, TrackingFrame>> align_tracking(
    const std::vector<Event>& events, const std::vector<TrackingFrame>& frames,
    double tolerance) {
  const auto idx = align_frame_indices(events, frames, tolerance);
  std::vector<std::pair<Event, TrackingFrame>> out;
  out.reserve(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    out.emplace_back(events[i], frames[idx[i]]);
  }
  return out;
}

CorpusFiles CorpusFiles::in_directory(const std::filesystem::path& dir) {
  return {dir / "events.jsonl", dir / "tracking.csv", dir / "teams.csv",
          dir / "matches.csv"};
}

std::vector<Violation> validate_corpus(const Corpus& corpus) {
  std::vector<Violation> out;
  for (const MatchRecord& m : corpus.matches) {
    auto v = validate_match(m);
    for (auto& violation : v) {
      violation.where =
          "match " + std::to_string(m.match_id) + " " + violation.where;
      out.push_back(std::move(violation));
    }
    for (int team : {m.home_team_id, m.away_team_id}) {
      if (corpus.teams.count(team) == 0) {
        out.push_back({"team-table", "match " + std::to_string(m.match_id),
                       "team " + std::to_string(team) + " not in team table"});
      }
    }
  }
  return out;
}

Corpus load_corpus(const CorpusFiles& files) {
  Corpus corpus;
  corpus.teams = parse_teams(files.teams);
  corpus.matches = parse_matches(files.matches);
  auto events = parse_events(files.events);
  auto frames = parse_tracking(files.tracking);

  std::map<int, MatchRecord*> by_id;
  for (MatchRecord& m : corpus.matches) by_id[m.match_id] = &m;
  for (MatchEvent& me : events) {
    const auto it = by_id.find(me.match_id);
    if (it == by_id.end()) {
      throw SchemaError("event " + std::to_string(me.event.event_id) +
                        " references unknown match " +
                        std::to_string(me.match_id));
    }
    it->second->events.push_back(std::move(me.event));
  }
  for (auto& [match_id, list] : frames) {
    const auto it = by_id.find(match_id);
    if (it == by_id.end()) {
      throw SchemaError("tracking references unknown match " +
                        std::to_string(match_id));
    }
    it->second->frames = std::move(list);
  }

  const auto violations = validate_corpus(corpus);
  if (!violations.empty()) {
    std::string msg = std::to_string(violations.size()) + " violation(s):";
    for (std::size_t i = 0; i < violations.size() && i < 20; ++i) {
      const auto& v = violations[i];
      msg += "\n  [" + v.rule + "] " + v.where + ": " + v.detail;
    }
    throw SchemaError(msg);
  }
  for (const MatchRecord& m : corpus.matches) {
    if (m.events.empty()) {
      throw SchemaError("match " + std::to_string(m.match_id) +
                        " has no events");
    }
    align_frame_indices(m.events, m.frames);
  }
  return corpus;
}

void write_events(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  for (const MatchRecord& m : corpus.matches) {
    for (const Event& e : m.events) out << event_line(m.match_id, e) << '\n';
  }
}

void write_tracking(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << "match_id,period,t,entity_id,team_id,x,y\n";
  for (const MatchRecord& m : corpus.matches) {
    const std::string mid = std::to_string(m.match_id);
    for (const TrackingFrame& f : m.frames) {
      const std::string prefix = mid + "," + std::to_string(f.period) + "," +
                                 csv::format_double(f.t) + ",";
      for (const PlayerPosition& p : f.players) {
        out << prefix << p.player_id << ',' << p.team_id << ','
            << csv::format_double(p.xy.x) << ','
            << csv::format_double(p.xy.y) << '\n';
      }
      out << prefix << "ball,," << csv::format_double(f.ball.x) << ','
          << csv::format_double(f.ball.y) << '\n';
    }
  }
}

void write_teams(const std::filesystem::path& path, const Corpus& corpus) {
  csv::Writer w(path);
  w.row("team_id", "name", "season_goals");
  for (const auto& [id, team] : corpus.teams) {
    w.row(id, team.name, team.season_goals);
  }
}

void write_matches(const std::filesystem::path& path, const Corpus& corpus) {
  csv::Writer w(path);
  w.row("match_id", "week", "home_team_id", "away_team_id", "home_goals",
        "away_goals");
  for (const MatchRecord& m : corpus.matches) {
    w.row(m.match_id, m.week, m.home_team_id, m.away_team_id, m.home_goals,
          m.away_goals);
  }
}

void write_corpus(const std::filesystem::path& dir, const Corpus& corpus) {
  std::filesystem::create_directories(dir);
  const auto files = CorpusFiles::in_directory(dir);
  write_events(files.events, corpus);
  write_tracking(files.tracking, corpus);
  write_teams(files.teams, corpus);
  write_matches(files.matches, corpus);
}

}  // namespace vdep
