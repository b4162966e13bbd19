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

#include "vdep/valuation.h"

#include <map>

#include "vdep/csv.h"
#include "vdep/error.h"

namespace vdep::valuation {

double estimate_c(long recovery_positives, long attacked_positives) {
  if (recovery_positives <= 0 || attacked_positives <= 0) {
    throw UndefinedMetricError(
        "C needs positive recovery and attacked counts, got " +
        std::to_string(recovery_positives) + " and " +
        std::to_string(attacked_positives));
  }
  return static_cast<double>(recovery_positives) /
         static_cast<double>(attacked_positives);
}

double estimate_c(const LabelSet& training_labels) {
  long rec = 0;
  long att = 0;
  for (const Labels& l : training_labels) {
    rec += l.recovery;
    att += l.attacked;
  }
  return estimate_c(rec, att);
}

std::vector<ValuedEvent> value_events(const MatchRecord& match,
                                      std::span<const EventProbabilities> probs,
                                      double c) {
  if (probs.size() != match.events.size()) {
    throw DimensionError("probabilities do not match the event stream");
  }
  std::vector<ValuedEvent> out;
  out.reserve(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const Event& e = match.events[i];
    const EventProbabilities& p = probs[i];
    ValuedEvent v;
    v.match_id = match.match_id;
    v.event_id = e.event_id;
    v.acting_team = e.team_id;
    v.defending_team = match.opponent_of(e.team_id);
    v.p = p;
    v.c = c;
    v.v_vdep = vdep_value(p.recoveries, p.attacked, c);

    double prev_scores = 0.0;
    double prev_concedes = 0.0;
    if (i > 0 && match.events[i - 1].period == e.period) {
      const EventProbabilities& q = probs[i - 1];
      // Switch perspective when the previous state belongs to the opponent.
      const bool same_team = match.events[i - 1].team_id == e.team_id;
      prev_scores = same_team ? q.scores : q.concedes;
      prev_concedes = same_team ? q.concedes : q.scores;
    }
    v.v_vaep = (p.scores - prev_scores) - (p.concedes - prev_concedes);
    out.push_back(v);
  }
  return out;
}

TeamMatchValue aggregate_team_match(std::span<const ValuedEvent> events,
                                    int team_id, int match_id) {
  TeamMatchValue out;
  out.team_id = team_id;
  out.match_id = match_id;
  double sum_vdep = 0.0;
  double sum_rec = 0.0;
  double sum_att = 0.0;
  for (const ValuedEvent& v : events) {
    if (v.match_id != match_id) continue;
    if (v.defending_team == team_id) {
      ++out.m;
      out.c = v.c;
      sum_vdep += v.v_vdep;
      sum_rec += v.p.recoveries;
      sum_att += v.p.attacked;
    } else if (v.acting_team == team_id) {
      out.s_vaep += v.v_vaep;
      out.s_scores += v.p.scores;
      out.s_concedes += v.p.concedes;
    }
  }
  if (out.m == 0) {
    throw Error("team " + std::to_string(team_id) +
                " has no defending events in match " +
                std::to_string(match_id));
  }
  const double m = static_cast<double>(out.m);
  out.r_vdep = sum_vdep / m;
  out.r_recoveries = sum_rec / m;
  out.r_attacked = sum_att / m;
  return out;
}

SeasonTable aggregate_team_season(std::span<const TeamMatchValue> matches,
                                  const std::map<int, Team>& teams) {
  std::map<int, TeamSeasonValue> acc;
  for (const TeamMatchValue& m : matches) {
    TeamSeasonValue& t = acc[m.team_id];
    t.team_id = m.team_id;
    ++t.n_matches;
    t.r_recoveries += m.r_recoveries;
    t.r_attacked += m.r_attacked;
    t.r_vdep += m.r_vdep;
    t.s_vaep += m.s_vaep;
  }
  SeasonTable table;
  table.league.name = "league";
  for (auto& [id, t] : acc) {
    const double n = static_cast<double>(t.n_matches);
    t.r_recoveries /= n;
    t.r_attacked /= n;
    t.r_vdep /= n;
    t.s_vaep /= n;
    if (const auto it = teams.find(id); it != teams.end()) {
      t.name = it->second.name;
    }
    table.league.n_matches += t.n_matches;
    table.league.r_recoveries += t.r_recoveries;
    table.league.r_attacked += t.r_attacked;
    table.league.r_vdep += t.r_vdep;
    table.league.s_vaep += t.s_vaep;
    table.teams.push_back(t);
  }
  if (!table.teams.empty()) {
    const double n = static_cast<double>(table.teams.size());
    table.league.r_recoveries /= n;
    table.league.r_attacked /= n;
    table.league.r_vdep /= n;
    table.league.s_vaep /= n;
  }
  return table;
}

std::string quadrant(const TeamSeasonValue& team,
                     const TeamSeasonValue& league) {
  const bool high_return = team.r_recoveries >= league.r_recoveries;
  const bool high_risk = team.r_attacked >= league.r_attacked;
  return std::string(high_return ? "high-return" : "low-return") + "/" +
         (high_risk ? "high-risk" : "low-risk");
}

void write_valued_events_csv(const std::filesystem::path& path,
                             std::span<const ValuedEvent> events) {
  csv::Writer w(path);
  w.row("match_id", "event_id", "acting_team", "defending_team",
        "p_recoveries", "p_attacked", "p_scores", "p_concedes", "c", "v_vdep",
        "v_vaep");
  for (const ValuedEvent& v : events) {
    w.row(v.match_id, v.event_id, v.acting_team, v.defending_team,
          v.p.recoveries, v.p.attacked, v.p.scores, v.p.concedes, v.c,
          v.v_vdep, v.v_vaep);
  }
}

void write_team_match_csv(const std::filesystem::path& path,
                          std::span<const TeamMatchValue> rows) {
  csv::Writer w(path);
  w.row("team_id", "match_id", "m", "c", "r_vdep", "r_recoveries",
        "r_attacked", "s_vaep", "s_scores", "s_concedes");
  for (const TeamMatchValue& r : rows) {
    w.row(r.team_id, r.match_id, r.m, r.c, r.r_vdep, r.r_recoveries,
          r.r_attacked, r.s_vaep, r.s_scores, r.s_concedes);
  }
}

std::vector<TeamMatchValue> read_team_match_csv(
    const std::filesystem::path& path) {
  csv::Reader reader(path);
  const std::size_t c_team = reader.column("team_id");
  const std::size_t c_match = reader.column("match_id");
  const std::size_t c_m = reader.column("m");
  const std::size_t c_c = reader.column("c");
  const std::size_t c_vdep = reader.column("r_vdep");
  const std::size_t c_rec = reader.column("r_recoveries");
  const std::size_t c_att = reader.column("r_attacked");
  const std::size_t c_vaep = reader.column("s_vaep");
  const std::size_t c_sc = reader.column("s_scores");
  const std::size_t c_co = reader.column("s_concedes");
  std::vector<TeamMatchValue> out;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    const std::size_t ln = reader.line_number();
    if (f.size() != reader.header().size()) {
      throw ParseError("wrong column count", ln);
    }
    TeamMatchValue r;
    r.team_id = csv::parse_int(f[c_team], ln);
    r.match_id = csv::parse_int(f[c_match], ln);
    r.m = csv::parse_int(f[c_m], ln);
    r.c = csv::parse_double(f[c_c], ln);
    r.r_vdep = csv::parse_double(f[c_vdep], ln);
    r.r_recoveries = csv::parse_double(f[c_rec], ln);
    r.r_attacked = csv::parse_double(f[c_att], ln);
    r.s_vaep = csv::parse_double(f[c_vaep], ln);
    r.s_scores = csv::parse_double(f[c_sc], ln);
    r.s_concedes = csv::parse_double(f[c_co], ln);
    out.push_back(r);
  }
  return out;
}

void write_team_season_csv(const std::filesystem::path& path,
                           const SeasonTable& table) {
  csv::Writer w(path);
  w.row("team_id", "name", "n_matches", "r_recoveries", "r_attacked",
        "r_vdep", "s_vaep");
  for (const TeamSeasonValue& t : table.teams) {
    w.row(t.team_id, t.name, t.n_matches, t.r_recoveries, t.r_attacked,
          t.r_vdep, t.s_vaep);
  }
  const TeamSeasonValue& l = table.league;
  w.row("league", "league", l.n_matches, l.r_recoveries, l.r_attacked,
        l.r_vdep, l.s_vaep);
}

}  // namespace vdep::valuation
