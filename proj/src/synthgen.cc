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

#include "vdep/synthgen.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "vdep/csv.h"
#include "vdep/error.h"
#include "vdep/ingestion.h"

namespace vdep::synth {
namespace {

// Mean possession length in events.
constexpr double kMeanPossession = 5.5;
constexpr int kDrawsPerEvent = 5;
constexpr int kTicksPerSecond = 30;
constexpr int kFramesPerSecond = 25;

enum class StreamKind : unsigned { kTeams = 1, kFlags = 2, kGeometry = 3 };

// Uniform and normal variates built directly on the engine's bits so that
// output does not depend on the standard library's distribution code.
class Stream {
 public:
  Stream(std::uint64_t seed, int match_id, StreamKind kind) {
    std::seed_seq seq{static_cast<unsigned>(seed & 0xffffffffu),
                      static_cast<unsigned>(seed >> 32),
                      static_cast<unsigned>(match_id),
                      static_cast<unsigned>(kind)};
    engine_.seed(seq);
  }

  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  template <std::size_t N>
  int pick(const std::array<double, N>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform() * total;
    for (std::size_t i = 0; i < N; ++i) {
      if (u < weights[i]) return static_cast<int>(i);
      u -= weights[i];
    }
    return static_cast<int>(N - 1);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct Strength {
  double attack = 0.0;
  double defense = 0.0;
};

enum class Start { kKickoff, kRecovery, kRestart, kContinue };

struct FlagEvent {
  int team = 0;
  int period = 1;
  Start start = Start::kContinue;
  EventFlags flags;
};

struct Fixture {
  int match_id = 0;
  int week = 0;
  int home = 0;
  int away = 0;
  std::vector<double> draws;  // kDrawsPerEvent per event slot
};

double clamp01(double p) { return std::clamp(p, 0.0, 0.999); }

// One match of the possession process. Draw slots are indexed by event
// position so that nearby parameter values reuse the same randomness.
std::vector<FlagEvent> run_process(const Fixture& fx, int n_events,
                                   const ProcessParams& pp,
                                   const std::map<int, Strength>& strengths) {
  std::vector<FlagEvent> out(static_cast<std::size_t>(n_events));
  const double end_prob = 1.0 / kMeanPossession;
  const int first_half = (n_events + 1) / 2;
  const auto draw = [&fx](int e, int slot) {
    return fx.draws[static_cast<std::size_t>(e) * kDrawsPerEvent + slot];
  };

  for (int period = 1; period <= 2; ++period) {
    const int begin = period == 1 ? 0 : first_half;
    const int end = period == 1 ? first_half : n_events;
    int team = period == 1 ? fx.home : fx.away;
    Start start = Start::kKickoff;
    int e = begin;
    while (e < end) {
      const int opp = team == fx.home ? fx.away : fx.home;
      const double edge =
          strengths.at(team).attack - strengths.at(opp).defense;
      const double goal_p = std::min(pp.goal_prob * std::exp(0.6 * edge), 0.5);
      const double rec_p = clamp01(pp.recovery_share * std::exp(-0.4 * edge));
      const double att_p = clamp01(pp.attack_prob * std::exp(0.4 * edge));

      bool goal = draw(e, 2) < goal_p;
      int length = 1;
      while (e + length < end && draw(e + length - 1, 0) >= end_prob) ++length;
      if (goal) {
        const double whole = std::floor(pp.goal_min_length);
        const int min_len = static_cast<int>(whole) +
                            (draw(e, 4) < pp.goal_min_length - whole ? 1 : 0);
        length = std::max(length, min_len);
        if (e + length > end) {
          goal = false;
          length = end - e;
        }
      }
      for (int j = e; j < e + length; ++j) {
        FlagEvent& fe = out[static_cast<std::size_t>(j)];
        fe.team = team;
        fe.period = period;
        fe.start = j == e ? start : Start::kContinue;
        fe.flags.effective_attack = draw(j, 1) < att_p;
        fe.flags.ball_recovery = j == e && start == Start::kRecovery;
      }
      if (goal) {
        FlagEvent& last = out[static_cast<std::size_t>(e + length - 1)];
        last.flags.goal = true;
        last.flags.effective_attack = true;
        start = Start::kKickoff;
      } else if (draw(e, 3) < rec_p) {
        start = Start::kRecovery;
      } else {
        start = Start::kRestart;
      }
      team = opp;
      e += length;
    }
  }
  return out;
}

// Window scan over the flag stream; independent of the labeling module.
LabelSet scan_labels(const std::vector<FlagEvent>& ev, int k_vdep,
                     int k_vaep) {
  const std::size_t n = ev.size();
  LabelSet out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int k = std::max(k_vdep, k_vaep);
    for (std::size_t j = i + 1; j < n && j <= i + static_cast<std::size_t>(k);
         ++j) {
      if (ev[j].period != ev[i].period) break;
      const bool same = ev[j].team == ev[i].team;
      if (j <= i + static_cast<std::size_t>(k_vdep)) {
        if (ev[j].flags.ball_recovery && !same) out[i].recovery = true;
        if (ev[j].flags.effective_attack && same) out[i].attacked = true;
      }
      if (j <= i + static_cast<std::size_t>(k_vaep) && ev[j].flags.goal) {
        (same ? out[i].scores : out[i].concedes) = true;
      }
    }
  }
  return out;
}

struct Tally {
  long events = 0;
  long recovery = 0;
  long attacked = 0;
  long scores = 0;
  long concedes = 0;

  void add(const LabelSet& labels) {
    events += static_cast<long>(labels.size());
    for (const Labels& l : labels) {
      recovery += l.recovery;
      attacked += l.attacked;
      scores += l.scores;
      concedes += l.concedes;
    }
  }
  LabelRates rates() const {
    const double n = static_cast<double>(std::max(events, 1L));
    return {recovery / n, attacked / n, scores / n, concedes / n};
  }
};

LabelRates corpus_rates(const std::vector<Fixture>& fixtures,
                        const GenConfig& cfg, const ProcessParams& pp,
                        const std::map<int, Strength>& strengths) {
  Tally tally;
  for (const Fixture& fx : fixtures) {
    tally.add(scan_labels(
        run_process(fx, cfg.events_per_match, pp, strengths), cfg.k_vdep,
        cfg.k_vaep));
  }
  return tally.rates();
}

ProcessParams calibrate(const std::vector<Fixture>& fixtures,
                        const GenConfig& cfg,
                        const std::map<int, Strength>& strengths) {
  ProcessParams pp;
  struct Knob {
    double ProcessParams::*param;
    double LabelRates::*rate;
    double target;
    double lo;
    double hi;
    bool increasing;
  };
  const std::array<Knob, 4> knobs = {{
      {&ProcessParams::recovery_share, &LabelRates::recovery,
       cfg.recovery_rate, 0.0, 1.0, true},
      {&ProcessParams::attack_prob, &LabelRates::attacked, cfg.attacked_rate,
       0.0, 1.0, true},
      {&ProcessParams::goal_prob, &LabelRates::scores, cfg.scores_rate, 0.0,
       0.5, true},
      {&ProcessParams::goal_min_length, &LabelRates::concedes,
       cfg.concedes_rate, 1.0, 2.0 * cfg.k_vaep, false},
  }};
  constexpr int kSweeps = 4;
  constexpr int kSteps = 24;
  for (int sweep = 0; sweep < kSweeps; ++sweep) {
    for (const Knob& knob : knobs) {
      double lo = knob.lo;
      double hi = knob.hi;
      for (int step = 0; step < kSteps; ++step) {
        pp.*knob.param = 0.5 * (lo + hi);
        const double got = corpus_rates(fixtures, cfg, pp, strengths).*knob.rate;
        if ((got < knob.target) == knob.increasing) {
          lo = pp.*knob.param;
        } else {
          hi = pp.*knob.param;
        }
      }
      pp.*knob.param = 0.5 * (lo + hi);
    }
  }
  return pp;
}

// Circle-method round robin; round r pairs every team once.
std::vector<std::pair<int, int>> round_pairs(int n_teams, int round) {
  std::vector<int> ring(static_cast<std::size_t>(n_teams - 1));
  for (int i = 0; i < n_teams - 1; ++i) {
    ring[static_cast<std::size_t>(i)] = 1 + (i + round) % (n_teams - 1);
  }
  std::vector<std::pair<int, int>> pairs;
  const int fixed = n_teams;
  pairs.emplace_back(round % 2 == 0 ? fixed : ring[0],
                     round % 2 == 0 ? ring[0] : fixed);
  for (int i = 1; i < n_teams / 2; ++i) {
    const int a = ring[static_cast<std::size_t>(i)];
    const int b = ring[static_cast<std::size_t>(n_teams - 1 - i)];
    pairs.emplace_back(i % 2 == 0 ? a : b, i % 2 == 0 ? b : a);
  }
  return pairs;
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

Point on_pitch(Point p) {
  return {std::clamp(p.x, 0.5, kPitchLength - 0.5),
          std::clamp(p.y, 0.5, kPitchWidth - 0.5)};
}

Point rounded(Point p) { return {round2(p.x), round2(p.y)}; }

ActionType choose_action(Stream& g, const FlagEvent& fe) {
  using A = ActionType;
  if (fe.flags.goal) return A::kShot;
  switch (fe.start) {
    case Start::kKickoff:
      return A::kPass;
    case Start::kRecovery: {
      static constexpr std::array<A, 5> kinds = {
          A::kInterception, A::kTackle, A::kGkCatch, A::kBlock, A::kClearance};
      return kinds[static_cast<std::size_t>(
          g.pick(std::array<double, 5>{0.45, 0.3, 0.08, 0.07, 0.1}))];
    }
    case Start::kRestart: {
      static constexpr std::array<A, 4> kinds = {A::kThrowIn, A::kFreeKick,
                                                 A::kGoalKick, A::kCornerKick};
      return kinds[static_cast<std::size_t>(
          g.pick(std::array<double, 4>{0.45, 0.3, 0.15, 0.1}))];
    }
    case Start::kContinue:
      break;
  }
  if (fe.flags.effective_attack) {
    static constexpr std::array<A, 4> kinds = {A::kShot, A::kCross,
                                               A::kDribble, A::kPass};
    return kinds[static_cast<std::size_t>(
        g.pick(std::array<double, 4>{0.2, 0.3, 0.2, 0.3}))];
  }
  static constexpr std::array<A, 6> kinds = {A::kPass,  A::kTrap,
                                             A::kDribble, A::kClearance,
                                             A::kFoul,  A::kGkHandClear};
  return kinds[static_cast<std::size_t>(
      g.pick(std::array<double, 6>{0.62, 0.18, 0.1, 0.05, 0.03, 0.02}))];
}

int player_for(Stream& g, int team, ActionType action) {
  if (action == ActionType::kGkCatch || action == ActionType::kGkHandClear ||
      action == ActionType::kGoalKick) {
    return team * 100 + 1;
  }
  return team * 100 + 2 + static_cast<int>(g.uniform() * 10.0);
}

// Players around `ball` in the acting team's attacking frame. The nearest
// defender sits at a label-dependent distance and every other defender is
// kept strictly farther away.
std::vector<PlayerPosition> place_players(Stream& g, const GenConfig& cfg,
                                          int team, int opp, int carrier,
                                          const Point& ball, bool recovery) {
  std::vector<PlayerPosition> players;
  players.reserve(2 * kPlayersPerTeam);
  for (int k = 1; k <= kPlayersPerTeam; ++k) {
    const int id = team * 100 + k;
    Point p;
    if (id == carrier) {
      p = {ball.x + 0.6 * g.normal(), ball.y + 0.6 * g.normal()};
    } else if (k == 1) {
      p = {g.uniform(2.0, 12.0), g.uniform(26.0, 42.0)};
    } else {
      p = {ball.x - 5.0 + 15.0 * g.normal(), g.uniform(2.0, 66.0)};
    }
    players.push_back({team, id, on_pitch(p)});
  }

  const double mu =
      std::log(6.0) - cfg.recovery_signal * (recovery ? 1.0 : 0.0);
  const double d = std::clamp(std::exp(mu + 0.5 * g.normal()), 0.3, 30.0);
  const double angle = g.uniform(0.0, 2.0 * std::numbers::pi);
  const Point nearest = on_pitch(
      {ball.x + d * std::cos(angle), ball.y + d * std::sin(angle)});
  const double reach = distance(nearest, ball) + 0.5;
  const int marker = 2 + static_cast<int>(g.uniform() * 10.0);
  for (int k = 1; k <= kPlayersPerTeam; ++k) {
    const int id = opp * 100 + k;
    Point p;
    if (k == marker) {
      p = nearest;
    } else {
      bool placed = false;
      for (int attempt = 0; attempt < 50 && !placed; ++attempt) {
        p = k == 1 ? Point{g.uniform(93.0, 103.0), g.uniform(26.0, 42.0)}
                   : Point{ball.x + 5.0 + 15.0 * g.normal(),
                           g.uniform(2.0, 66.0)};
        p = on_pitch(p);
        placed = distance(p, ball) >= reach;
      }
      if (!placed) p = {ball.x < 52.5 ? 104.0 : 1.0, ball.y < 34.0 ? 67.0 : 1.0};
    }
    players.push_back({opp, id, p});
  }
  return players;
}

MatchRecord build_match(const Fixture& fx, const GenConfig& cfg,
                        const std::vector<FlagEvent>& flags,
                        const LabelSet& truth) {
  MatchRecord m;
  m.match_id = fx.match_id;
  m.week = fx.week;
  m.home_team_id = fx.home;
  m.away_team_id = fx.away;
  Stream g(cfg.seed, fx.match_id, StreamKind::kGeometry);

  const Point center{kPitchLength / 2.0, kPitchWidth / 2.0};
  Point ball = center;
  long ticks = 0;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    const FlagEvent& fe = flags[i];
    const bool period_start = i == 0 || flags[i - 1].period != fe.period;
    if (period_start) {
      ball = center;
      ticks = kTicksPerSecond / 2;
    } else if (flags[i - 1].flags.goal) {
      ball = center;
    }
    const int opp = fe.team == fx.home ? fx.away : fx.home;
    const bool toward = attacks_toward_positive_x(m, fe.team, fe.period);
    const Point start = to_attacking_frame(ball, toward);
    const bool attacked = truth[i].attacked;

    Point end;
    if (fe.flags.goal) {
      end = {kPitchLength, std::clamp(34.0 + 1.5 * g.normal(), 30.5, 37.5)};
    } else {
      const double push = cfg.attack_signal * (attacked ? 1.0 : 0.0);
      const double target_x = std::min(55.0 + 30.0 * push, 100.0);
      end = on_pitch({start.x + 0.35 * (target_x - start.x) + 6.0 * push +
                          5.0 * g.normal(),
                      start.y + 0.3 * (34.0 - start.y) + 6.0 * g.normal()});
    }

    Event e;
    e.event_id = static_cast<int>(i) + 1;
    e.period = fe.period;
    e.team_id = fe.team;
    e.flags = fe.flags;
    e.action = choose_action(g, fe);
    e.player_id = player_for(g, fe.team, e.action);
    const long gap = std::lround(g.uniform(0.8, 4.2) * kTicksPerSecond);
    const long dur = static_cast<long>(g.uniform() * 0.8 * gap);
    e.t_start = static_cast<double>(ticks) / kTicksPerSecond;
    e.t_end = static_cast<double>(ticks + dur) / kTicksPerSecond;
    e.ball_start = rounded(to_attacking_frame(start, toward));
    e.ball_end = rounded(to_attacking_frame(end, toward));

    TrackingFrame f;
    f.period = fe.period;
    const long frame_no =
        (ticks * kFramesPerSecond + kTicksPerSecond / 2) / kTicksPerSecond;
    f.t = static_cast<double>(frame_no) / kFramesPerSecond;
    f.ball = e.ball_start;
    f.players = place_players(g, cfg, fe.team, opp, e.player_id, start,
                              truth[i].recovery);
    for (PlayerPosition& p : f.players) {
      p.xy = rounded(to_attacking_frame(p.xy, toward));
    }

    if (fe.flags.goal) (fe.team == fx.home ? m.home_goals : m.away_goals)++;
    ball = e.ball_end;
    ticks += gap;
    m.events.push_back(std::move(e));
    m.frames.push_back(std::move(f));
  }
  return m;
}

}  // namespace

void GenConfig::validate() const {
  const auto fail = [](const std::string& what) {
    throw SchemaError("synth config: " + what);
  };
  if (n_teams < 4 || n_teams % 2 != 0) fail("n_teams must be even and >= 4");
  if (n_weeks < 1) fail("n_weeks must be positive");
  if (matches_per_week < 1 || matches_per_week > n_teams / 2) {
    fail("matches_per_week must be in [1, n_teams/2]");
  }
  if (events_per_match < 20) fail("events_per_match must be >= 20");
  for (double r : {recovery_rate, attacked_rate, scores_rate, concedes_rate}) {
    if (!(r > 0.0 && r < 1.0)) fail("rates must lie in (0, 1)");
  }
  for (double s : {recovery_signal, attack_signal, team_signal}) {
    if (!(s >= 0.0) || !std::isfinite(s)) fail("signals must be >= 0");
  }
  if (k_vdep < 1 || k_vaep < 1) fail("window lengths must be positive");
}

GenConfig GenConfig::from_config(const KeyValueConfig& kv) {
  kv.require_known({"seed", "n_teams", "n_weeks", "matches_per_week",
                    "events_per_match", "recovery_rate", "attacked_rate",
                    "scores_rate", "concedes_rate", "recovery_signal",
                    "attack_signal", "team_signal", "k_vdep", "k_vaep"});
  GenConfig c;
  c.seed = kv.get_uint64("seed", c.seed);
  c.n_teams = kv.get_int("n_teams", c.n_teams);
  c.n_weeks = kv.get_int("n_weeks", c.n_weeks);
  c.matches_per_week = kv.get_int("matches_per_week", c.matches_per_week);
  c.events_per_match = kv.get_int("events_per_match", c.events_per_match);
  c.recovery_rate = kv.get_double("recovery_rate", c.recovery_rate);
  c.attacked_rate = kv.get_double("attacked_rate", c.attacked_rate);
  c.scores_rate = kv.get_double("scores_rate", c.scores_rate);
  c.concedes_rate = kv.get_double("concedes_rate", c.concedes_rate);
  c.recovery_signal = kv.get_double("recovery_signal", c.recovery_signal);
  c.attack_signal = kv.get_double("attack_signal", c.attack_signal);
  c.team_signal = kv.get_double("team_signal", c.team_signal);
  c.k_vdep = kv.get_int("k_vdep", c.k_vdep);
  c.k_vaep = kv.get_int("k_vaep", c.k_vaep);
  c.validate();
  return c;
}

KeyValueConfig GenConfig::to_config() const {
  KeyValueConfig kv;
  const auto set = [&kv](const std::string& k, double v) {
    kv.set(k, csv::format_double(v));
  };
  kv.set("seed", std::to_string(seed));
  kv.set("n_teams", std::to_string(n_teams));
  kv.set("n_weeks", std::to_string(n_weeks));
  kv.set("matches_per_week", std::to_string(matches_per_week));
  kv.set("events_per_match", std::to_string(events_per_match));
  set("recovery_rate", recovery_rate);
  set("attacked_rate", attacked_rate);
  set("scores_rate", scores_rate);
  set("concedes_rate", concedes_rate);
  set("recovery_signal", recovery_signal);
  set("attack_signal", attack_signal);
  set("team_signal", team_signal);
  kv.set("k_vdep", std::to_string(k_vdep));
  kv.set("k_vaep", std::to_string(k_vaep));
  return kv;
}

Generated generate(const GenConfig& cfg) {
  cfg.validate();
  Generated out;

  Stream team_stream(cfg.seed, 0, StreamKind::kTeams);
  std::map<int, Strength> strengths;
  for (int t = 1; t <= cfg.n_teams; ++t) {
    Strength s{cfg.team_signal * team_stream.normal(),
               cfg.team_signal * team_stream.normal()};
    strengths[t] = s;
    Team team;
    team.team_id = t;
    team.name = "Team " + std::string(t < 10 ? "0" : "") + std::to_string(t);
    team.season_goals = static_cast<int>(
        std::lround(45.0 * std::exp(0.5 * s.attack) + 3.0 * team_stream.normal()));
    team.season_goals = std::max(team.season_goals, 1);
    out.corpus.teams[t] = team;
  }

  std::vector<Fixture> fixtures;
  int next_id = 1;
  for (int week = 1; week <= cfg.n_weeks; ++week) {
    const int round = (week - 1) % (cfg.n_teams - 1);
    const bool swap = ((week - 1) / (cfg.n_teams - 1)) % 2 == 1;
    const auto pairs = round_pairs(cfg.n_teams, round);
    for (int j = 0; j < cfg.matches_per_week; ++j) {
      Fixture fx;
      fx.match_id = next_id++;
      fx.week = week;
      fx.home = swap ? pairs[static_cast<std::size_t>(j)].second
                     : pairs[static_cast<std::size_t>(j)].first;
      fx.away = swap ? pairs[static_cast<std::size_t>(j)].first
                     : pairs[static_cast<std::size_t>(j)].second;
      Stream flags(cfg.seed, fx.match_id, StreamKind::kFlags);
      fx.draws.resize(static_cast<std::size_t>(cfg.events_per_match) *
                      kDrawsPerEvent);
      for (double& u : fx.draws) u = flags.uniform();
      fixtures.push_back(std::move(fx));
    }
  }

  out.params = calibrate(fixtures, cfg, strengths);
  Tally tally;
  for (const Fixture& fx : fixtures) {
    const auto flags =
        run_process(fx, cfg.events_per_match, out.params, strengths);
    LabelSet truth = scan_labels(flags, cfg.k_vdep, cfg.k_vaep);
    tally.add(truth);
    out.corpus.matches.push_back(build_match(fx, cfg, flags, truth));
    out.truth[fx.match_id] = std::move(truth);
  }
  out.rates = tally.rates();
  return out;
}

void write_generated(const std::filesystem::path& dir, const Generated& gen) {
  write_corpus(dir, gen.corpus);
  csv::Writer w(dir / "truth_labels.csv");
  w.row("match_id", "event_id", "recovery", "attacked", "scores", "concedes");
  for (const MatchRecord& m : gen.corpus.matches) {
    const LabelSet& labels = gen.truth.at(m.match_id);
    for (std::size_t i = 0; i < m.events.size(); ++i) {
      const Labels& l = labels[i];
      w.row(m.match_id, m.events[i].event_id, int{l.recovery},
            int{l.attacked}, int{l.scores}, int{l.concedes});
    }
  }
}

}  // namespace vdep::synth
