#include "wowy/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>

#include "wowy/csv.hpp"
#include "wowy/rng.hpp"

namespace wowy {

namespace {

constexpr Seconds kGameLength = 3600;
constexpr Seconds kMinShift = 10;
constexpr Seconds kMaxShift = 180;

// Ice-time share by unit: top lines play more, as real deployment does.
constexpr double kLineWeight[4] = {1.25, 1.05, 0.90, 0.80};
constexpr double kPairWeight[3] = {1.15, 1.00, 0.85};
constexpr double kDefenseShiftFactor = 1.25;

std::string format_date(int yyyymmdd) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%08d", yyyymmdd);
  return buf;
}

int add_days(int yyyymmdd, int days) {
  using namespace std::chrono;
  year_month_day ymd{year{yyyymmdd / 10000}, month{unsigned(yyyymmdd / 100 % 100)},
                     day{unsigned(yyyymmdd % 100)}};
  year_month_day out{sys_days{ymd} + std::chrono::days{days}};
  return int(out.year()) * 10000 + int(unsigned(out.month())) * 100 + int(unsigned(out.day()));
}

void validate_config(const SimConfig& cfg) {
  if (cfg.rosters.empty()) {
    if (cfg.teams < 2 || cfg.teams % 2 != 0)
      throw ValidationError("teams must be even and at least 2");
  }
  if (cfg.games_per_team < 1) throw ValidationError("games_per_team must be positive");
  if (!(cfg.shift_mean_s > 0)) throw ValidationError("non-positive shift_mean_s");
  if (!(cfg.forward_shoot_mean > 0) || !(cfg.defense_shoot_mean > 0))
    throw ValidationError("non-positive shoot rate mean");
  if (cfg.forward_shoot_sd < 0 || cfg.defense_shoot_sd < 0)
    throw ValidationError("negative shoot rate spread");
  if (cfg.boost_min < 0 || cfg.boost_max < cfg.boost_min)
    throw ValidationError("invalid boost range");
  if (cfg.goal_prob < 0 || cfg.goal_prob > 1) throw ValidationError("goal_prob outside [0,1]");
  if (cfg.line_mix_prob < 0 || cfg.line_mix_prob > 1)
    throw ValidationError("line_mix_prob outside [0,1]");
  if (!(cfg.max_team_rate_per60 > 0)) throw ValidationError("non-positive max_team_rate_per60");
  if (cfg.no_assist_prob < 0 || cfg.no_assist_prob > 1 || cfg.second_assist_prob < 0 ||
      cfg.second_assist_prob > 1)
    throw ValidationError("assist probability outside [0,1]");
  if (cfg.start_date < 10000101 || cfg.start_date > 99991231)
    throw ValidationError("start_date must be YYYYMMDD");

  if (!cfg.rosters.empty()) {
    if (cfg.rosters.size() < 2 || cfg.rosters.size() % 2 != 0)
      throw ValidationError("invalid roster: need an even team count of at least 2");
    std::set<std::string> seen_teams, seen_players;
    for (const TeamRoster& team : cfg.rosters) {
      if (team.team_id.empty() || !seen_teams.insert(team.team_id).second)
        throw ValidationError("invalid roster: missing or duplicate team id");
      std::vector<std::string> ids;
      for (const auto& line : team.forward_lines)
        for (const std::string& pid : line) ids.push_back(pid);
      for (const auto& pair : team.defense_pairs)
        for (const std::string& pid : pair) ids.push_back(pid);
      ids.push_back(team.goalie);
      for (const std::string& pid : ids) {
        if (pid.empty() || !seen_players.insert(pid).second)
          throw ValidationError("invalid roster: missing or duplicate player id in team " +
                                team.team_id);
        auto it = cfg.abilities.find(pid);
        if (it == cfg.abilities.end())
          throw ValidationError("invalid roster: no abilities for player " + pid);
        const LatentPlayer& lp = it->second;
        if (lp.shoot_rate < 0 || lp.playmake_boost < 0)
          throw ValidationError("negative rate for player " + pid);
        if (lp.goal_prob < 0 || lp.goal_prob > 1)
          throw ValidationError("goal_prob outside [0,1] for player " + pid);
      }
    }
  }
}

struct League {
  std::vector<TeamRoster> rosters;                  // sorted by team id
  std::map<std::string, LatentPlayer> abilities;
};

League build_league(const SimConfig& cfg) {
  League lg;
  if (!cfg.rosters.empty()) {
    lg.rosters = cfg.rosters;
    lg.abilities = cfg.abilities;
    std::sort(lg.rosters.begin(), lg.rosters.end(),
              [](const TeamRoster& a, const TeamRoster& b) { return a.team_id < b.team_id; });
    return lg;
  }

  rng::Engine eng(rng::derive_seed(cfg.seed, "abilities"));
  constexpr Position kSlotPos[3] = {Position::LW, Position::C, Position::RW};
  for (int t = 0; t < cfg.teams; ++t) {
    TeamRoster team;
    char tid[16];
    std::snprintf(tid, sizeof(tid), "T%02d", t + 1);
    team.team_id = tid;
    char pid[32];
    for (int l = 0; l < 4; ++l)
      for (int s = 0; s < 3; ++s) {
        std::snprintf(pid, sizeof(pid), "%sF%02d", tid, l * 3 + s + 1);
        team.forward_lines[l][s] = pid;
        LatentPlayer lp;
        lp.player_id = pid;
        lp.position = kSlotPos[s];
        lp.shoot_rate = std::max(0.5, rng::normal(eng, cfg.forward_shoot_mean, cfg.forward_shoot_sd));
        lp.playmake_boost = rng::uniform(eng, cfg.boost_min, cfg.boost_max);
        lp.goal_prob = cfg.goal_prob;
        lg.abilities[pid] = std::move(lp);
      }
    for (int d = 0; d < 3; ++d)
      for (int s = 0; s < 2; ++s) {
        std::snprintf(pid, sizeof(pid), "%sD%02d", tid, d * 2 + s + 1);
        team.defense_pairs[d][s] = pid;
        LatentPlayer lp;
        lp.player_id = pid;
        lp.position = Position::D;
        lp.shoot_rate = std::max(0.3, rng::normal(eng, cfg.defense_shoot_mean, cfg.defense_shoot_sd));
        lp.playmake_boost = rng::uniform(eng, cfg.boost_min, cfg.boost_max);
        lp.goal_prob = cfg.goal_prob;
        lg.abilities[pid] = std::move(lp);
      }
    std::snprintf(pid, sizeof(pid), "%sG01", tid);
    team.goalie = pid;
    lg.abilities[pid] = LatentPlayer{pid, Position::G, 0.0, 1.0, 0.0};
    lg.rosters.push_back(std::move(team));
  }
  return lg;
}

struct UnitSegment {
  Seconds start = 0, end = 0;
  std::vector<int> players;  // dense indices within the team
};

// Dense team layout: forwards 0..11 (line l occupies 3l..3l+2), defense
// 12..17 (pair d occupies 12+2d, 13+2d), goalie 18.
struct TeamSim {
  const TeamRoster* roster = nullptr;
  std::vector<std::string> ids;        // dense -> player id
  std::vector<const LatentPlayer*> latents;
  std::vector<UnitSegment> fwd, def;
};

TeamSim make_team_sim(const League& lg, const TeamRoster& roster) {
  TeamSim sim;
  sim.roster = &roster;
  for (const auto& line : roster.forward_lines)
    for (const std::string& pid : line) sim.ids.push_back(pid);
  for (const auto& pair : roster.defense_pairs)
    for (const std::string& pid : pair) sim.ids.push_back(pid);
  sim.ids.push_back(roster.goalie);
  for (const std::string& pid : sim.ids) sim.latents.push_back(&lg.abilities.at(pid));
  return sim;
}

Seconds draw_shift_len(rng::Engine& eng, double mean) {
  double draw = rng::exponential(eng, 1.0 / mean);
  auto len = Seconds(std::llround(draw));
  return std::clamp<Seconds>(len, kMinShift, kMaxShift);
}

// One rotation timeline (forward lines or defense pairs). Units cycle in
// order with stochastic lengths; each slot may be filled from elsewhere in
// the pool with probability mix (so linemates also accrue time apart).
std::vector<UnitSegment> rotate_units(rng::Engine& eng, int unit_count, int unit_size,
                                      int pool_begin, int pool_size, const double* weights,
                                      double mean_s, double mix) {
  std::vector<UnitSegment> segments;
  Seconds t = 0;
  int unit = 0;
  while (t < kGameLength) {
    Seconds len = draw_shift_len(eng, mean_s * weights[unit]);
    Seconds end = std::min<Seconds>(t + len, kGameLength);
    if (kGameLength - end < kMinShift) end = kGameLength;  // absorb a tail sliver

    UnitSegment seg;
    seg.start = t;
    seg.end = end;
    for (int s = 0; s < unit_size; ++s) seg.players.push_back(pool_begin + unit * unit_size + s);
    for (int s = 0; s < unit_size; ++s) {
      if (rng::uniform01(eng) >= mix) continue;
      std::vector<int> candidates;
      for (int p = pool_begin; p < pool_begin + pool_size; ++p)
        if (std::find(seg.players.begin(), seg.players.end(), p) == seg.players.end())
          candidates.push_back(p);
      seg.players[s] = candidates[std::size_t(rng::bounded(eng, candidates.size()))];
    }
    segments.push_back(std::move(seg));
    t = end;
    unit = (unit + 1) % unit_count;
  }
  return segments;
}

void emit_shifts(const TeamSim& sim, const std::string& game_id, const std::string& team_id,
                 std::vector<Shift>& out) {
  auto emit = [&](const std::vector<UnitSegment>& segs) {
    for (const UnitSegment& seg : segs)
      for (int d : seg.players) {
        Shift s;
        s.game_id = game_id;
        s.player_id = sim.ids[d];
        s.team_id = team_id;
        s.position = sim.latents[d]->position;
        s.start_s = seg.start;
        s.end_s = seg.end;
        out.push_back(std::move(s));
      }
  };
  emit(sim.fwd);
  emit(sim.def);
  Shift g;
  g.game_id = game_id;
  g.player_id = sim.roster->goalie;
  g.team_id = team_id;
  g.position = Position::G;
  g.start_s = 0;
  g.end_s = kGameLength;
  out.push_back(std::move(g));
}

void simulate_game(const SimConfig& cfg, const League& lg, const TeamRoster& home,
                   const TeamRoster& away, const std::string& game_id,
                   std::vector<Shift>& shifts, std::vector<GameEvent>& events) {
  rng::Engine eng(rng::derive_seed(cfg.seed, game_id));

  TeamSim sides[2] = {make_team_sim(lg, home), make_team_sim(lg, away)};
  for (TeamSim& side : sides) {
    side.fwd = rotate_units(eng, 4, 3, 0, 12, kLineWeight, cfg.shift_mean_s, cfg.line_mix_prob);
    side.def = rotate_units(eng, 3, 2, 12, 6, kPairWeight,
                            cfg.shift_mean_s * kDefenseShiftFactor, cfg.line_mix_prob);
  }
  emit_shifts(sides[0], game_id, home.team_id, shifts);
  emit_shifts(sides[1], game_id, away.team_id, shifts);

  // Slice boundaries wherever any unit changes on either side.
  std::vector<Seconds> bounds{0, kGameLength};
  for (const TeamSim& side : sides) {
    for (const UnitSegment& seg : side.fwd) bounds.push_back(seg.end);
    for (const UnitSegment& seg : side.def) bounds.push_back(seg.end);
  }
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

  std::vector<GameEvent> game_events;
  std::size_t fi[2] = {0, 0}, di[2] = {0, 0};
  std::vector<int> on_ice;
  std::vector<double> shoot, boost;
  for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
    const Seconds a = bounds[b], z = bounds[b + 1];
    for (int s = 0; s < 2; ++s) {
      TeamSim& side = sides[s];
      while (side.fwd[fi[s]].end <= a) ++fi[s];
      while (side.def[di[s]].end <= a) ++di[s];
      on_ice.clear();
      on_ice.insert(on_ice.end(), side.fwd[fi[s]].players.begin(), side.fwd[fi[s]].players.end());
      on_ice.insert(on_ice.end(), side.def[di[s]].players.begin(), side.def[di[s]].players.end());

      shoot.clear();
      boost.clear();
      std::vector<const LatentPlayer*> unit;
      for (int d : on_ice) {
        unit.push_back(side.latents[d]);
        shoot.push_back(side.latents[d]->shoot_rate);
        boost.push_back(side.latents[d]->playmake_boost);
      }
      double rate60 = 0;
      {
        std::vector<LatentPlayer> tmp;
        for (const LatentPlayer* lp : unit) tmp.push_back(*lp);
        rate60 = std::min(unit_shot_rate(tmp), cfg.max_team_rate_per60);
      }
      if (rate60 <= 0) continue;
      const double rate_per_s = rate60 / 3600.0;

      double tau = double(a);
      while (true) {
        tau += rng::exponential(eng, rate_per_s);
        if (tau >= double(z)) break;
        GameEvent e;
        e.game_id = game_id;
        e.elapsed_s = std::min<Seconds>(Seconds(tau), z - 1);
        e.team_id = side.roster->team_id;
        std::size_t shooter = rng::weighted_pick(eng, shoot);
        e.shooter_id = side.ids[on_ice[shooter]];
        bool goal = rng::uniform01(eng) < unit[shooter]->goal_prob;
        e.type = goal ? EventType::Goal : EventType::Shot;
        if (goal && rng::uniform01(eng) >= cfg.no_assist_prob) {
          std::vector<double> w;
          std::vector<int> mates;
          for (std::size_t i = 0; i < on_ice.size(); ++i)
            if (i != shooter) {
              mates.push_back(on_ice[i]);
              w.push_back(boost[i]);
            }
          double total = std::accumulate(w.begin(), w.end(), 0.0);
          if (total > 0) {
            std::size_t a1 = rng::weighted_pick(eng, w);
            e.assist1_id = side.ids[mates[a1]];
            if (rng::uniform01(eng) < cfg.second_assist_prob) {
              mates.erase(mates.begin() + std::ptrdiff_t(a1));
              w.erase(w.begin() + std::ptrdiff_t(a1));
              total = std::accumulate(w.begin(), w.end(), 0.0);
              if (total > 0)
                e.assist2_id = side.ids[mates[rng::weighted_pick(eng, w)]];
            }
          }
        }
        game_events.push_back(std::move(e));
      }
    }
  }
  std::stable_sort(game_events.begin(), game_events.end(),
                   [](const GameEvent& x, const GameEvent& y) { return x.elapsed_s < y.elapsed_s; });
  events.insert(events.end(), game_events.begin(), game_events.end());
}

}  // namespace

double unit_shot_rate(std::span<const LatentPlayer> unit) {
  double total = 0;
  for (std::size_t i = 0; i < unit.size(); ++i) {
    double term = unit[i].shoot_rate;
    for (std::size_t j = 0; j < unit.size(); ++j)
      if (j != i) term *= unit[j].playmake_boost;
    total += term;
  }
  return total;
}

SimOutput generate_season(const SimConfig& cfg) {
  validate_config(cfg);
  League lg = build_league(cfg);
  const int n = int(lg.rosters.size());

  SimOutput out;
  for (const auto& [pid, lp] : lg.abilities) out.truth.push_back(lp);

  // Circle-method round robin: one round per date, every team plays once.
  std::vector<int> rotating(n - 1);
  std::iota(rotating.begin(), rotating.end(), 1);
  for (int round = 0; round < cfg.games_per_team; ++round) {
    const std::string date = format_date(add_days(cfg.start_date, round));
    std::vector<int> layout;
    layout.push_back(0);
    layout.insert(layout.end(), rotating.begin(), rotating.end());
    for (int i = 0; i < n / 2; ++i) {
      const TeamRoster& ta = lg.rosters[layout[i]];
      const TeamRoster& tb = lg.rosters[layout[n - 1 - i]];
      const TeamRoster& home = ta.team_id < tb.team_id ? ta : tb;
      const TeamRoster& away = ta.team_id < tb.team_id ? tb : ta;
      const std::string game_id = date + "-" + home.team_id + "-" + away.team_id;
      simulate_game(cfg, lg, home, away, game_id, out.shifts, out.events);
    }
    rotating.insert(rotating.begin(), rotating.back());
    rotating.pop_back();
  }
  return out;
}

SimConfig load_sim_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  SimConfig cfg;
  bool have_seed = false;
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](std::string s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    try {
      if (key == "teams") cfg.teams = std::stoi(value);
      else if (key == "games_per_team") cfg.games_per_team = std::stoi(value);
      else if (key == "shift_mean_s") cfg.shift_mean_s = std::stod(value);
      else if (key == "seed") { cfg.seed = std::stoull(value); have_seed = true; }
      else if (key == "start_date") cfg.start_date = std::stoi(value);
      else if (key == "forward_shoot_mean") cfg.forward_shoot_mean = std::stod(value);
      else if (key == "forward_shoot_sd") cfg.forward_shoot_sd = std::stod(value);
      else if (key == "defense_shoot_mean") cfg.defense_shoot_mean = std::stod(value);
      else if (key == "defense_shoot_sd") cfg.defense_shoot_sd = std::stod(value);
      else if (key == "boost_min") cfg.boost_min = std::stod(value);
      else if (key == "boost_max") cfg.boost_max = std::stod(value);
      else if (key == "goal_prob") cfg.goal_prob = std::stod(value);
      else if (key == "line_mix_prob") cfg.line_mix_prob = std::stod(value);
      else if (key == "max_team_rate_per60") cfg.max_team_rate_per60 = std::stod(value);
      else if (key == "no_assist_prob") cfg.no_assist_prob = std::stod(value);
      else if (key == "second_assist_prob") cfg.second_assist_prob = std::stod(value);
      else
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": unknown key '" +
                         key + "'");
    } catch (const std::invalid_argument&) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad value for '" +
                       key + "'");
    } catch (const std::out_of_range&) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad value for '" +
                       key + "'");
    }
  }
  if (!have_seed) throw ValidationError(path.string() + ": seed is mandatory");
  validate_config(cfg);
  return cfg;
}

void write_truth_csv(const std::filesystem::path& path, std::span<const LatentPlayer> truth) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "player_id,position,shoot_rate,playmake_boost,goal_prob\n";
  for (const LatentPlayer& lp : truth)
    out << lp.player_id << ',' << to_string(lp.position) << ','
        << csv::format_double(lp.shoot_rate, 4) << ',' << csv::format_double(lp.playmake_boost, 4)
        << ',' << csv::format_double(lp.goal_prob, 4) << '\n';
}

Table2Scenario table2_scenario(std::uint64_t seed) {
  // Above/below ability levels for the hypothetical two-tier roster; the
  // opponent is uniformly mid-level (opponents do not affect a team's own
  // shot generation).
  constexpr double kAboveFwd = 9.0, kBelowFwd = 5.5;
  constexpr double kAboveDef = 4.0, kBelowDef = 2.5;
  constexpr double kAboveBoost = 1.10, kBelowBoost = 0.95;
  constexpr double kGoalProb = 0.10;

  SimConfig cfg;
  cfg.games_per_team = 100;
  cfg.shift_mean_s = 45;
  cfg.seed = seed;
  cfg.start_date = 20230101;
  cfg.goal_prob = kGoalProb;
  cfg.line_mix_prob = 0.15;

  auto make_team = [&](const std::string& tid) {
    TeamRoster team;
    team.team_id = tid;
    char pid[32];
    for (int l = 0; l < 4; ++l)
      for (int s = 0; s < 3; ++s) {
        std::snprintf(pid, sizeof(pid), "%sF%02d", tid.c_str(), l * 3 + s + 1);
        team.forward_lines[l][s] = pid;
      }
    for (int d = 0; d < 3; ++d)
      for (int s = 0; s < 2; ++s) {
        std::snprintf(pid, sizeof(pid), "%sD%02d", tid.c_str(), d * 2 + s + 1);
        team.defense_pairs[d][s] = pid;
      }
    team.goalie = tid + "G01";
    return team;
  };
  constexpr Position kSlotPos[3] = {Position::LW, Position::C, Position::RW};
  auto add_ability = [&](const std::string& pid, Position pos, double shoot, double boost) {
    cfg.abilities[pid] = LatentPlayer{pid, pos, shoot, boost, pos == Position::G ? 0.0 : kGoalProb};
  };

  TeamRoster tbl = make_team("TBL");
  for (int l = 0; l < 4; ++l)
    for (int s = 0; s < 3; ++s) {
      bool above = l == 0 && !(s == 0);  // top line, except Player A at LW
      add_ability(tbl.forward_lines[l][s], kSlotPos[s], above ? kAboveFwd : kBelowFwd,
                  above ? kAboveBoost : kBelowBoost);
    }
  for (int d = 0; d < 3; ++d)
    for (int s = 0; s < 2; ++s) {
      bool above = d == 0;  // top pair
      add_ability(tbl.defense_pairs[d][s], Position::D, above ? kAboveDef : kBelowDef,
                  above ? kAboveBoost : kBelowBoost);
    }
  add_ability(tbl.goalie, Position::G, 0.0, 1.0);

  TeamRoster opp = make_team("OPP");
  for (int l = 0; l < 4; ++l)
    for (int s = 0; s < 3; ++s)
      add_ability(opp.forward_lines[l][s], kSlotPos[s], (kAboveFwd + kBelowFwd) / 2,
                  (kAboveBoost + kBelowBoost) / 2);
  for (int d = 0; d < 3; ++d)
    for (int s = 0; s < 2; ++s)
      add_ability(opp.defense_pairs[d][s], Position::D, (kAboveDef + kBelowDef) / 2,
                  (kAboveBoost + kBelowBoost) / 2);
  add_ability(opp.goalie, Position::G, 0.0, 1.0);

  cfg.rosters = {tbl, opp};
  cfg.teams = 2;
  return {std::move(cfg), "TBLF01"};
}

}  // namespace wowy
