#include "wowy/contributions.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>

#include "roster_sweep.hpp"
#include "wowy/csv.hpp"
#include "wowy/toi.hpp"

namespace wowy {

std::string to_string(Measure m) {
  switch (m) {
    case Measure::RawGoals: return "RAW_GOALS";
    case Measure::Goals60: return "GOALS60";
    case Measure::WeightedGoals60: return "WGOALS60";
    case Measure::WeightedShots60: return "WSHOTS60";
  }
  return "?";
}

Measure parse_measure(const std::string& name) {
  std::string up;
  for (char c : name) up += char(std::toupper(static_cast<unsigned char>(c)));
  if (up == "RAW_GOALS" || up == "RAW") return Measure::RawGoals;
  if (up == "GOALS60") return Measure::Goals60;
  if (up == "WGOALS60") return Measure::WeightedGoals60;
  if (up == "WSHOTS60") return Measure::WeightedShots60;
  throw ValidationError("unknown measure '" + name + "'");
}

double per60(std::int64_t count, Seconds seconds) {
  if (seconds < 0) throw ValidationError("negative seconds");
  if (seconds == 0) throw UndefinedValueError("rate undefined: zero seconds");
  return double(count) * 3600.0 / double(seconds);
}

double weighted_mean(std::span<const double> values, std::span<const double> weights) {
  if (values.size() != weights.size())
    throw ValidationError("weighted_mean: size mismatch");
  double num = 0, den = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (weights[i] < 0) throw ValidationError("weighted_mean: negative weight");
    num += values[i] * weights[i];
    den += weights[i];
  }
  if (den <= 0) throw UndefinedValueError("weighted mean undefined: zero total weight");
  return num / den;
}

RawContribution raw_goal_decomposition(const AggregateStats& stats) {
  return {stats.goals_for, stats.goals, stats.goals_for - stats.goals};
}

namespace {

// Season accumulation for one team: per-player and per-pair 5v5 time and
// event counts from a single sweep. Pair cells use x < y (dense order).
struct TeamAccum {
  detail::TeamIndex idx;
  std::size_t n = 0;
  Seconds team_toi = 0;
  std::int64_t team_goals = 0, team_shots = 0;
  std::vector<Seconds> toi;
  std::vector<std::int64_t> goals, shots, goals_for, shots_for, assists;
  std::vector<Seconds> pair_toi;
  std::vector<std::int64_t> pair_gf, pair_sf;

  Seconds& ptoi(int x, int y) { return pair_toi[std::size_t(std::min(x, y)) * n + std::max(x, y)]; }
  std::int64_t& pgf(int x, int y) { return pair_gf[std::size_t(std::min(x, y)) * n + std::max(x, y)]; }
  std::int64_t& psf(int x, int y) { return pair_sf[std::size_t(std::min(x, y)) * n + std::max(x, y)]; }
};

TeamAccum accumulate_team(const SeasonDataset& ds, const std::string& team) {
  TeamAccum acc;
  acc.idx = detail::TeamIndex::build(ds, team);
  acc.n = acc.idx.ids.size();
  acc.toi.assign(acc.n, 0);
  acc.goals.assign(acc.n, 0);
  acc.shots.assign(acc.n, 0);
  acc.goals_for.assign(acc.n, 0);
  acc.shots_for.assign(acc.n, 0);
  acc.assists.assign(acc.n, 0);
  acc.pair_toi.assign(acc.n * acc.n, 0);
  acc.pair_gf.assign(acc.n * acc.n, 0);
  acc.pair_sf.assign(acc.n * acc.n, 0);

  for (const SeasonDataset::Game& game : ds.games) {
    if (game.teams[0] != team && game.teams[1] != team) continue;
    for (const StrengthInterval& ivl : ds.game_five_on_five(game))
      acc.team_toi += ivl.end_s - ivl.start_s;
    detail::sweep_team_game(
        ds, game, acc.idx,
        [&](Seconds a, Seconds b, std::span<const int> roster) {
          Seconds len = b - a;
          for (std::size_t x = 0; x < roster.size(); ++x) {
            acc.toi[roster[x]] += len;
            for (std::size_t y = x + 1; y < roster.size(); ++y)
              acc.ptoi(roster[x], roster[y]) += len;
          }
        },
        [&](const GameEvent& e, std::span<const int> roster) {
          bool goal = e.type == EventType::Goal;
          acc.team_shots += 1;
          if (goal) acc.team_goals += 1;
          for (std::size_t x = 0; x < roster.size(); ++x) {
            acc.shots_for[roster[x]] += 1;
            if (goal) acc.goals_for[roster[x]] += 1;
            for (std::size_t y = x + 1; y < roster.size(); ++y) {
              acc.psf(roster[x], roster[y]) += 1;
              if (goal) acc.pgf(roster[x], roster[y]) += 1;
            }
          }
          int shooter = acc.idx.dense(e.shooter_id);
          if (shooter >= 0) {
            acc.shots[shooter] += 1;
            if (goal) acc.goals[shooter] += 1;
          }
          if (goal) {
            int a1 = e.assist1_id.empty() ? -1 : acc.idx.dense(e.assist1_id);
            int a2 = e.assist2_id.empty() ? -1 : acc.idx.dense(e.assist2_id);
            if (a1 >= 0) acc.assists[a1] += 1;
            if (a2 >= 0) acc.assists[a2] += 1;
          }
        });
  }
  return acc;
}

bool is_weighted(Measure m) {
  return m == Measure::WeightedGoals60 || m == Measure::WeightedShots60;
}

// Weighted off rate from a team accumulation; nullopt when no teammate has
// both shared ice time and time away from the player.
std::optional<double> weighted_off_from_accum(TeamAccum& acc, int d, Measure measure) {
  const bool shots = measure == Measure::WeightedShots60;
  double num = 0, den = 0;
  for (std::size_t j = 0; j < acc.n; ++j) {
    int dj = int(j);
    if (dj == d || is_goalie(acc.idx.positions[j])) continue;
    Seconds with_a = acc.ptoi(d, dj);
    Seconds without_a = acc.toi[j] - with_a;
    if (with_a <= 0 || without_a <= 0) continue;
    std::int64_t count = shots ? acc.shots_for[j] - acc.psf(d, dj)
                               : acc.goals_for[j] - acc.pgf(d, dj);
    double rate = double(count) * 3600.0 / double(without_a);
    num += rate * double(with_a);
    den += double(with_a);
  }
  if (den <= 0) return std::nullopt;
  return num / den;
}

std::optional<ContributionRecord> record_from_accum(TeamAccum& acc, int d, Measure measure) {
  ContributionRecord rec;
  rec.player_id = acc.idx.ids[d];
  rec.position = acc.idx.positions[d];
  rec.team_id = acc.idx.team_id;
  rec.measure = measure;
  rec.toi_s = acc.toi[d];
  switch (measure) {
    case Measure::RawGoals:
      rec.on_rate = double(acc.team_goals);
      rec.off_rate = double(acc.team_goals - acc.goals_for[d]);
      rec.m = double(acc.goals_for[d]);
      rec.c = double(acc.goals[d]);
      rec.a = double(acc.goals_for[d] - acc.goals[d]);
      return rec;
    case Measure::Goals60: {
      Seconds off_s = acc.team_toi - acc.toi[d];
      if (acc.toi[d] <= 0 || off_s <= 0 || acc.team_toi <= 0) return std::nullopt;
      rec.on_rate = per60(acc.team_goals, acc.team_toi);
      rec.off_rate = per60(acc.team_goals - acc.goals_for[d], off_s);
      rec.m = rec.on_rate - rec.off_rate;
      rec.c = per60(acc.goals[d], acc.toi[d]);
      rec.a = rec.m - rec.c;
      return rec;
    }
    case Measure::WeightedGoals60:
    case Measure::WeightedShots60: {
      if (acc.toi[d] <= 0) return std::nullopt;
      std::optional<double> off = weighted_off_from_accum(acc, d, measure);
      if (!off) return std::nullopt;
      const bool shots = measure == Measure::WeightedShots60;
      rec.on_rate = per60(shots ? acc.shots_for[d] : acc.goals_for[d], acc.toi[d]);
      rec.off_rate = *off;
      rec.m = rec.on_rate - rec.off_rate;
      rec.c = per60(shots ? acc.shots[d] : acc.goals[d], acc.toi[d]);
      rec.a = rec.m - rec.c;
      return rec;
    }
  }
  return std::nullopt;
}

int require_skater(const SeasonDataset& ds, const std::string& player_id) {
  auto it = ds.players.find(player_id);
  if (it == ds.players.end()) throw ValidationError("unknown player " + player_id);
  if (is_goalie(it->second.position))
    throw ValidationError("player " + player_id + " is a goalie");
  return 0;
}

}  // namespace

AggregateStats aggregate_counts(const SeasonDataset& ds, const std::string& player_id) {
  require_skater(ds, player_id);
  const std::string& team = ds.players.at(player_id).team_id;
  AggregateStats st;
  st.player_id = player_id;
  st.toi_s = player_toi(ds, player_id);
  st.team_toi_s = team_toi(ds, team);
  // Direct event scan; the bulk sweep path in compute_all is checked against
  // this in the tests.
  for (const SeasonDataset::Game& game : ds.games) {
    if (game.teams[0] != team && game.teams[1] != team) continue;
    for (const GameEvent& e : ds.game_events(game)) {
      if (e.team_id != team) continue;
      bool goal = e.type == EventType::Goal;
      st.team_shots += 1;
      if (goal) st.team_goals += 1;
      bool on = on_ice(ds, game, player_id, e.elapsed_s);
      if (on) {
        st.shots_for += 1;
        if (goal) st.goals_for += 1;
      }
      if (e.shooter_id == player_id) {
        st.shots += 1;
        if (goal) st.goals += 1;
      }
    }
  }
  return st;
}

ContributionRecord rate_decomposition(const SeasonDataset& ds, const std::string& player_id) {
  AggregateStats st = aggregate_counts(ds, player_id);
  const PlayerInfo& info = ds.players.at(player_id);
  ContributionRecord rec;
  rec.player_id = player_id;
  rec.position = info.position;
  rec.team_id = info.team_id;
  rec.measure = Measure::Goals60;
  rec.toi_s = st.toi_s;
  rec.on_rate = per60(st.team_goals, st.team_toi_s);
  rec.off_rate = per60(st.team_goals - st.goals_for, st.team_toi_s - st.toi_s);
  rec.m = rec.on_rate - rec.off_rate;
  rec.c = per60(st.goals, st.toi_s);
  rec.a = rec.m - rec.c;
  return rec;
}

double weighted_off_rate(const SeasonDataset& ds, const std::string& player_id, Measure measure) {
  if (!is_weighted(measure))
    throw ValidationError("weighted_off_rate requires a weighted measure");
  require_skater(ds, player_id);
  const std::string& team = ds.players.at(player_id).team_id;
  TeamAccum acc = accumulate_team(ds, team);
  std::optional<double> off = weighted_off_from_accum(acc, acc.idx.dense(player_id), measure);
  if (!off)
    throw UndefinedValueError("weighted off rate undefined for " + player_id +
                              ": no teammate with both shared and separate ice time");
  return *off;
}

ContributionRecord weighted_decomposition(const SeasonDataset& ds, const std::string& player_id,
                                          Measure measure) {
  if (!is_weighted(measure))
    throw ValidationError("weighted_decomposition requires a weighted measure");
  require_skater(ds, player_id);
  const std::string& team = ds.players.at(player_id).team_id;
  TeamAccum acc = accumulate_team(ds, team);
  int d = acc.idx.dense(player_id);
  if (acc.toi[d] <= 0)
    throw UndefinedValueError("rate undefined: zero 5v5 time for " + player_id);
  std::optional<ContributionRecord> rec = record_from_accum(acc, d, measure);
  if (!rec)
    throw UndefinedValueError("weighted off rate undefined for " + player_id +
                              ": no teammate with both shared and separate ice time");
  return *rec;
}

double assists_per60(const SeasonDataset& ds, const std::string& player_id) {
  require_skater(ds, player_id);
  std::int64_t count = 0;
  for (const GameEvent& e : ds.events)
    if (e.type == EventType::Goal && (e.assist1_id == player_id || e.assist2_id == player_id))
      count += 1;
  return per60(count, player_toi(ds, player_id));
}

std::map<std::string, std::int64_t> assist_counts(const SeasonDataset& ds) {
  std::map<std::string, std::int64_t> counts;
  for (const auto& [pid, info] : ds.players)
    if (!is_goalie(info.position)) counts[pid] = 0;
  for (const GameEvent& e : ds.events) {
    if (e.type != EventType::Goal) continue;
    if (!e.assist1_id.empty()) {
      auto it = counts.find(e.assist1_id);
      if (it != counts.end()) it->second += 1;
    }
    if (!e.assist2_id.empty()) {
      auto it = counts.find(e.assist2_id);
      if (it != counts.end()) it->second += 1;
    }
  }
  return counts;
}

std::vector<ContributionRecord> compute_all(const SeasonDataset& ds, Measure measure) {
  std::vector<ContributionRecord> records;
  for (const auto& [team, members] : ds.team_players) {
    TeamAccum acc = accumulate_team(ds, team);
    for (std::size_t d = 0; d < acc.n; ++d) {
      if (is_goalie(acc.idx.positions[d])) continue;
      std::optional<ContributionRecord> rec = record_from_accum(acc, int(d), measure);
      if (rec) records.push_back(std::move(*rec));
    }
  }
  std::sort(records.begin(), records.end(),
            [](const ContributionRecord& a, const ContributionRecord& b) {
              return a.player_id < b.player_id;
            });
  return records;
}

std::vector<ContributionRecord> leaderboard(std::span<const ContributionRecord> records,
                                            Group group, double min_minutes, SortKey key,
                                            std::size_t top_n) {
  auto key_of = [key](const ContributionRecord& r) {
    switch (key) {
      case SortKey::Marginal: return r.m;
      case SortKey::Competitive: return r.c;
      case SortKey::Altruistic: return r.a;
      case SortKey::OnRate: return r.on_rate;
      case SortKey::OffRate: return r.off_rate;
    }
    return r.m;
  };
  std::vector<ContributionRecord> rows;
  for (const ContributionRecord& r : records)
    if (in_group(r.position, group) && double(r.toi_s) >= min_minutes * 60.0)
      rows.push_back(r);
  std::sort(rows.begin(), rows.end(),
            [&](const ContributionRecord& a, const ContributionRecord& b) {
              double ka = key_of(a), kb = key_of(b);
              if (ka != kb) return ka > kb;
              if (a.toi_s != b.toi_s) return a.toi_s > b.toi_s;
              return a.player_id < b.player_id;
            });
  if (rows.size() > top_n) rows.resize(top_n);
  return rows;
}

void write_contrib_csv(const std::filesystem::path& path,
                       std::span<const ContributionRecord> records) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "player_id,position,team_id,measure,toi_s,on_rate,off_rate,m,c,a\n";
  for (const ContributionRecord& r : records) {
    out << r.player_id << ',' << to_string(r.position) << ',' << r.team_id << ','
        << to_string(r.measure) << ',' << r.toi_s << ',' << csv::format_double(r.on_rate, 6)
        << ',' << csv::format_double(r.off_rate, 6) << ',' << csv::format_double(r.m, 6) << ','
        << csv::format_double(r.c, 6) << ',' << csv::format_double(r.a, 6) << '\n';
  }
}

std::vector<ContributionRecord> read_contrib_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
  std::vector<ContributionRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> f = csv::split(line);
    if (f.size() != 10)
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected 10 fields");
    ContributionRecord r;
    r.player_id = f[0];
    r.position = parse_position(f[1]);
    r.team_id = f[2];
    r.measure = parse_measure(f[3]);
    r.toi_s = std::stoll(f[4]);
    r.on_rate = std::stod(f[5]);
    r.off_rate = std::stod(f[6]);
    r.m = std::stod(f[7]);
    r.c = std::stod(f[8]);
    r.a = std::stod(f[9]);
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace wowy
