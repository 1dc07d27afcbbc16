#include "wowy/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <set>
#include <tuple>

#include "wowy/csv.hpp"

namespace wowy {

bool in_group(Position p, Group g) {
  switch (g) {
    case Group::Forwards:
      return is_forward(p);
    case Group::Defensemen:
      return p == Position::D;
    case Group::All:
      return !is_goalie(p);
  }
  return false;
}

std::string to_string(Position p) {
  switch (p) {
    case Position::C: return "C";
    case Position::LW: return "LW";
    case Position::RW: return "RW";
    case Position::D: return "D";
    case Position::G: return "G";
  }
  return "?";
}

std::string to_string(EventType t) { return t == EventType::Goal ? "GOAL" : "SHOT"; }

Position parse_position(const std::string& code) {
  if (code == "C") return Position::C;
  if (code == "LW") return Position::LW;
  if (code == "RW") return Position::RW;
  if (code == "D") return Position::D;
  if (code == "G") return Position::G;
  throw ParseError("unknown position code '" + code + "'");
}

EventType parse_event_type(const std::string& code) {
  if (code == "SHOT") return EventType::Shot;
  if (code == "GOAL") return EventType::Goal;
  throw ParseError("unknown event type '" + code + "'");
}

namespace {

bool parse_i64(std::string_view s, std::int64_t& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

[[noreturn]] void row_error(const std::filesystem::path& path, std::size_t line,
                            const std::string& what) {
  throw ParseError(path.string() + ":" + std::to_string(line) + ": " + what);
}

std::ifstream open_or_throw(const std::filesystem::path& path, const char* expected_header,
                            std::string& header_line) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  if (!std::getline(in, header_line)) throw ParseError(path.string() + ": empty file");
  if (!header_line.empty() && header_line.back() == '\r') header_line.pop_back();
  if (header_line != expected_header)
    throw ParseError(path.string() + ": header mismatch, expected '" +
                     std::string(expected_header) + "'");
  return in;
}

// Enforced by parse_shifts and again when building a dataset from
// programmatic rows. Returns the two offending row indices (into the
// by-(game,player,start) order) via the error message only.
void check_shift_rows(std::span<const Shift> shifts) {
  for (const Shift& s : shifts) {
    if (s.game_id.empty() || s.player_id.empty() || s.team_id.empty())
      throw ValidationError("shift with empty game/player/team id");
    if (s.start_s < 0) throw ValidationError("shift with negative start_s");
    if (s.start_s >= s.end_s)
      throw ValidationError("empty interval for player " + s.player_id + " in game " +
                            s.game_id);
  }
}

void check_no_overlap(std::span<const Shift> sorted) {
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const Shift& a = sorted[i - 1];
    const Shift& b = sorted[i];
    if (a.game_id == b.game_id && a.player_id == b.player_id && b.start_s < a.end_s)
      throw ValidationError("overlapping shifts for player " + b.player_id + " in game " +
                            b.game_id);
  }
}

void check_event_row(const GameEvent& e) {
  if (e.game_id.empty() || e.team_id.empty() || e.shooter_id.empty())
    throw ValidationError("event with empty game/team/shooter id");
  if (e.elapsed_s < 0) throw ValidationError("event with negative elapsed_s");
  if (e.type == EventType::Shot && (!e.assist1_id.empty() || !e.assist2_id.empty()))
    throw ValidationError("assists on non-goal event in game " + e.game_id);
  if (!e.assist2_id.empty() && e.assist1_id.empty())
    throw ValidationError("assist2 without assist1 in game " + e.game_id);
  if (!e.assist1_id.empty() &&
      (e.assist1_id == e.shooter_id || e.assist2_id == e.shooter_id ||
       (!e.assist2_id.empty() && e.assist1_id == e.assist2_id)))
    throw ValidationError("duplicate assister in game " + e.game_id);
}

bool shift_order(const Shift& a, const Shift& b) {
  return std::tie(a.game_id, a.player_id, a.start_s) < std::tie(b.game_id, b.player_id, b.start_s);
}

bool event_order(const GameEvent& a, const GameEvent& b) {
  return std::tie(a.game_id, a.elapsed_s, a.team_id, a.shooter_id, a.assist1_id, a.assist2_id) <
         std::tie(b.game_id, b.elapsed_s, b.team_id, b.shooter_id, b.assist1_id, b.assist2_id);
}

}  // namespace

std::vector<Shift> parse_shifts(const std::filesystem::path& path) {
  std::string line;
  std::ifstream in = open_or_throw(path, kShiftsHeader, line);
  std::vector<Shift> shifts;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> f = csv::split(line);
    if (f.size() != 6) row_error(path, line_no, "expected 6 fields, got " + std::to_string(f.size()));
    Shift s;
    s.game_id = f[0];
    s.player_id = f[1];
    s.team_id = f[2];
    try {
      s.position = parse_position(f[3]);
    } catch (const ParseError& e) {
      row_error(path, line_no, e.what());
    }
    if (!parse_i64(f[4], s.start_s)) row_error(path, line_no, "bad start_s '" + f[4] + "'");
    if (!parse_i64(f[5], s.end_s)) row_error(path, line_no, "bad end_s '" + f[5] + "'");
    if (s.game_id.empty() || s.player_id.empty() || s.team_id.empty())
      row_error(path, line_no, "empty identifier field");
    if (s.start_s < 0) row_error(path, line_no, "negative start_s");
    if (s.start_s >= s.end_s) row_error(path, line_no, "empty interval");
    shifts.push_back(std::move(s));
  }
  std::vector<Shift> sorted = shifts;
  std::sort(sorted.begin(), sorted.end(), shift_order);
  try {
    check_no_overlap(sorted);
  } catch (const ValidationError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return shifts;
}

std::vector<GameEvent> parse_events(const std::filesystem::path& path) {
  std::string line;
  std::ifstream in = open_or_throw(path, kEventsHeader, line);
  std::vector<GameEvent> events;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> f = csv::split(line);
    if (f.size() != 7) row_error(path, line_no, "expected 7 fields, got " + std::to_string(f.size()));
    GameEvent e;
    e.game_id = f[0];
    if (!parse_i64(f[1], e.elapsed_s)) row_error(path, line_no, "bad elapsed_s '" + f[1] + "'");
    try {
      e.type = parse_event_type(f[2]);
    } catch (const ParseError& ex) {
      row_error(path, line_no, ex.what());
    }
    e.team_id = f[3];
    e.shooter_id = f[4];
    e.assist1_id = f[5];
    e.assist2_id = f[6];
    try {
      check_event_row(e);
    } catch (const ValidationError& ex) {
      row_error(path, line_no, ex.what());
    }
    events.push_back(std::move(e));
  }
  return events;
}

void write_shifts_csv(const std::filesystem::path& path, std::span<const Shift> shifts) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << kShiftsHeader << '\n';
  for (const Shift& s : shifts)
    out << s.game_id << ',' << s.player_id << ',' << s.team_id << ',' << to_string(s.position)
        << ',' << s.start_s << ',' << s.end_s << '\n';
}

void write_events_csv(const std::filesystem::path& path, std::span<const GameEvent> events) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << kEventsHeader << '\n';
  for (const GameEvent& e : events)
    out << e.game_id << ',' << e.elapsed_s << ',' << to_string(e.type) << ',' << e.team_id << ','
        << e.shooter_id << ',' << e.assist1_id << ',' << e.assist2_id << '\n';
}

std::vector<StrengthInterval> derive_strength_intervals(std::span<const Shift> game_shifts) {
  if (game_shifts.empty()) return {};
  const std::string& game_id = game_shifts.front().game_id;
  std::set<std::string> teams;
  for (const Shift& s : game_shifts) {
    if (s.game_id != game_id)
      throw ValidationError("derive_strength_intervals: shifts from more than one game");
    teams.insert(s.team_id);
  }
  if (teams.size() > 2)
    throw ValidationError("more than two teams in game " + game_id);
  std::array<std::string, 2> side{};
  {
    auto it = teams.begin();
    side[0] = *it;
    side[1] = teams.size() == 2 ? *std::next(it) : std::string();
  }

  // Sweep over shift boundaries. Slot layout: skaters home/away, goalies
  // home/away.
  std::map<Seconds, std::array<int, 4>> deltas;
  deltas[0];  // the partition starts at 0 even if no shift does
  for (const Shift& s : game_shifts) {
    int side_idx = s.team_id == side[0] ? 0 : 1;
    int slot = is_goalie(s.position) ? 2 + side_idx : side_idx;
    deltas[s.start_s][slot] += 1;
    deltas[s.end_s][slot] -= 1;
  }

  std::vector<StrengthInterval> out;
  std::array<int, 4> counts{};
  for (auto it = deltas.begin(); it != deltas.end(); ++it) {
    for (int i = 0; i < 4; ++i) counts[i] += it->second[i];
    auto next = std::next(it);
    if (next == deltas.end()) break;
    StrengthInterval ivl;
    ivl.game_id = game_id;
    ivl.start_s = it->first;
    ivl.end_s = next->first;
    ivl.skaters_home = counts[0];
    ivl.skaters_away = counts[1];
    ivl.goalie_home_on = counts[2] > 0;
    ivl.goalie_away_on = counts[3] > 0;
    if (!out.empty()) {
      StrengthInterval& back = out.back();
      if (back.end_s == ivl.start_s && back.skaters_home == ivl.skaters_home &&
          back.skaters_away == ivl.skaters_away && back.goalie_home_on == ivl.goalie_home_on &&
          back.goalie_away_on == ivl.goalie_away_on) {
        back.end_s = ivl.end_s;  // manpower unchanged across a substitution instant
        continue;
      }
    }
    out.push_back(std::move(ivl));
  }
  return out;
}

const SeasonDataset::Game* SeasonDataset::find_game(const std::string& game_id) const {
  auto it = std::lower_bound(games.begin(), games.end(), game_id,
                             [](const Game& g, const std::string& id) { return g.id < id; });
  if (it == games.end() || it->id != game_id) return nullptr;
  return &*it;
}

std::span<const Shift> SeasonDataset::game_shifts(const Game& g) const {
  return {shifts.data() + g.shift_begin, g.shift_end - g.shift_begin};
}

std::span<const Shift> SeasonDataset::player_game_shifts(const Game& g,
                                                         const std::string& player_id) const {
  std::span<const Shift> all = game_shifts(g);
  auto lo = std::partition_point(all.begin(), all.end(),
                                 [&](const Shift& s) { return s.player_id < player_id; });
  auto hi = std::partition_point(lo, all.end(),
                                 [&](const Shift& s) { return s.player_id == player_id; });
  return {&*lo, static_cast<std::size_t>(hi - lo)};
}

std::span<const GameEvent> SeasonDataset::game_events(const Game& g) const {
  return {events.data() + g.event_begin, g.event_end - g.event_begin};
}

std::span<const StrengthInterval> SeasonDataset::game_five_on_five(const Game& g) const {
  return {five_on_five.data() + g.ivl_begin, g.ivl_end - g.ivl_begin};
}

SeasonDataset filter_five_on_five(std::vector<Shift> shifts, std::vector<GameEvent> events,
                                  const BuildOptions& options) {
  SeasonDataset ds;
  ds.shifts = std::move(shifts);
  check_shift_rows(ds.shifts);
  std::sort(ds.shifts.begin(), ds.shifts.end(), shift_order);
  check_no_overlap(ds.shifts);

  for (const Shift& s : ds.shifts) {
    auto [it, inserted] = ds.players.try_emplace(s.player_id, PlayerInfo{s.position, s.team_id});
    if (!inserted) {
      if (it->second.team_id != s.team_id)
        throw ValidationError("player " + s.player_id + " appears on more than one team");
      if (it->second.position != s.position)
        throw ValidationError("conflicting position for player " + s.player_id);
    }
  }

  // Game index with per-game strength derivation.
  for (std::size_t i = 0; i < ds.shifts.size();) {
    std::size_t j = i;
    while (j < ds.shifts.size() && ds.shifts[j].game_id == ds.shifts[i].game_id) ++j;
    SeasonDataset::Game game;
    game.id = ds.shifts[i].game_id;
    game.shift_begin = i;
    game.shift_end = j;
    std::set<std::string> teams;
    for (std::size_t k = i; k < j; ++k) {
      teams.insert(ds.shifts[k].team_id);
      game.end_s = std::max(game.end_s, ds.shifts[k].end_s);
    }
    if (teams.size() > 2) throw ValidationError("more than two teams in game " + game.id);
    auto it = teams.begin();
    game.teams[0] = *it;
    game.teams[1] = teams.size() == 2 ? *std::next(it) : std::string();

    std::vector<StrengthInterval> ivls =
        derive_strength_intervals({ds.shifts.data() + i, j - i});
    game.ivl_begin = ds.five_on_five.size();
    for (StrengthInterval& ivl : ivls)
      if (is_five_on_five(ivl)) ds.five_on_five.push_back(std::move(ivl));
    game.ivl_end = ds.five_on_five.size();

    ds.games.push_back(std::move(game));
    i = j;
  }

  std::sort(events.begin(), events.end(), event_order);
  for (GameEvent& e : events) {
    check_event_row(e);
    const SeasonDataset::Game* game = ds.find_game(e.game_id);
    if (!game) throw ValidationError("event in unknown game " + e.game_id);
    if (e.team_id != game->teams[0] && e.team_id != game->teams[1])
      throw ValidationError("event team " + e.team_id + " not in game " + e.game_id);

    auto shooter_it = ds.players.find(e.shooter_id);
    bool shooter_ok = shooter_it != ds.players.end() &&
                      shooter_it->second.team_id == e.team_id &&
                      on_ice(ds, *game, e.shooter_id, e.elapsed_s);
    if (!shooter_ok) {
      std::string what = "shooter " + e.shooter_id + " not on ice for " + e.team_id +
                         " at " + std::to_string(e.elapsed_s) + " in game " + e.game_id;
      if (!options.permissive) throw ValidationError(what);
      if (options.warnings) *options.warnings << "warning: " << what << " (kept)\n";
    }

    // Retain only events inside a 5v5-both-goalies interval (half-open).
    std::span<const StrengthInterval> ivls = ds.game_five_on_five(*game);
    auto pos = std::partition_point(ivls.begin(), ivls.end(),
                                    [&](const StrengthInterval& v) { return v.start_s <= e.elapsed_s; });
    bool inside = pos != ivls.begin() && e.elapsed_s < std::prev(pos)->end_s;
    if (inside) ds.events.push_back(std::move(e));
  }

  // Per-game event spans (events are sorted by game id, matching ds.games).
  std::size_t cursor = 0;
  for (SeasonDataset::Game& game : ds.games) {
    game.event_begin = cursor;
    while (cursor < ds.events.size() && ds.events[cursor].game_id == game.id) ++cursor;
    game.event_end = cursor;
  }

  for (const auto& [pid, info] : ds.players) ds.team_players[info.team_id].push_back(pid);
  return ds;
}

bool on_ice(const SeasonDataset& ds, const SeasonDataset::Game& game,
            const std::string& player_id, Seconds t) {
  std::span<const Shift> shifts = ds.player_game_shifts(game, player_id);
  auto pos = std::partition_point(shifts.begin(), shifts.end(),
                                  [&](const Shift& s) { return s.start_s <= t; });
  return pos != shifts.begin() && t < std::prev(pos)->end_s;
}

std::pair<std::vector<std::string>, std::vector<std::string>> on_ice_at(
    const SeasonDataset& ds, const std::string& game_id, Seconds t) {
  const SeasonDataset::Game* game = ds.find_game(game_id);
  if (!game) throw ValidationError("unknown game " + game_id);
  std::pair<std::vector<std::string>, std::vector<std::string>> out;
  for (const Shift& s : ds.game_shifts(*game)) {
    if (s.start_s <= t && t < s.end_s)
      (s.team_id == game->teams[0] ? out.first : out.second).push_back(s.player_id);
  }
  return out;  // player-sorted: shifts are ordered by player id within a game
}

}  // namespace wowy
