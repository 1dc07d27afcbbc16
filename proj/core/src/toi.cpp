#include "wowy/toi.hpp"

#include <algorithm>
#include <fstream>

#include "roster_sweep.hpp"

namespace wowy {

namespace {

const PlayerInfo& require_player(const SeasonDataset& ds, const std::string& player_id) {
  auto it = ds.players.find(player_id);
  if (it == ds.players.end()) throw ValidationError("unknown player " + player_id);
  return it->second;
}

}  // namespace

Seconds player_toi(const SeasonDataset& ds, const std::string& player_id) {
  require_player(ds, player_id);
  Seconds total = 0;
  for (const SeasonDataset::Game& game : ds.games) {
    std::span<const Shift> shifts = ds.player_game_shifts(game, player_id);
    if (shifts.empty()) continue;
    std::span<const StrengthInterval> ivls = ds.game_five_on_five(game);
    std::size_t a = 0, b = 0;
    while (a < shifts.size() && b < ivls.size()) {
      total += overlap(shifts[a].start_s, shifts[a].end_s, ivls[b].start_s, ivls[b].end_s);
      if (shifts[a].end_s <= ivls[b].end_s)
        ++a;
      else
        ++b;
    }
  }
  return total;
}

Seconds pair_toi(const SeasonDataset& ds, const std::string& player_i,
                 const std::string& player_a) {
  if (player_i == player_a)
    throw ValidationError("pair_toi requires two distinct players");
  const PlayerInfo& pi = require_player(ds, player_i);
  const PlayerInfo& pa = require_player(ds, player_a);
  if (pi.team_id != pa.team_id)
    throw ValidationError("players " + player_i + " and " + player_a + " are on different teams");

  Seconds total = 0;
  for (const SeasonDataset::Game& game : ds.games) {
    std::span<const Shift> si = ds.player_game_shifts(game, player_i);
    std::span<const Shift> sa = ds.player_game_shifts(game, player_a);
    if (si.empty() || sa.empty()) continue;
    std::span<const StrengthInterval> ivls = ds.game_five_on_five(game);
    std::size_t a = 0, b = 0, c = 0;
    while (a < si.size() && b < sa.size() && c < ivls.size()) {
      Seconds lo = std::max({si[a].start_s, sa[b].start_s, ivls[c].start_s});
      Seconds hi = std::min({si[a].end_s, sa[b].end_s, ivls[c].end_s});
      if (hi > lo) total += hi - lo;
      // advance whichever interval ends first
      Seconds min_end = std::min({si[a].end_s, sa[b].end_s, ivls[c].end_s});
      if (si[a].end_s == min_end) ++a;
      else if (sa[b].end_s == min_end) ++b;
      else ++c;
    }
  }
  return total;
}

Seconds toi_without(const SeasonDataset& ds, const std::string& player_i,
                    const std::string& player_a) {
  return player_toi(ds, player_i) - pair_toi(ds, player_i, player_a);
}

Seconds team_toi(const SeasonDataset& ds, const std::string& team_id) {
  if (!ds.team_players.contains(team_id)) throw ValidationError("unknown team " + team_id);
  Seconds total = 0;
  for (const SeasonDataset::Game& game : ds.games) {
    if (game.teams[0] != team_id && game.teams[1] != team_id) continue;
    for (const StrengthInterval& ivl : ds.game_five_on_five(game))
      total += ivl.end_s - ivl.start_s;
  }
  return total;
}

ToiTable player_toi_table(const SeasonDataset& ds) {
  ToiTable table;
  for (const auto& [pid, info] : ds.players) table[pid] = 0;
  for (const auto& [team, members] : ds.team_players) {
    detail::TeamIndex idx = detail::TeamIndex::build(ds, team);
    std::vector<Seconds> acc(members.size(), 0);
    for (const SeasonDataset::Game& game : ds.games) {
      if (game.teams[0] != team && game.teams[1] != team) continue;
      detail::sweep_team_game(
          ds, game, idx,
          [&](Seconds a, Seconds b, std::span<const int> roster) {
            for (int d : roster) acc[d] += b - a;
          },
          [](const GameEvent&, std::span<const int>) {});
    }
    for (std::size_t d = 0; d < members.size(); ++d) table[idx.ids[d]] = acc[d];
  }
  return table;
}

PairToiTable pair_toi_table(const SeasonDataset& ds) {
  PairToiTable table;
  for (const auto& [team, members] : ds.team_players) {
    detail::TeamIndex idx = detail::TeamIndex::build(ds, team);
    const std::size_t n = members.size();
    std::vector<Seconds> acc(n * n, 0);
    for (const SeasonDataset::Game& game : ds.games) {
      if (game.teams[0] != team && game.teams[1] != team) continue;
      detail::sweep_team_game(
          ds, game, idx,
          [&](Seconds a, Seconds b, std::span<const int> roster) {
            for (std::size_t x = 0; x < roster.size(); ++x)
              for (std::size_t y = x + 1; y < roster.size(); ++y)
                acc[roster[x] * n + roster[y]] += b - a;
          },
          [](const GameEvent&, std::span<const int>) {});
    }
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = x + 1; y < n; ++y)
        if (acc[x * n + y] > 0) table[{idx.ids[x], idx.ids[y]}] = acc[x * n + y];
  }
  return table;
}

void write_toi_csv(const std::filesystem::path& path, const ToiTable& table) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "player_id,toi_s\n";
  for (const auto& [pid, toi] : table) out << pid << ',' << toi << '\n';
}

void write_pair_toi_csv(const std::filesystem::path& path, const PairToiTable& table) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "player_i,player_j,seconds\n";
  for (const auto& [pair, toi] : table)
    out << pair.first << ',' << pair.second << ',' << toi << '\n';
}

}  // namespace wowy
