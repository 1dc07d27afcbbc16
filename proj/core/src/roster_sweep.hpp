#pragma once

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "wowy/dataset.hpp"
#include "wowy/toi.hpp"

// Shared per-game machinery for the toi and contributions modules: walks one
// team's 5v5 time as maximal slices of constant on-ice roster. Not installed.
namespace wowy::detail {

struct TeamIndex {
  std::string team_id;
  std::vector<std::string> ids;  // sorted; dense index = position here
  std::vector<Position> positions;
  std::map<std::string, int> to_dense;

  static TeamIndex build(const SeasonDataset& ds, const std::string& team) {
    TeamIndex idx;
    idx.team_id = team;
    auto it = ds.team_players.find(team);
    if (it == ds.team_players.end()) throw ValidationError("unknown team " + team);
    idx.ids = it->second;
    idx.positions.reserve(idx.ids.size());
    for (std::size_t i = 0; i < idx.ids.size(); ++i) {
      idx.to_dense[idx.ids[i]] = static_cast<int>(i);
      idx.positions.push_back(ds.players.at(idx.ids[i]).position);
    }
    return idx;
  }

  int dense(const std::string& id) const {
    auto it = to_dense.find(id);
    return it == to_dense.end() ? -1 : it->second;
  }
};

/// Calls slice(start, end, roster) for each maximal span of one game's 5v5
/// time during which the team's on-ice roster is constant (roster = sorted
/// dense indices), and event(ev, roster) for each of the team's retained
/// events, in time order. Events at a slice boundary belong to the incoming
/// slice (half-open convention throughout).
template <class SliceFn, class EventFn>
void sweep_team_game(const SeasonDataset& ds, const SeasonDataset::Game& game,
                     const TeamIndex& idx, SliceFn&& slice, EventFn&& event) {
  struct Mark {
    Seconds t;
    int player;
    bool add;
  };

  // Team shifts once per game; marks rebuilt per 5v5 interval.
  std::vector<Shift const*> team_shifts;
  for (const Shift& s : ds.game_shifts(game))
    if (s.team_id == idx.team_id) team_shifts.push_back(&s);

  std::span<const GameEvent> events = ds.game_events(game);
  std::size_t ev = 0;
  auto emit = [&](Seconds a, Seconds b, const std::vector<int>& roster) {
    slice(a, b, std::span<const int>(roster));
    while (ev < events.size() && events[ev].elapsed_s < b) {
      if (events[ev].team_id == idx.team_id && events[ev].elapsed_s >= a)
        event(events[ev], std::span<const int>(roster));
      ++ev;
    }
  };

  std::vector<Mark> marks;
  std::vector<int> roster;
  for (const StrengthInterval& ivl : ds.game_five_on_five(game)) {
    marks.clear();
    roster.clear();
    for (const Shift* s : team_shifts) {
      if (s->end_s <= ivl.start_s || s->start_s >= ivl.end_s) continue;
      int d = idx.dense(s->player_id);
      marks.push_back({std::max(s->start_s, ivl.start_s), d, true});
      marks.push_back({std::min(s->end_s, ivl.end_s), d, false});
    }
    std::sort(marks.begin(), marks.end(),
              [](const Mark& a, const Mark& b) { return a.t < b.t; });
    Seconds cur = ivl.start_s;
    std::size_t i = 0;
    while (i < marks.size()) {
      Seconds t = marks[i].t;
      if (t > cur && !roster.empty()) emit(cur, t, roster);
      for (; i < marks.size() && marks[i].t == t; ++i) {
        if (marks[i].add) {
          roster.insert(std::lower_bound(roster.begin(), roster.end(), marks[i].player),
                        marks[i].player);
        } else {
          roster.erase(std::lower_bound(roster.begin(), roster.end(), marks[i].player));
        }
      }
      cur = std::max(cur, t);
    }
    if (cur < ivl.end_s && !roster.empty()) emit(cur, ivl.end_s, roster);
    // Skip any of this interval's events not consumed above (possible only
    // for spans with an empty roster, which a 5v5 interval cannot produce
    // for its own teams).
    while (ev < events.size() && events[ev].elapsed_s < ivl.end_s) ++ev;
  }
}

}  // namespace wowy::detail
