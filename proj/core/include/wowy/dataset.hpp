#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wowy/types.hpp"

namespace wowy {

// ---------------------------------------------------------------------------
// File parsing.
//
// Shifts file (exact header):  game_id,player_id,team_id,position,start_s,end_s
// Events file (exact header):  game_id,elapsed_s,event_type,team_id,shooter_id,assist1_id,assist2_id
// UTF-8, LF or CRLF, integer seconds, empty string for an absent assist.
// ---------------------------------------------------------------------------

inline constexpr const char* kShiftsHeader =
    "game_id,player_id,team_id,position,start_s,end_s";
inline constexpr const char* kEventsHeader =
    "game_id,elapsed_s,event_type,team_id,shooter_id,assist1_id,assist2_id";

/// Parses and validates a shifts file: every row well formed, start < end,
/// and a player's shifts within one game pairwise non-overlapping.
std::vector<Shift> parse_shifts(const std::filesystem::path& path);

/// Parses and validates an events file: SHOT rows carry no assists, assist2
/// only with assist1, assisters distinct from each other and the shooter.
std::vector<GameEvent> parse_events(const std::filesystem::path& path);

void write_shifts_csv(const std::filesystem::path& path, std::span<const Shift> shifts);
void write_events_csv(const std::filesystem::path& path, std::span<const GameEvent> events);

// ---------------------------------------------------------------------------
// Strength intervals and the filtered season dataset.
// ---------------------------------------------------------------------------

/// Derives the manpower partition of one game from all of its shifts.
/// The result partitions [0, game_end) (game_end = max shift end) with
/// constant per-side skater counts and goalie presence; adjacent intervals
/// differ in at least one of those fields. Empty input yields empty output.
std::vector<StrengthInterval> derive_strength_intervals(std::span<const Shift> game_shifts);

constexpr bool is_five_on_five(const StrengthInterval& ivl) {
  return ivl.skaters_home == 5 && ivl.skaters_away == 5 && ivl.goalie_home_on &&
         ivl.goalie_away_on;
}

struct BuildOptions {
  /// Downgrades shooter-not-on-ice from a hard error to a warning (the event
  /// is kept; real play-by-play data contains recording glitches).
  bool permissive = false;
  /// Sink for permissive-mode warnings; null discards them.
  std::ostream* warnings = nullptr;
};

/// Season data restricted to 5-on-5 play with both goalies on the ice.
/// Immutable once built; all metric modules read from this view only.
struct SeasonDataset {
  struct Game {
    std::string id;
    Seconds end_s = 0;
    std::array<std::string, 2> teams;  // lexicographic; [0] is the "home" side
    // Half-open index ranges into the parallel vectors below.
    std::size_t shift_begin = 0, shift_end = 0;
    std::size_t event_begin = 0, event_end = 0;
    std::size_t ivl_begin = 0, ivl_end = 0;
  };

  std::vector<Shift> shifts;              // sorted by (game, player, start)
  std::vector<GameEvent> events;          // 5v5-retained only; sorted by (game, time)
  std::vector<StrengthInterval> five_on_five;  // 5v5 intervals only; sorted by (game, start)
  std::map<std::string, PlayerInfo> players;
  std::vector<Game> games;                // sorted by id
  std::map<std::string, std::vector<std::string>> team_players;  // sorted ids, goalies included

  const Game* find_game(const std::string& game_id) const;  // null if unknown
  std::span<const Shift> game_shifts(const Game& g) const;
  std::span<const Shift> player_game_shifts(const Game& g, const std::string& player_id) const;
  std::span<const GameEvent> game_events(const Game& g) const;
  std::span<const StrengthInterval> game_five_on_five(const Game& g) const;
};

/// Builds the season dataset: validates shifts and events, derives strength
/// intervals per game, and retains only events inside 5v5-both-goalies
/// intervals. Throws ValidationError on contract violations (overlapping
/// shifts, conflicting player team/position, unknown event game or team,
/// shooter not on ice unless permissive).
SeasonDataset filter_five_on_five(std::vector<Shift> shifts, std::vector<GameEvent> events,
                                  const BuildOptions& options = {});

/// Players on the ice at instant t (shift contains t iff start <= t < end),
/// split by side and sorted by player id. Throws ValidationError for an
/// unknown game; a t outside the game span yields empty sets.
std::pair<std::vector<std::string>, std::vector<std::string>> on_ice_at(
    const SeasonDataset& ds, const std::string& game_id, Seconds t);

/// True iff the player has a shift containing t in the given game.
bool on_ice(const SeasonDataset& ds, const SeasonDataset::Game& game,
            const std::string& player_id, Seconds t);

}  // namespace wowy
