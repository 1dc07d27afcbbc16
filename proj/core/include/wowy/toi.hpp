#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>

#include "wowy/dataset.hpp"
#include "wowy/types.hpp"

namespace wowy {

/// Length of the intersection of two half-open intervals, >= 0.
constexpr Seconds overlap(Seconds a_start, Seconds a_end, Seconds b_start, Seconds b_end) {
  Seconds lo = a_start > b_start ? a_start : b_start;
  Seconds hi = a_end < b_end ? a_end : b_end;
  return hi > lo ? hi - lo : 0;
}

/// player_id -> 5v5 seconds.
using ToiTable = std::map<std::string, Seconds>;

/// (player_i, player_j) with i < j lexicographically -> shared 5v5 seconds.
/// Same-team pairs with positive shared time only.
using PairToiTable = std::map<std::pair<std::string, std::string>, Seconds>;

/// Total 5v5 seconds for one player (shifts intersected with the game's 5v5
/// intervals). Throws ValidationError for an unknown player.
Seconds player_toi(const SeasonDataset& ds, const std::string& player_id);

/// Shared 5v5 seconds of two distinct players on the same team.
Seconds pair_toi(const SeasonDataset& ds, const std::string& player_i,
                 const std::string& player_a);

/// 5v5 seconds of player_i with player_a off the ice:
/// player_toi(i) - pair_toi(i, a), exactly.
Seconds toi_without(const SeasonDataset& ds, const std::string& player_i,
                    const std::string& player_a);

/// Total 5v5 seconds across all games a team appears in (the denominator of
/// team-level rates; both teams of a game accrue the same 5v5 time).
Seconds team_toi(const SeasonDataset& ds, const std::string& team_id);

/// Bulk tables via a per-game boundary sweep (not per-second). The scalar
/// functions above compute each value independently by interval
/// intersection; the two paths agree exactly and both are checked against a
/// per-second brute-force oracle in the tests.
ToiTable player_toi_table(const SeasonDataset& ds);
PairToiTable pair_toi_table(const SeasonDataset& ds);

// toi.csv:      header player_id,toi_s
// pair_toi.csv: header player_i,player_j,seconds  (i < j lexicographically)
void write_toi_csv(const std::filesystem::path& path, const ToiTable& table);
void write_pair_toi_csv(const std::filesystem::path& path, const PairToiTable& table);

}  // namespace wowy
