#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "wowy/types.hpp"

namespace wowy {

/// Ground-truth abilities of one simulated player. shoot_rate is the
/// player's expected individual shots per 60 while on the ice;
/// playmake_boost multiplies each linemate's shot generation; goal_prob is
/// the chance any one of the player's shots scores.
struct LatentPlayer {
  std::string player_id;
  Position position = Position::C;
  double shoot_rate = 0;
  double playmake_boost = 1;
  double goal_prob = 0;
};

/// Roster structure: 4 forward lines of 3 (LW, C, RW), 3 defense pairs, one
/// goalie.
struct TeamRoster {
  std::string team_id;
  std::array<std::array<std::string, 3>, 4> forward_lines;
  std::array<std::array<std::string, 2>, 3> defense_pairs;
  std::string goalie;
};

struct SimConfig {
  int teams = 10;  // even, >= 2; ignored when explicit rosters are given
  int games_per_team = 40;
  double shift_mean_s = 45;
  std::uint64_t seed = 0;  // mandatory; every stream derives from it
  int start_date = 20230101;  // YYYYMMDD; one round of games per day

  // Ability distributions for generated rosters.
  double forward_shoot_mean = 7.0;
  double forward_shoot_sd = 1.5;
  double defense_shoot_mean = 3.0;
  double defense_shoot_sd = 1.0;
  double boost_min = 0.80;
  double boost_max = 1.25;
  double goal_prob = 0.09;

  /// Chance a roster slot is filled from another line/pair for one shift;
  /// gives every teammate pair both shared and separated ice time.
  double line_mix_prob = 0.15;
  double max_team_rate_per60 = 200.0;
  double no_assist_prob = 0.15;
  double second_assist_prob = 0.65;

  /// When non-empty, used instead of generated rosters; abilities must then
  /// be supplied for every rostered player.
  std::vector<TeamRoster> rosters;
  std::map<std::string, LatentPlayer> abilities;
};

/// Key-value config file: one `key = value` per line, '#' comments. Unknown
/// keys are errors. `seed` is required.
SimConfig load_sim_config(const std::filesystem::path& path);

struct SimOutput {
  std::vector<Shift> shifts;
  std::vector<GameEvent> events;
  std::vector<LatentPlayer> truth;  // sorted by player id
};

/// Generates a full synthetic season: a round-robin schedule, line-based
/// shift rotation with stochastic lengths, and per-unit shot arrivals at
/// rate sum_i shoot_i * prod_{j != i} boost_j (clamped to
/// max_team_rate_per60). The shooter is drawn proportionally to shoot_rate,
/// scores with the shooter's goal_prob, and a goal credits up to two
/// distinct on-ice assisters drawn proportionally to playmake_boost. Every
/// game draws from its own (seed, game_id) stream, so output is
/// deterministic and games are independent. Emitted play is entirely 5v5
/// with both goalies on.
SimOutput generate_season(const SimConfig& config);

/// Σ_i shoot_i × Π_{j≠i} boost_j for one on-ice unit, before clamping.
double unit_shot_rate(std::span<const LatentPlayer> unit);

// truth.csv: player_id,position,shoot_rate,playmake_boost,goal_prob
void write_truth_csv(const std::filesystem::path& path, std::span<const LatentPlayer> truth);

struct Table2Scenario {
  SimConfig config;
  std::string player_a;  // the below-average top-line player
};

/// One team built as the hypothetical above/below-average roster: the first
/// forward line and first defense pair above average except for one
/// below-average player embedded at the top-line LW slot; everyone else
/// below average. The opponent is uniformly mid-level. Used to demonstrate
/// the off-ice-baseline bias the linemate weighting corrects.
Table2Scenario table2_scenario(std::uint64_t seed);

}  // namespace wowy
