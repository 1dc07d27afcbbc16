#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wowy {

/// Seconds from the start of a game (shifts, events) or an accumulated
/// duration (time on ice). All interval arithmetic is integer-second and
/// half-open: [start_s, end_s) contains t iff start_s <= t < end_s.
using Seconds = std::int64_t;

enum class Position { C, LW, RW, D, G };

enum class EventType { Shot, Goal };

/// Forwards are C/LW/RW; defensemen are D. Goalies belong to neither group
/// and are excluded from all skater metrics.
enum class Group { Forwards, Defensemen, All };

constexpr bool is_goalie(Position p) { return p == Position::G; }
constexpr bool is_forward(Position p) {
  return p == Position::C || p == Position::LW || p == Position::RW;
}

bool in_group(Position p, Group g);

std::string to_string(Group g);
std::string to_string(Position p);
std::string to_string(EventType t);
Position parse_position(const std::string& code);  // throws ParseError
EventType parse_event_type(const std::string& code);

/// One player's continuous on-ice interval within a game.
struct Shift {
  std::string game_id;
  std::string player_id;
  std::string team_id;
  Position position = Position::C;
  Seconds start_s = 0;
  Seconds end_s = 0;

  bool operator==(const Shift&) const = default;
};

/// A shot or goal. SHOT rows are non-goal shots on goal; GOAL rows count
/// toward both goal and shot tallies. Empty assist ids mean "absent";
/// SHOT events never carry assists.
struct GameEvent {
  std::string game_id;
  Seconds elapsed_s = 0;
  EventType type = EventType::Shot;
  std::string team_id;
  std::string shooter_id;
  std::string assist1_id;  // empty if none
  std::string assist2_id;  // empty if none; present only with assist1

  bool operator==(const GameEvent&) const = default;
};

/// A maximal span of constant on-ice manpower within one game. The two
/// sides of a game are ordered lexicographically by team id; "home" is the
/// lexicographically smaller team (input files carry no venue information,
/// and no metric depends on the labeling).
struct StrengthInterval {
  std::string game_id;
  Seconds start_s = 0;
  Seconds end_s = 0;
  int skaters_home = 0;
  int skaters_away = 0;
  bool goalie_home_on = false;
  bool goalie_away_on = false;

  bool operator==(const StrengthInterval&) const = default;
};

struct PlayerInfo {
  Position position = Position::C;
  std::string team_id;
};

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input file; message carries the file and 1-based line number.
struct ParseError : Error {
  using Error::Error;
};

/// Input that parses but violates a dataset or operation contract.
struct ValidationError : Error {
  using Error::Error;
};

/// A quantity with no defined value (zero time denominator, no eligible
/// teammates for a weighted off-rate, AIC of a zero-residual fit, zero
/// variance in a correlation). Reported distinctly from validation errors.
struct UndefinedValueError : Error {
  using Error::Error;
};

}  // namespace wowy
