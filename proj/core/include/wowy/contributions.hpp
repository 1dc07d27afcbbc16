#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "wowy/dataset.hpp"
#include "wowy/types.hpp"

namespace wowy {

/// The four contribution measures. Each decomposes a marginal contribution m
/// into a competitive part c (the player's own scoring) and an altruistic
/// part a = m - c (the lift given to teammates' production).
enum class Measure {
  RawGoals,         // season goal counts
  Goals60,          // team goal rates, unweighted off-ice baseline
  WeightedGoals60,  // goal rates, linemate-weighted off-ice baseline
  WeightedShots60,  // shot rates (shots include goals), linemate-weighted
};

std::string to_string(Measure m);
Measure parse_measure(const std::string& name);

/// Season 5v5 counting stats for one skater. Shots include goals; a SHOT
/// file row is a non-goal shot on goal.
struct AggregateStats {
  std::string player_id;
  std::int64_t team_goals = 0;      // G: goals by the player's team
  std::int64_t goals = 0;           // g: goals by the player
  std::int64_t goals_for = 0;       // gf: team goals with the player on the ice
  std::int64_t team_shots = 0;      // S
  std::int64_t shots = 0;           // s
  std::int64_t shots_for = 0;       // sf
  Seconds toi_s = 0;
  Seconds team_toi_s = 0;
};

/// One player's decomposition under one measure. on_rate/off_rate are per-60
/// rates except under RawGoals, where they are the raw season counts
/// (team goals and team goals with the player off). m = on_rate - off_rate
/// and m = c + a hold for every measure.
struct ContributionRecord {
  std::string player_id;
  Position position = Position::C;
  std::string team_id;
  Measure measure = Measure::RawGoals;
  Seconds toi_s = 0;
  double on_rate = 0;
  double off_rate = 0;
  double m = 0;
  double c = 0;
  double a = 0;
};

/// Counts over 5v5 events only, by direct scan. Throws ValidationError for
/// an unknown player or a goalie.
AggregateStats aggregate_counts(const SeasonDataset& ds, const std::string& player_id);

struct RawContribution {
  std::int64_t m = 0, c = 0, a = 0;
};

/// Raw-goal decomposition: c = g, a = gf - g, m = gf. Integer-exact.
RawContribution raw_goal_decomposition(const AggregateStats& stats);

/// count * 3600 / seconds. Throws UndefinedValueError when seconds == 0.
double per60(std::int64_t count, Seconds seconds);

/// Goals-per-60 decomposition with the unweighted off-ice baseline:
/// m = per60(G, team time) - per60(G - gf, team time with the player off),
/// c = per60(g, player time), a = m - c.
ContributionRecord rate_decomposition(const SeasonDataset& ds, const std::string& player_id);

/// TOI-weighted average of each teammate's events-for rate without the
/// player, weighted by shared ice time: sum(rate_i * w_i) / sum(w_i) with
/// w_i = pair_toi(i, A). Teammates with no time away from the player are
/// excluded from numerator and denominator; if no teammate qualifies the
/// rate is undefined (UndefinedValueError). Goalies are not teammates here.
double weighted_off_rate(const SeasonDataset& ds, const std::string& player_id, Measure measure);

/// Linemate-weighted decomposition (WeightedGoals60 or WeightedShots60):
/// on = per60(gf|sf, toi), off = weighted_off_rate, m = on - off,
/// c = per60(g|s, toi), a = m - c.
ContributionRecord weighted_decomposition(const SeasonDataset& ds, const std::string& player_id,
                                          Measure measure);

/// Primary plus secondary 5v5 assists per 60 minutes.
double assists_per60(const SeasonDataset& ds, const std::string& player_id);

/// Records for every skater with a defined decomposition under the measure,
/// sorted by player id. Skaters whose denominators are undefined (zero 5v5
/// time, no eligible teammates) are skipped.
std::vector<ContributionRecord> compute_all(const SeasonDataset& ds, Measure measure);

/// 5v5 assist counts for every player, one event pass.
std::map<std::string, std::int64_t> assist_counts(const SeasonDataset& ds);

enum class SortKey { Marginal, Competitive, Altruistic, OnRate, OffRate };

/// Filters records by position group and toi >= min_minutes * 60, sorts
/// descending by key (ties: greater toi first, then player id ascending),
/// and keeps the top n. An empty result is valid.
std::vector<ContributionRecord> leaderboard(std::span<const ContributionRecord> records,
                                            Group group, double min_minutes, SortKey key,
                                            std::size_t top_n);

/// Weighted mean of values; weights must be non-negative with positive sum
/// (UndefinedValueError otherwise). Invariant under common scaling of all
/// weights and bounded by [min, max] of the values.
double weighted_mean(std::span<const double> values, std::span<const double> weights);

// contrib.csv: player_id,position,team_id,measure,toi_s,on_rate,off_rate,m,c,a
void write_contrib_csv(const std::filesystem::path& path,
                       std::span<const ContributionRecord> records);
std::vector<ContributionRecord> read_contrib_csv(const std::filesystem::path& path);

}  // namespace wowy
