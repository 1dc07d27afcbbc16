#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wowy/dataset.hpp"
#include "wowy/types.hpp"

namespace wowy {

/// The two models compared: assists alone versus assists plus the
/// shot-based altruistic contribution ("playmaking" model). Expected assists
/// per 60 from the playmaking model are the playmaking metric.
enum class Model { AssistsOnly, Playmaking };

std::string to_string(Model m);

enum class SplitKind { HalfSeason, SeasonToSeason };

struct SplitSpec {
  SplitKind kind = SplitKind::HalfSeason;
};

/// One regression observation: period-1 predictors, period-2 response.
struct Sample {
  std::string player_id;
  Group group = Group::Forwards;
  double assists60_prev = 0;   // A: assists per 60, period 1
  double alt60_prev = 0;       // Alt: shot-based altruistic per 60, period 1
  double assists60_next = 0;   // y: assists per 60, period 2
  Seconds toi_prev_s = 0;
  Seconds toi_next_s = 0;
};

struct FitResult {
  Model model = Model::AssistsOnly;
  /// Intercept first, then one slope per predictor (A, then Alt).
  std::vector<double> beta;
  int n = 0;
  int p = 0;  // predictor count, excluding the intercept
  double rss = 0;
  double r2 = 0;
  double adj_r2 = 0;
  std::optional<double> aic;  // filled by information_criteria
  std::optional<double> cp;
};

/// Splits one dataset into two disjoint periods at the league-wide median
/// game date (earlier half inclusive of the median). Game ids must begin
/// with a digit date prefix (e.g. YYYYMMDD...). Throws ValidationError on
/// ids without a digit prefix ("unordered") or when a period comes out
/// empty ("degenerate split").
std::pair<SeasonDataset, SeasonDataset> split_dataset(const SeasonDataset& ds,
                                                      const SplitSpec& spec);

/// Season-to-season pairing of two supplied datasets; validates the two
/// periods share no game id.
std::pair<SeasonDataset, SeasonDataset> split_dataset(SeasonDataset period1,
                                                      SeasonDataset period2);

/// One sample per player of the position group with at least
/// min_minutes * 60 seconds of 5v5 time in BOTH periods (inclusive
/// threshold) and a defined shot-based altruistic contribution in period 1.
/// Sorted by player id. May be empty.
std::vector<Sample> build_samples(const SeasonDataset& period1, const SeasonDataset& period2,
                                  Group group, double min_minutes);

/// Least squares fit of y on an intercept plus the model's predictors,
/// solved by a column-pivoted Householder QR. Requires n >= p + 2 and a
/// design matrix of full column rank (relative tolerance 1e-10).
FitResult ols_fit(std::span<const Sample> samples, Model model);

struct Criteria {
  double aic = 0;
  double cp = 0;
};

/// AIC = n ln(RSS/n) + 2k with k = p + 2 (intercept, slopes, error
/// variance); Cp = (RSS/RSS_full)(n - p_full - 1) - n + 2(p + 1) with the
/// error variance taken from full_fit, the Playmaking fit on the same
/// samples. The full model's own Cp is p_full + 1 exactly. Throws
/// UndefinedValueError when RSS is zero.
Criteria information_criteria(const FitResult& fit, const FitResult& full_fit);

/// Mean squared prediction error over k contiguous folds of a seeded
/// permutation (samples are sorted by player id first, so the result is
/// invariant to input order; same seed and inputs give bit-identical
/// results). Requires 2 <= k <= n.
double kfold_cv(std::span<const Sample> samples, Model model, int k, std::uint64_t seed);

/// Sample Pearson correlation. Requires equal lengths >= 2; throws
/// UndefinedValueError when either series has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

double predict_playmaking(const FitResult& fit, double assists60, double alt60);

/// per60 * toi_s / 3600.
double expected_assists(double per60_rate, Seconds toi_s);

/// One row of the consistency evaluation. A missing correlation (too few
/// qualifying players, or zero variance in the metric) is surfaced as an
/// empty optional and written as "nan".
struct EvalRow {
  std::string metric;  // "assists60" or "playmaking"
  std::string split;   // "half" or "seasons"
  Group group = Group::Forwards;
  double min_minutes = 0;
  std::optional<double> correlation;
  int n = 0;
};

/// Split-half consistency of assists/60 and of the playmaking prediction,
/// for each requested minimum-minutes cutoff. Playmaking values in both
/// periods are predictions from one Playmaking fit (period-1 predictors to
/// period-2 assists), applied to each period's own (A, Alt).
std::vector<EvalRow> consistency_report(const SeasonDataset& period1,
                                        const SeasonDataset& period2,
                                        std::span<const double> min_minutes_cutoffs, Group group,
                                        const std::string& split_label);

struct PlaymakingRow {
  std::string player_id;
  Position position = Position::C;
  double assists60 = 0;          // period-2 assists per 60
  double alt60 = 0;              // period-2 shot-based altruistic per 60
  double play60 = 0;             // playmaking metric: expected assists per 60
  double expected_assists_n = 0; // play60 scaled by period-2 playing time
  Seconds toi_s = 0;
};

/// Fits the playmaking model on period1 -> period2 samples and evaluates it
/// on each sampled player's period-2 (A, Alt). Sorted by player id.
std::vector<PlaymakingRow> playmaking_report(const SeasonDataset& period1,
                                             const SeasonDataset& period2, Group group,
                                             double min_minutes);

// playmaking.csv: player_id,position,A_per60,Alt_per60,play_per60,expected_assists,toi_s
void write_playmaking_csv(const std::filesystem::path& path,
                          std::span<const PlaymakingRow> rows);
std::vector<PlaymakingRow> read_playmaking_csv(const std::filesystem::path& path);

// evaluation.csv: metric,split,group,min_minutes,correlation,n
void write_evaluation_csv(const std::filesystem::path& path, std::span<const EvalRow> rows);

/// Aligned plain-text comparison of the two fitted models (coefficients,
/// adjusted R2, AIC, Cp, cross-validated MSE).
std::string format_model_summary(const std::string& heading, const FitResult& assists_fit,
                                 const FitResult& playmaking_fit, double cv_mse_assists,
                                 double cv_mse_playmaking);

}  // namespace wowy
