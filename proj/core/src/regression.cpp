#include "wowy/regression.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "wowy/contributions.hpp"
#include "wowy/csv.hpp"
#include "wowy/rng.hpp"
#include "wowy/toi.hpp"

namespace wowy {

std::string to_string(Model m) { return m == Model::Playmaking ? "playmaking" : "assists_only"; }

std::string to_string(Group g) {
  switch (g) {
    case Group::Forwards: return "forwards";
    case Group::Defensemen: return "defensemen";
    case Group::All: return "all";
  }
  return "?";
}

namespace {

// Leading digit run of a game id, as an orderable date key.
std::uint64_t game_date_key(const std::string& game_id) {
  std::uint64_t key = 0;
  std::size_t i = 0;
  while (i < game_id.size() && std::isdigit(static_cast<unsigned char>(game_id[i]))) {
    key = key * 10 + std::uint64_t(game_id[i] - '0');
    ++i;
  }
  if (i == 0)
    throw ValidationError("unordered game identifiers: '" + game_id +
                          "' has no leading date digits");
  return key;
}

SeasonDataset rebuild_subset(const SeasonDataset& ds, const std::set<std::string>& game_ids) {
  std::vector<Shift> shifts;
  std::vector<GameEvent> events;
  for (const Shift& s : ds.shifts)
    if (game_ids.contains(s.game_id)) shifts.push_back(s);
  for (const GameEvent& e : ds.events)
    if (game_ids.contains(e.game_id)) events.push_back(e);
  // Rows already passed validation in the full dataset; permissive keeps any
  // glitch events a permissive original build retained.
  BuildOptions opts;
  opts.permissive = true;
  return filter_five_on_five(std::move(shifts), std::move(events), opts);
}

int predictor_count(Model model) { return model == Model::Playmaking ? 2 : 1; }

double predict_sample(const FitResult& fit, const Sample& s) {
  double y = fit.beta[0] + fit.beta[1] * s.assists60_prev;
  if (fit.model == Model::Playmaking) y += fit.beta[2] * s.alt60_prev;
  return y;
}

// Coefficient solve shared by ols_fit and the cross-validation refits. The
// refits only need predictions, so they accept the minimal n >= p + 1.
FitResult solve_least_squares(std::span<const Sample> samples, Model model, int min_n) {
  const int p = predictor_count(model);
  const int n = int(samples.size());
  if (n < min_n)
    throw ValidationError("insufficient samples: n=" + std::to_string(n) + " for p=" +
                          std::to_string(p));

  Eigen::MatrixXd x(n, p + 1);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = samples[i].assists60_prev;
    if (p == 2) x(i, 2) = samples[i].alt60_prev;
    y(i) = samples[i].assists60_next;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < p + 1)
    throw ValidationError("design matrix is rank deficient (collinear predictors)");
  Eigen::VectorXd beta = qr.solve(y);

  FitResult fit;
  fit.model = model;
  fit.beta.assign(beta.data(), beta.data() + p + 1);
  fit.n = n;
  fit.p = p;
  fit.rss = (y - x * beta).squaredNorm();
  const double mean = y.mean();
  const double tss = (y.array() - mean).matrix().squaredNorm();
  fit.r2 = tss > 0 ? std::clamp(1.0 - fit.rss / tss, 0.0, 1.0) : 1.0;
  fit.adj_r2 = n > p + 1 ? 1.0 - (1.0 - fit.r2) * double(n - 1) / double(n - p - 1) : fit.r2;
  return fit;
}

}  // namespace

std::pair<SeasonDataset, SeasonDataset> split_dataset(const SeasonDataset& ds,
                                                      const SplitSpec& spec) {
  if (spec.kind != SplitKind::HalfSeason)
    throw ValidationError("season-to-season split needs two datasets");
  if (ds.games.empty()) throw ValidationError("degenerate split: no games");

  std::vector<std::uint64_t> dates;
  dates.reserve(ds.games.size());
  for (const SeasonDataset::Game& g : ds.games) dates.push_back(game_date_key(g.id));
  std::vector<std::uint64_t> sorted = dates;
  std::sort(sorted.begin(), sorted.end());
  // League-wide median game date; the earlier half includes the median.
  std::uint64_t median = sorted[(sorted.size() - 1) / 2];

  std::set<std::string> first, second;
  for (std::size_t i = 0; i < ds.games.size(); ++i)
    (dates[i] <= median ? first : second).insert(ds.games[i].id);
  if (first.empty() || second.empty())
    throw ValidationError("degenerate split: all games on one side of the median date");
  return {rebuild_subset(ds, first), rebuild_subset(ds, second)};
}

std::pair<SeasonDataset, SeasonDataset> split_dataset(SeasonDataset period1,
                                                      SeasonDataset period2) {
  for (const SeasonDataset::Game& g : period1.games)
    if (period2.find_game(g.id))
      throw ValidationError("periods are not disjoint: game " + g.id + " appears in both");
  return {std::move(period1), std::move(period2)};
}

std::vector<Sample> build_samples(const SeasonDataset& period1, const SeasonDataset& period2,
                                  Group group, double min_minutes) {
  const double min_toi = min_minutes * 60.0;
  std::vector<ContributionRecord> recs1 = compute_all(period1, Measure::WeightedShots60);
  std::map<std::string, double> alt1;
  for (const ContributionRecord& r : recs1) alt1[r.player_id] = r.a;
  ToiTable toi1 = player_toi_table(period1);
  ToiTable toi2 = player_toi_table(period2);
  std::map<std::string, std::int64_t> assists1 = assist_counts(period1);
  std::map<std::string, std::int64_t> assists2 = assist_counts(period2);

  std::vector<Sample> samples;
  for (const auto& [pid, info] : period1.players) {
    if (!in_group(info.position, group)) continue;
    auto it2 = period2.players.find(pid);
    if (it2 == period2.players.end()) continue;
    Seconds t1 = toi1.at(pid);
    Seconds t2 = toi2.at(pid);
    if (double(t1) < min_toi || double(t2) < min_toi) continue;
    auto alt_it = alt1.find(pid);
    if (alt_it == alt1.end()) continue;  // no defined weighted off rate in period 1
    Sample s;
    s.player_id = pid;
    s.group = group;
    s.assists60_prev = per60(assists1.at(pid), t1);
    s.alt60_prev = alt_it->second;
    s.assists60_next = per60(assists2.at(pid), t2);
    s.toi_prev_s = t1;
    s.toi_next_s = t2;
    samples.push_back(std::move(s));
  }
  return samples;  // player-id sorted: players map iterates in order
}

FitResult ols_fit(std::span<const Sample> samples, Model model) {
  return solve_least_squares(samples, model, predictor_count(model) + 2);
}

Criteria information_criteria(const FitResult& fit, const FitResult& full_fit) {
  if (full_fit.model != Model::Playmaking)
    throw ValidationError("full_fit must be the playmaking model");
  if (fit.n != full_fit.n)
    throw ValidationError("information_criteria: fits use different sample counts");
  if (fit.rss <= 0)
    throw UndefinedValueError("AIC undefined: zero residual sum of squares");
  if (full_fit.rss <= 0)
    throw UndefinedValueError("Cp undefined: full model has zero residual sum of squares");
  Criteria out;
  const double n = fit.n;
  out.aic = n * std::log(fit.rss / n) + 2.0 * double(fit.p + 2);
  // Written as a ratio so the full model's own Cp is p+1 exactly.
  out.cp = (fit.rss / full_fit.rss) * double(full_fit.n - full_fit.p - 1) - n +
           2.0 * double(fit.p + 1);
  return out;
}

double kfold_cv(std::span<const Sample> samples, Model model, int k, std::uint64_t seed) {
  const int n = int(samples.size());
  if (k < 2) throw ValidationError("kfold_cv requires k >= 2");
  if (k > n) throw ValidationError("kfold_cv requires k <= n");

  // Canonical order first, then a seeded permutation: the result depends
  // only on the sample set, the seed, and k.
  std::vector<Sample> order(samples.begin(), samples.end());
  std::sort(order.begin(), order.end(),
            [](const Sample& a, const Sample& b) { return a.player_id < b.player_id; });
  rng::Engine eng(seed);
  rng::shuffle(order, eng);

  double total_sq = 0;
  std::vector<Sample> train;
  for (int f = 0; f < k; ++f) {
    const int lo = int(std::int64_t(f) * n / k);
    const int hi = int(std::int64_t(f + 1) * n / k);
    train.clear();
    train.insert(train.end(), order.begin(), order.begin() + lo);
    train.insert(train.end(), order.begin() + hi, order.end());
    FitResult fit = solve_least_squares(train, model, predictor_count(model) + 1);
    for (int i = lo; i < hi; ++i) {
      double err = predict_sample(fit, order[i]) - order[i].assists60_next;
      total_sq += err * err;
    }
  }
  return total_sq / double(n);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("pearson: length mismatch");
  if (x.size() < 2) throw ValidationError("pearson: need at least 2 points");
  const double n = double(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0 || syy == 0)
    throw UndefinedValueError("correlation undefined: zero variance");
  return sxy / std::sqrt(sxx * syy);
}

double predict_playmaking(const FitResult& fit, double assists60, double alt60) {
  if (fit.model != Model::Playmaking)
    throw ValidationError("predict_playmaking requires a playmaking fit");
  return fit.beta[0] + fit.beta[1] * assists60 + fit.beta[2] * alt60;
}

double expected_assists(double per60_rate, Seconds toi_s) {
  if (toi_s < 0) throw ValidationError("negative playing time");
  return per60_rate * double(toi_s) / 3600.0;
}

namespace {

struct JoinedSample {
  Sample s;
  double alt60_next = 0;
};

// Samples restricted to players with a defined shot-based altruistic rate in
// period 2 as well, so both metrics are evaluated on one population.
std::vector<JoinedSample> join_samples(const SeasonDataset& period1, const SeasonDataset& period2,
                                       Group group, double min_minutes) {
  std::vector<ContributionRecord> recs2 = compute_all(period2, Measure::WeightedShots60);
  std::map<std::string, double> alt2;
  for (const ContributionRecord& r : recs2) alt2[r.player_id] = r.a;
  std::vector<JoinedSample> joined;
  for (Sample& s : build_samples(period1, period2, group, min_minutes)) {
    auto it = alt2.find(s.player_id);
    if (it == alt2.end()) continue;
    joined.push_back({std::move(s), it->second});
  }
  return joined;
}

std::vector<Sample> bare_samples(const std::vector<JoinedSample>& joined) {
  std::vector<Sample> out;
  out.reserve(joined.size());
  for (const JoinedSample& j : joined) out.push_back(j.s);
  return out;
}

}  // namespace

std::vector<EvalRow> consistency_report(const SeasonDataset& period1,
                                        const SeasonDataset& period2,
                                        std::span<const double> min_minutes_cutoffs, Group group,
                                        const std::string& split_label) {
  std::vector<EvalRow> rows;
  for (double cutoff : min_minutes_cutoffs) {
    std::vector<JoinedSample> joined = join_samples(period1, period2, group, cutoff);
    const int n = int(joined.size());
    EvalRow assists_row{"assists60", split_label, group, cutoff, std::nullopt, n};
    EvalRow play_row{"playmaking", split_label, group, cutoff, std::nullopt, n};
    if (n >= 3) {
      std::vector<double> a1, a2;
      for (const JoinedSample& j : joined) {
        a1.push_back(j.s.assists60_prev);
        a2.push_back(j.s.assists60_next);
      }
      try {
        assists_row.correlation = pearson(a1, a2);
      } catch (const UndefinedValueError&) {
      }
      try {
        FitResult fit = ols_fit(bare_samples(joined), Model::Playmaking);
        std::vector<double> p1v, p2v;
        for (const JoinedSample& j : joined) {
          p1v.push_back(predict_playmaking(fit, j.s.assists60_prev, j.s.alt60_prev));
          p2v.push_back(predict_playmaking(fit, j.s.assists60_next, j.alt60_next));
        }
        play_row.correlation = pearson(p1v, p2v);
      } catch (const UndefinedValueError&) {
      } catch (const ValidationError&) {
        // too few samples or a degenerate design at this cutoff
      }
    }
    rows.push_back(std::move(assists_row));
    rows.push_back(std::move(play_row));
  }
  return rows;
}

std::vector<PlaymakingRow> playmaking_report(const SeasonDataset& period1,
                                             const SeasonDataset& period2, Group group,
                                             double min_minutes) {
  std::vector<JoinedSample> joined = join_samples(period1, period2, group, min_minutes);
  FitResult fit = ols_fit(bare_samples(joined), Model::Playmaking);
  std::vector<PlaymakingRow> rows;
  rows.reserve(joined.size());
  for (const JoinedSample& j : joined) {
    PlaymakingRow row;
    row.player_id = j.s.player_id;
    row.position = period2.players.at(j.s.player_id).position;
    row.assists60 = j.s.assists60_next;
    row.alt60 = j.alt60_next;
    row.play60 = predict_playmaking(fit, row.assists60, row.alt60);
    row.expected_assists_n = expected_assists(row.play60, j.s.toi_next_s);
    row.toi_s = j.s.toi_next_s;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_playmaking_csv(const std::filesystem::path& path,
                          std::span<const PlaymakingRow> rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "player_id,position,A_per60,Alt_per60,play_per60,expected_assists,toi_s\n";
  for (const PlaymakingRow& r : rows)
    out << r.player_id << ',' << to_string(r.position) << ',' << csv::format_double(r.assists60, 6)
        << ',' << csv::format_double(r.alt60, 6) << ',' << csv::format_double(r.play60, 6) << ','
        << csv::format_double(r.expected_assists_n, 6) << ',' << r.toi_s << '\n';
}

std::vector<PlaymakingRow> read_playmaking_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
  std::vector<PlaymakingRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> f = csv::split(line);
    if (f.size() != 7)
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected 7 fields");
    PlaymakingRow r;
    r.player_id = f[0];
    r.position = parse_position(f[1]);
    r.assists60 = std::stod(f[2]);
    r.alt60 = std::stod(f[3]);
    r.play60 = std::stod(f[4]);
    r.expected_assists_n = std::stod(f[5]);
    r.toi_s = std::stoll(f[6]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_evaluation_csv(const std::filesystem::path& path, std::span<const EvalRow> rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "metric,split,group,min_minutes,correlation,n\n";
  for (const EvalRow& r : rows) {
    out << r.metric << ',' << r.split << ',' << to_string(r.group) << ','
        << csv::format_double(r.min_minutes, 0) << ','
        << (r.correlation ? csv::format_double(*r.correlation, 6) : "nan") << ',' << r.n << '\n';
  }
}

std::string format_model_summary(const std::string& heading, const FitResult& assists_fit,
                                 const FitResult& playmaking_fit, double cv_mse_assists,
                                 double cv_mse_playmaking) {
  auto opt = [](const std::optional<double>& v) {
    return v ? csv::format_double(*v, 4) : std::string("undefined");
  };
  char buf[256];
  std::string out = heading + "\n";
  std::snprintf(buf, sizeof(buf), "  %-12s %10s %10s %10s %8s %10s %8s %10s\n", "model",
                "intercept", "beta_A", "beta_Alt", "adjR2", "AIC", "Cp", "CV_MSE");
  out += buf;
  auto line = [&](const FitResult& f, double cv) {
    std::snprintf(buf, sizeof(buf), "  %-12s %10s %10s %10s %8s %10s %8s %10s\n",
                  to_string(f.model).c_str(), csv::format_double(f.beta[0], 4).c_str(),
                  csv::format_double(f.beta[1], 4).c_str(),
                  f.p >= 2 ? csv::format_double(f.beta[2], 4).c_str() : "-",
                  csv::format_double(f.adj_r2, 4).c_str(), opt(f.aic).c_str(),
                  opt(f.cp).c_str(), csv::format_double(cv, 4).c_str());
    out += buf;
  };
  line(assists_fit, cv_mse_assists);
  line(playmaking_fit, cv_mse_playmaking);
  char tail[128];
  std::snprintf(tail, sizeof(tail), "  n=%d\n", assists_fit.n);
  out += tail;
  return out;
}

}  // namespace wowy
