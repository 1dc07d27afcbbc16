#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "support/oracles.hpp"
#include "support/tempdir.hpp"
#include "wowy/contributions.hpp"
#include "wowy/dataset.hpp"
#include "wowy/regression.hpp"
#include "wowy/rng.hpp"
#include "wowy/simulate.hpp"
#include "wowy/toi.hpp"

using namespace wowy;

namespace {

Sample sample(std::string pid, double a_prev, double alt_prev, double y) {
  Sample s;
  s.player_id = std::move(pid);
  s.assists60_prev = a_prev;
  s.alt60_prev = alt_prev;
  s.assists60_next = y;
  s.toi_prev_s = 30000;
  s.toi_next_s = 30000;
  return s;
}

// (A, y) points as samples with Alt unused.
std::vector<Sample> points(const std::vector<std::pair<double, double>>& xy) {
  std::vector<Sample> out;
  int i = 0;
  for (auto [a, y] : xy) out.push_back(sample("p" + std::to_string(i++), a, 0, y));
  return out;
}

SeasonDataset sim_season(int teams, int games, std::uint64_t seed) {
  SimConfig cfg;
  cfg.teams = teams;
  cfg.games_per_team = games;
  cfg.seed = seed;
  SimOutput out = generate_season(cfg);
  return filter_five_on_five(std::move(out.shifts), std::move(out.events));
}

}  // namespace

TEST_CASE("split_dataset by league-wide median date") {
  SUBCASE("two games on distinct dates go one per half") {
    SeasonDataset ds = sim_season(2, 2, 5);
    REQUIRE(ds.games.size() == 2);
    auto [p1, p2] = split_dataset(ds, SplitSpec{SplitKind::HalfSeason});
    CHECK(p1.games.size() == 1);
    CHECK(p2.games.size() == 1);
    CHECK(p1.games[0].id < p2.games[0].id);
  }
  SUBCASE("all games on one date is degenerate") {
    SeasonDataset ds = sim_season(4, 1, 5);  // one round, one shared date
    CHECK_THROWS_WITH_AS(split_dataset(ds, SplitSpec{SplitKind::HalfSeason}),
                         doctest::Contains("degenerate split"), ValidationError);
  }
  SUBCASE("game ids without a date prefix are unordered") {
    std::vector<Shift> shifts;
    const Position pos[5] = {Position::C, Position::LW, Position::RW, Position::D, Position::D};
    for (const std::string& game : {std::string("alpha"), std::string("beta")})
      for (const std::string& team : {std::string("H"), std::string("A")}) {
        for (int i = 0; i < 5; ++i)
          shifts.push_back({game, team + "S" + std::to_string(i), team, pos[i], 0, 100});
        shifts.push_back({game, team + "G", team, Position::G, 0, 100});
      }
    SeasonDataset ds = filter_five_on_five(shifts, {});
    CHECK_THROWS_WITH_AS(split_dataset(ds, SplitSpec{SplitKind::HalfSeason}),
                         doctest::Contains("unordered"), ValidationError);
  }
  SUBCASE("82-round schedule halves differ by at most one game per team") {
    SeasonDataset ds = sim_season(2, 82, 5);
    auto [p1, p2] = split_dataset(ds, SplitSpec{SplitKind::HalfSeason});
    // independent oracle: sort the dates and count
    std::vector<std::string> ids;
    for (const auto& g : ds.games) ids.push_back(g.id);
    std::sort(ids.begin(), ids.end());
    std::size_t expected_first = (ids.size() + 1) / 2;
    CHECK(p1.games.size() == expected_first);
    CHECK(p2.games.size() == ids.size() - expected_first);
    CHECK(std::llabs(std::int64_t(p1.games.size()) - std::int64_t(p2.games.size())) <= 1);
    // the halves are exactly the date-sorted prefix and suffix
    for (std::size_t i = 0; i < expected_first; ++i) CHECK(p1.find_game(ids[i]) != nullptr);
    for (std::size_t i = expected_first; i < ids.size(); ++i)
      CHECK(p2.find_game(ids[i]) != nullptr);
  }
  SUBCASE("season-to-season pairing validates disjointness") {
    SeasonDataset a = sim_season(2, 2, 5);
    SeasonDataset b = sim_season(2, 2, 5);
    CHECK_THROWS_WITH_AS(split_dataset(a, b), doctest::Contains("not disjoint"),
                         ValidationError);
    SimConfig cfg;
    cfg.teams = 2;
    cfg.games_per_team = 2;
    cfg.seed = 5;
    cfg.start_date = 20240101;  // different dates -> disjoint ids
    SimOutput out = generate_season(cfg);
    SeasonDataset c = filter_five_on_five(std::move(out.shifts), std::move(out.events));
    auto [p1, p2] = split_dataset(std::move(a), std::move(c));
    CHECK(p1.games.size() == 2);
    CHECK(p2.games.size() == 2);
  }
}

TEST_CASE("build_samples applies the inclusive cutoff in both periods") {
  // Hand-built 12-game league, one game per date. The HOME side rotates two
  // units per game; P sits out one game per half (giving teammates time
  // without P, so the weighted off rate is defined) and finishes with
  // exactly 18000 s (300 min) of 5v5 in each half. Q's final shift is 60 s
  // short, leaving 17940 s (299 min) in the second half.
  std::vector<Shift> shifts;
  const Position unit_pos[5] = {Position::C, Position::LW, Position::RW, Position::D,
                                Position::D};
  for (int g = 1; g <= 12; ++g) {
    char gid[32];
    std::snprintf(gid, sizeof(gid), "202301%02d-HOME-AWAY", g);
    const bool rest_game = g == 3 || g == 9;   // P and Q sit these out
    const bool short_game = g == 12;           // Q leaves 60 s early
    const std::string unit_a[5] = {rest_game ? "R1" : "P", rest_game ? "R2" : "Q", "A3", "A4",
                                   "A5"};
    for (int i = 0; i < 5; ++i) {
      if (short_game && unit_a[i] == "Q") {
        // R2 fills the LW slot it also covers in the rest games.
        shifts.push_back({gid, "Q", "HOME", unit_pos[i], 0, 3540});
        shifts.push_back({gid, "R2", "HOME", unit_pos[i], 3540, 3600});
      } else {
        shifts.push_back({gid, unit_a[i], "HOME", unit_pos[i], 0, 3600});
      }
      shifts.push_back({gid, "B" + std::to_string(i + 1), "HOME", unit_pos[i], 3600, 7200});
      shifts.push_back({gid, "AW" + std::to_string(i + 1), "AWAY", unit_pos[i], 0, 7200});
    }
    shifts.push_back({gid, "HG", "HOME", Position::G, 0, 7200});
    shifts.push_back({gid, "AG", "AWAY", Position::G, 0, 7200});
  }
  SeasonDataset ds = filter_five_on_five(shifts, {});
  auto [p1, p2] = split_dataset(ds, SplitSpec{SplitKind::HalfSeason});
  REQUIRE(p1.games.size() == 6);
  REQUIRE(player_toi(p1, "P") == 18000);
  REQUIRE(player_toi(p2, "P") == 18000);
  REQUIRE(player_toi(p2, "Q") == 17940);

  auto ids = [](const std::vector<Sample>& v) {
    std::set<std::string> out;
    for (const Sample& s : v) out.insert(s.player_id);
    return out;
  };
  // At 300 minutes: P sits exactly at the threshold and is included; Q is a
  // minute short in period 2 and is excluded. A3 qualifies; the B unit and
  // the AWAY five never play apart, so their weighted off rate is undefined
  // and they produce no sample.
  std::set<std::string> at300 = ids(build_samples(p1, p2, Group::Forwards, 300));
  CHECK(at300 == std::set<std::string>{"A3", "P"});
  // At 299 minutes Q is exactly at the threshold again: inclusive.
  std::set<std::string> at299 = ids(build_samples(p1, p2, Group::Forwards, 299));
  CHECK(at299 == std::set<std::string>{"A3", "P", "Q"});
  // Defense group picks up the unit-A defensemen instead.
  std::set<std::string> dmen = ids(build_samples(p1, p2, Group::Defensemen, 300));
  CHECK(dmen == std::set<std::string>{"A4", "A5"});

  SUBCASE("sample fields carry per-period TOI and rates") {
    std::vector<Sample> samples = build_samples(p1, p2, Group::Forwards, 300);
    CHECK(std::is_sorted(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) {
      return a.player_id < b.player_id;
    }));
    for (const Sample& s : samples) {
      CHECK(s.toi_prev_s == player_toi(p1, s.player_id));
      CHECK(s.toi_next_s == player_toi(p2, s.player_id));
      CHECK(s.assists60_prev == 0.0);  // no events in this fixture
      CHECK(s.assists60_next == 0.0);
    }
  }
}

TEST_CASE("ols_fit exact and hand-solved fixtures") {
  SUBCASE("data generated exactly as y = 1 + 2A") {
    std::vector<Sample> s = points({{0, 1}, {1, 3}, {2, 5}, {3, 7}});
    FitResult fit = ols_fit(s, Model::AssistsOnly);
    CHECK(fit.beta[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.beta[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fit.rss == doctest::Approx(0.0).scale(1).epsilon(1e-12));
    CHECK(fit.r2 == doctest::Approx(1.0));
  }
  SUBCASE("three points solved by hand normal equations") {
    // (0,0),(1,1),(2,4): beta0 = -1/3, beta1 = 2, RSS = 2/3
    std::vector<Sample> s = points({{0, 0}, {1, 1}, {2, 4}});
    FitResult fit = ols_fit(s, Model::AssistsOnly);
    CHECK(fit.beta[0] == doctest::Approx(-1.0 / 3).epsilon(1e-12));
    CHECK(fit.beta[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fit.rss == doctest::Approx(2.0 / 3).epsilon(1e-12));
  }
  SUBCASE("constant predictor is rank deficient") {
    std::vector<Sample> s = points({{2, 0}, {2, 1}, {2, 4}, {2, 5}});
    CHECK_THROWS_WITH_AS(ols_fit(s, Model::AssistsOnly), doctest::Contains("rank deficient"),
                         ValidationError);
  }
  SUBCASE("insufficient samples") {
    std::vector<Sample> s = points({{0, 0}, {1, 1}});
    CHECK_THROWS_WITH_AS(ols_fit(s, Model::AssistsOnly), doctest::Contains("insufficient"),
                         ValidationError);
  }
}

TEST_CASE("ols_fit matches the normal-equation oracle on random sample sets") {
  rng::Engine eng(123123);
  for (int rep = 0; rep < 25; ++rep) {
    Model model = rep % 2 ? Model::Playmaking : Model::AssistsOnly;
    int p = model == Model::Playmaking ? 2 : 1;
    int n = p + 2 + int(rng::bounded(eng, 60));
    std::vector<Sample> samples;
    std::vector<std::vector<double>> cols(p);
    std::vector<double> y;
    for (int i = 0; i < n; ++i) {
      double a = rng::uniform(eng, 0, 5);
      double alt = rng::uniform(eng, -3, 5);
      double yi = 0.3 + 0.8 * a + (p == 2 ? -0.4 * alt : 0.0) + rng::normal(eng, 0, 0.5);
      samples.push_back(sample("p" + std::to_string(i), a, alt, yi));
      cols[0].push_back(a);
      if (p == 2) cols[1].push_back(alt);
      y.push_back(yi);
    }
    FitResult fit = ols_fit(samples, model);
    oracle::NormalEqFit ref = oracle::normal_equation_fit(cols, y);
    for (int c = 0; c <= p; ++c)
      CHECK(fit.beta[c] == doctest::Approx(ref.beta[c]).epsilon(1e-9));
    CHECK(fit.rss == doctest::Approx(ref.rss).epsilon(1e-9));

    // residual orthogonality to the intercept and every predictor column
    double scale = 0;
    for (double v : y) scale += std::fabs(v);
    std::vector<double> resid;
    for (int i = 0; i < n; ++i) {
      double pred = fit.beta[0] + fit.beta[1] * samples[i].assists60_prev +
                    (p == 2 ? fit.beta[2] * samples[i].alt60_prev : 0.0);
      resid.push_back(samples[i].assists60_next - pred);
    }
    double dot0 = 0;
    std::vector<double> dots(p, 0.0);
    for (int i = 0; i < n; ++i) {
      dot0 += resid[i];
      for (int c = 0; c < p; ++c) dots[c] += resid[i] * cols[c][i];
    }
    CHECK(std::fabs(dot0) <= 1e-9 * std::max(1.0, scale));
    for (int c = 0; c < p; ++c) CHECK(std::fabs(dots[c]) <= 1e-9 * std::max(1.0, scale) * 10);

    // adjusted R2 never exceeds R2; nested RSS ordering
    CHECK(fit.adj_r2 <= fit.r2 + 1e-15);
    if (model == Model::Playmaking) {
      FitResult nested = ols_fit(samples, Model::AssistsOnly);
      CHECK(fit.rss <= nested.rss + 1e-9);
    }
  }
}

TEST_CASE("affine predictor scaling inverts the slope and preserves fits") {
  rng::Engine eng(787878);
  std::vector<Sample> samples;
  for (int i = 0; i < 40; ++i) {
    double a = rng::uniform(eng, 0, 4), alt = rng::uniform(eng, -2, 6);
    samples.push_back(sample("p" + std::to_string(i), a, alt,
                             0.5 + 0.6 * a + 0.2 * alt + rng::normal(eng, 0, 0.3)));
  }
  FitResult base = ols_fit(samples, Model::Playmaking);
  const double q = 7.5;
  std::vector<Sample> scaled = samples;
  for (Sample& s : scaled) s.alt60_prev *= q;
  FitResult fit = ols_fit(scaled, Model::Playmaking);
  CHECK(fit.beta[2] == doctest::Approx(base.beta[2] / q).epsilon(1e-10));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double f0 = predict_playmaking(base, samples[i].assists60_prev, samples[i].alt60_prev);
    double f1 = predict_playmaking(fit, scaled[i].assists60_prev, scaled[i].alt60_prev);
    CHECK(f1 == doctest::Approx(f0).epsilon(1e-10));
  }
}

TEST_CASE("information criteria") {
  std::vector<Sample> samples;
  rng::Engine eng(999);
  for (int i = 0; i < 30; ++i) {
    double a = rng::uniform(eng, 0, 4), alt = rng::uniform(eng, -2, 6);
    samples.push_back(sample("p" + std::to_string(i), a, alt,
                             0.5 + 0.6 * a + 0.2 * alt + rng::normal(eng, 0, 0.4)));
  }
  FitResult assists = ols_fit(samples, Model::AssistsOnly);
  FitResult play = ols_fit(samples, Model::Playmaking);

  SUBCASE("full model's own Cp is exactly p_full + 1") {
    Criteria c = information_criteria(play, play);
    CHECK(c.cp == double(play.p + 1));  // exact, not approximate
  }
  SUBCASE("values match an independent formula evaluation") {
    Criteria c = information_criteria(assists, play);
    double n = assists.n;
    double aic = n * std::log(assists.rss / n) + 2.0 * (assists.p + 2);
    double sigma2 = play.rss / double(play.n - play.p - 1);
    double cp = assists.rss / sigma2 - n + 2.0 * (assists.p + 1);
    CHECK(c.aic == doctest::Approx(aic).epsilon(1e-12));
    CHECK(c.cp == doctest::Approx(cp).epsilon(1e-9));
  }
  SUBCASE("zero RSS makes AIC undefined, reported distinctly") {
    std::vector<Sample> exact = points({{0, 1}, {1, 3}, {2, 5}, {3, 7}});
    FitResult f = ols_fit(exact, Model::AssistsOnly);
    FitResult full = ols_fit(exact, Model::Playmaking);
    CHECK_THROWS_AS(information_criteria(f, full), UndefinedValueError);
  }
}

TEST_CASE("kfold_cv") {
  SUBCASE("exact model gives zero error") {
    std::vector<Sample> s = points({{0, 1}, {1, 3}, {2, 5}, {3, 7}, {4, 9}, {5, 11}});
    CHECK(kfold_cv(s, Model::AssistsOnly, 3, 42) == doctest::Approx(0.0).scale(1));
  }
  SUBCASE("leave-one-out on the 3-point fixture, refit by hand") {
    // Points (0,0),(1,1),(2,4). Dropping each in turn gives lines through
    // the remaining two; squared errors 4, 1, 4 -> MSE = 3.
    std::vector<Sample> s = points({{0, 0}, {1, 1}, {2, 4}});
    CHECK(kfold_cv(s, Model::AssistsOnly, 3, 7) == doctest::Approx(3.0).epsilon(1e-12));
  }
  SUBCASE("deterministic for a fixed seed and invariant to input order") {
    rng::Engine eng(246810);
    std::vector<Sample> s;
    for (int i = 0; i < 37; ++i)
      s.push_back(sample("p" + std::to_string(i), rng::uniform(eng, 0, 4),
                         rng::uniform(eng, -2, 6), rng::uniform(eng, 0, 3)));
    double first = kfold_cv(s, Model::Playmaking, 10, 31415);
    double second = kfold_cv(s, Model::Playmaking, 10, 31415);
    CHECK(first == second);  // bit-for-bit
    std::vector<Sample> shuffled = s;
    rng::shuffle(shuffled, eng);
    CHECK(kfold_cv(shuffled, Model::Playmaking, 10, 31415) == first);
    CHECK(kfold_cv(s, Model::Playmaking, 10, 999) != first);  // folds move with the seed
  }
  SUBCASE("bad k") {
    std::vector<Sample> s = points({{0, 0}, {1, 1}, {2, 4}});
    CHECK_THROWS_AS(kfold_cv(s, Model::AssistsOnly, 1, 1), ValidationError);
    CHECK_THROWS_AS(kfold_cv(s, Model::AssistsOnly, 4, 1), ValidationError);
  }
}

TEST_CASE("pearson") {
  std::vector<double> x{1, 2, 3};
  SUBCASE("perfect correlation") {
    std::vector<double> y{1, 2, 3};
    CHECK(pearson(x, y) == doctest::Approx(1.0));
    std::vector<double> ny{-1, -2, -3};
    CHECK(pearson(x, ny) == doctest::Approx(-1.0));
  }
  SUBCASE("hand-computed value") {
    std::vector<double> y{2, 2, 4};
    CHECK(pearson(x, y) == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-12));
  }
  SUBCASE("zero variance is undefined") {
    std::vector<double> y{5, 5, 5};
    CHECK_THROWS_AS(pearson(x, y), UndefinedValueError);
  }
  SUBCASE("length mismatch") {
    std::vector<double> y{1, 2};
    CHECK_THROWS_AS(pearson(x, y), ValidationError);
  }
}

TEST_CASE("predict_playmaking and expected_assists") {
  FitResult fit;
  fit.model = Model::Playmaking;
  fit.beta = {0.0, 1.0, 0.0};
  CHECK(predict_playmaking(fit, 1.5, 99.0) == doctest::Approx(1.5));
  fit.beta = {0.2, 0.5, 0.1};
  CHECK(predict_playmaking(fit, 2.0, 3.0) == doctest::Approx(1.5));

  FitResult wrong;
  wrong.model = Model::AssistsOnly;
  wrong.beta = {0, 1};
  CHECK_THROWS_AS(predict_playmaking(wrong, 1, 1), ValidationError);

  CHECK(expected_assists(0.0, 123456) == 0.0);
  CHECK(expected_assists(2.0, 7200) == doctest::Approx(4.0));

  SUBCASE("prediction at the predictor means equals the mean response") {
    rng::Engine eng(1212);
    std::vector<Sample> s;
    for (int i = 0; i < 25; ++i)
      s.push_back(sample("p" + std::to_string(i), rng::uniform(eng, 0, 4),
                         rng::uniform(eng, -2, 6), rng::uniform(eng, 0, 3)));
    FitResult f = ols_fit(s, Model::Playmaking);
    double ma = 0, malt = 0, my = 0;
    for (const Sample& smp : s) {
      ma += smp.assists60_prev;
      malt += smp.alt60_prev;
      my += smp.assists60_next;
    }
    ma /= s.size();
    malt /= s.size();
    my /= s.size();
    CHECK(predict_playmaking(f, ma, malt) == doctest::Approx(my).epsilon(1e-10));
  }
}

TEST_CASE("consistency_report") {
  SeasonDataset ds = sim_season(6, 30, 314);
  auto [p1, p2] = split_dataset(ds, SplitSpec{SplitKind::HalfSeason});
  SUBCASE("one row pair per requested cutoff") {
    std::vector<double> cutoffs{100, 150, 200};
    std::vector<EvalRow> rows = consistency_report(p1, p2, cutoffs, Group::Forwards, "half");
    REQUIRE(rows.size() == 6);
    for (std::size_t i = 0; i < cutoffs.size(); ++i) {
      CHECK(rows[2 * i].metric == "assists60");
      CHECK(rows[2 * i + 1].metric == "playmaking");
      CHECK(rows[2 * i].min_minutes == cutoffs[i]);
      CHECK(rows[2 * i].n == rows[2 * i + 1].n);
      CHECK(rows[2 * i].split == "half");
    }
  }
  SUBCASE("too few qualifying players is surfaced, not thrown") {
    std::vector<double> cutoffs{1e6};
    std::vector<EvalRow> rows = consistency_report(p1, p2, cutoffs, Group::Forwards, "half");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].n == 0);
    CHECK_FALSE(rows[0].correlation.has_value());
    CHECK_FALSE(rows[1].correlation.has_value());
  }
}

TEST_CASE("playmaking_report rows and csv round trip") {
  testutil::TempDir dir("play");
  SeasonDataset ds = sim_season(6, 30, 2718);
  auto [p1, p2] = split_dataset(ds, SplitSpec{SplitKind::HalfSeason});
  std::vector<PlaymakingRow> rows = playmaking_report(p1, p2, Group::Forwards, 150);
  REQUIRE(!rows.empty());
  ToiTable toi2 = player_toi_table(p2);
  for (const PlaymakingRow& r : rows) {
    CHECK(is_forward(r.position));
    CHECK(r.toi_s == toi2.at(r.player_id));
    CHECK(r.expected_assists_n ==
          doctest::Approx(r.play60 * double(r.toi_s) / 3600.0).epsilon(1e-12));
  }
  write_playmaking_csv(dir.file("playmaking.csv"), rows);
  std::vector<PlaymakingRow> back = read_playmaking_csv(dir.file("playmaking.csv"));
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].player_id == rows[i].player_id);
    CHECK(back[i].play60 == doctest::Approx(rows[i].play60).epsilon(1e-6));
  }
}
