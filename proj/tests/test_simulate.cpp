#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <set>

#include "support/tempdir.hpp"
#include "wowy/contributions.hpp"
#include "wowy/dataset.hpp"
#include "wowy/simulate.hpp"
#include "wowy/toi.hpp"

using namespace wowy;

namespace {

SimConfig small_config(std::uint64_t seed) {
  SimConfig cfg;
  cfg.teams = 4;
  cfg.games_per_team = 6;
  cfg.seed = seed;
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("same config and seed produce byte-identical files") {
  testutil::TempDir dir("det");
  SimConfig cfg = small_config(99);
  for (int run = 0; run < 2; ++run) {
    SimOutput out = generate_season(cfg);
    std::string tag = std::to_string(run);
    write_shifts_csv(dir.file("shifts" + tag + ".csv"), out.shifts);
    write_events_csv(dir.file("events" + tag + ".csv"), out.events);
    write_truth_csv(dir.file("truth" + tag + ".csv"), out.truth);
  }
  CHECK(slurp(dir.file("shifts0.csv")) == slurp(dir.file("shifts1.csv")));
  CHECK(slurp(dir.file("events0.csv")) == slurp(dir.file("events1.csv")));
  CHECK(slurp(dir.file("truth0.csv")) == slurp(dir.file("truth1.csv")));
  CHECK(slurp(dir.file("shifts0.csv")).size() > 1000);
}

TEST_CASE("unit_shot_rate") {
  auto lp = [](double shoot, double boost) {
    return LatentPlayer{"x", Position::C, shoot, boost, 0.1};
  };
  SUBCASE("neutral boosts reduce to the plain sum") {
    std::vector<LatentPlayer> unit{lp(3, 1), lp(4, 1), lp(5, 1), lp(2, 1), lp(1, 1)};
    CHECK(unit_shot_rate(unit) == doctest::Approx(15.0));
  }
  SUBCASE("each term multiplies the other players' boosts") {
    std::vector<LatentPlayer> unit{lp(2, 2.0), lp(3, 1.0)};
    // 2 * 1.0 + 3 * 2.0
    CHECK(unit_shot_rate(unit) == doctest::Approx(8.0));
  }
}

TEST_CASE("generated seasons satisfy every ingest invariant") {
  SimOutput out = generate_season(small_config(1234));
  // Strict validation: non-overlap, consistent players, shooters on ice.
  SeasonDataset ds = filter_five_on_five(out.shifts, out.events);
  CHECK(ds.games.size() == 4 * 6 / 2);

  SUBCASE("events lie inside 5v5 intervals and nothing is filtered away") {
    CHECK(ds.events.size() == out.events.size());  // simulator emits 5v5 only
    for (const SeasonDataset::Game& game : ds.games) {
      std::span<const StrengthInterval> ivls = ds.game_five_on_five(game);
      Seconds total = 0;
      for (const StrengthInterval& ivl : ivls) total += ivl.end_s - ivl.start_s;
      CHECK(total == 3600);  // the whole game is 5v5 with both goalies
    }
  }
  SUBCASE("ground truth lists every rostered player") {
    CHECK(out.truth.size() == ds.players.size());
    for (const LatentPlayer& lp : out.truth) {
      REQUIRE(ds.players.count(lp.player_id) == 1);
      CHECK(ds.players.at(lp.player_id).position == lp.position);
      CHECK(lp.shoot_rate >= 0);
      CHECK(lp.playmake_boost >= 0);
    }
    CHECK(std::is_sorted(out.truth.begin(), out.truth.end(),
                         [](const LatentPlayer& a, const LatentPlayer& b) {
                           return a.player_id < b.player_id;
                         }));
  }
  SUBCASE("every team fields 12 forwards, 6 defensemen, 1 goalie") {
    for (const auto& [team, members] : ds.team_players) {
      int fwd = 0, def = 0, g = 0;
      for (const std::string& pid : members) {
        Position pos = ds.players.at(pid).position;
        if (is_forward(pos)) ++fwd;
        else if (pos == Position::D) ++def;
        else ++g;
      }
      CHECK(fwd == 12);
      CHECK(def == 6);
      CHECK(g == 1);
    }
  }
}

TEST_CASE("doubling every shoot_rate roughly doubles season shots") {
  // Monte-Carlo expectation check across replications; the rates stay far
  // from the clamp so the scaling is linear.
  std::int64_t base_total = 0, doubled_total = 0;
  for (int rep = 0; rep < 20; ++rep) {
    SimConfig cfg = small_config(3000 + rep);
    cfg.games_per_team = 4;
    base_total += std::int64_t(generate_season(cfg).events.size());
    SimConfig twice = cfg;
    twice.forward_shoot_mean *= 2;
    twice.defense_shoot_mean *= 2;
    twice.forward_shoot_sd *= 2;
    twice.defense_shoot_sd *= 2;
    doubled_total += std::int64_t(generate_season(twice).events.size());
  }
  double ratio = double(doubled_total) / double(base_total);
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("config file loading") {
  testutil::TempDir dir("cfg");
  SUBCASE("defaults plus overrides") {
    std::ofstream(dir.file("sim.cfg")) << "# comment\n"
                                          "teams = 6\n"
                                          "games_per_team = 8\n"
                                          "seed = 321\n"
                                          "boost_max = 1.3\n";
    SimConfig cfg = load_sim_config(dir.file("sim.cfg"));
    CHECK(cfg.teams == 6);
    CHECK(cfg.games_per_team == 8);
    CHECK(cfg.seed == 321);
    CHECK(cfg.boost_max == doctest::Approx(1.3));
    CHECK(cfg.shift_mean_s == doctest::Approx(45.0));  // untouched default
  }
  SUBCASE("seed is mandatory") {
    std::ofstream(dir.file("sim.cfg")) << "teams = 6\n";
    CHECK_THROWS_WITH_AS(load_sim_config(dir.file("sim.cfg")), doctest::Contains("seed"),
                         ValidationError);
  }
  SUBCASE("unknown keys are rejected") {
    std::ofstream(dir.file("sim.cfg")) << "seed = 1\nteems = 6\n";
    CHECK_THROWS_WITH_AS(load_sim_config(dir.file("sim.cfg")), doctest::Contains("unknown key"),
                         ParseError);
  }
  SUBCASE("invalid values are rejected") {
    std::ofstream(dir.file("sim.cfg")) << "seed = 1\nteams = 3\n";
    CHECK_THROWS_AS(load_sim_config(dir.file("sim.cfg")), ValidationError);
    std::ofstream(dir.file("sim2.cfg")) << "seed = 1\nshift_mean_s = 0\n";
    CHECK_THROWS_AS(load_sim_config(dir.file("sim2.cfg")), ValidationError);
  }
}

TEST_CASE("table2 scenario structure") {
  Table2Scenario sc = table2_scenario(7);
  REQUIRE(sc.config.rosters.size() == 2);
  const TeamRoster& tbl = sc.config.rosters[0].team_id == "TBL" ? sc.config.rosters[0]
                                                                : sc.config.rosters[1];
  // Player A is the below-average skater embedded at the top-line LW slot.
  CHECK(tbl.forward_lines[0][0] == sc.player_a);
  const std::map<std::string, LatentPlayer>& ab = sc.config.abilities;
  double above = ab.at(tbl.forward_lines[0][1]).shoot_rate;
  double below = ab.at(sc.player_a).shoot_rate;
  CHECK(above > below);

  int below_in_top_line = 0;
  for (const std::string& pid : tbl.forward_lines[0])
    if (ab.at(pid).shoot_rate == below) ++below_in_top_line;
  CHECK(below_in_top_line == 1);

  // Remaining forward lines are uniformly below average.
  for (int l = 1; l < 4; ++l)
    for (const std::string& pid : tbl.forward_lines[l])
      CHECK(ab.at(pid).shoot_rate == doctest::Approx(below));
  // Top defense pair above, others below.
  CHECK(ab.at(tbl.defense_pairs[0][0]).shoot_rate > ab.at(tbl.defense_pairs[1][0]).shoot_rate);

  SUBCASE("scenario seasons build and keep Player A busy") {
    SimConfig cfg = sc.config;
    cfg.games_per_team = 6;
    SimOutput out = generate_season(cfg);
    SeasonDataset ds = filter_five_on_five(std::move(out.shifts), std::move(out.events));
    CHECK(player_toi(ds, sc.player_a) > 0);
    // Top line plays the most: player A's TOI beats the fourth line's.
    CHECK(player_toi(ds, sc.player_a) > player_toi(ds, tbl.forward_lines[3][0]));
  }
}

TEST_CASE("rosters must come with complete abilities") {
  Table2Scenario sc = table2_scenario(7);
  SimConfig cfg = sc.config;
  cfg.abilities.erase(sc.player_a);
  CHECK_THROWS_WITH_AS(generate_season(cfg), doctest::Contains("no abilities"),
                       ValidationError);
  SimConfig cfg2 = sc.config;
  cfg2.abilities[sc.player_a].shoot_rate = -1;
  CHECK_THROWS_AS(generate_season(cfg2), ValidationError);
}
