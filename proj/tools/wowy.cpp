// wowy: on-ice/off-ice contribution and playmaking analytics.
//
// Pipeline: simulate -> contrib -> playmaking -> evaluate -> report.
// Exit codes: 0 success, 1 validation/data error, 2 usage error.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "wowy/contributions.hpp"
#include "wowy/csv.hpp"
#include "wowy/dataset.hpp"
#include "wowy/regression.hpp"
#include "wowy/simulate.hpp"
#include "wowy/toi.hpp"

namespace fs = std::filesystem;

namespace {

std::string default_out_dir() {
  const char* env = std::getenv("WOWY_OUT_DIR");
  return env && *env ? env : ".";
}

// Outputs land under a temporary name and are renamed on completion, so an
// interrupted run never leaves a truncated file at the final path.
template <class WriteFn>
void atomic_write(const fs::path& path, WriteFn&& write) {
  fs::path tmp = path;
  tmp += ".tmp";
  write(tmp);
  fs::rename(tmp, path);
}

struct CommonArgs {
  std::string shifts, events;
  std::string shifts2, events2;
  bool permissive = false;
  bool quiet = false;
};

void note(const CommonArgs& args, const std::string& msg) {
  if (!args.quiet) std::cerr << msg << '\n';
}

wowy::SeasonDataset load_dataset(const std::string& shifts_path, const std::string& events_path,
                                 bool permissive) {
  std::vector<wowy::Shift> shifts = wowy::parse_shifts(shifts_path);
  std::vector<wowy::GameEvent> events = wowy::parse_events(events_path);
  wowy::BuildOptions opts;
  opts.permissive = permissive;
  opts.warnings = permissive ? &std::cerr : nullptr;
  return wowy::filter_five_on_five(std::move(shifts), std::move(events), opts);
}

wowy::Group parse_group(const std::string& name) {
  if (name == "forwards") return wowy::Group::Forwards;
  if (name == "defensemen" || name == "defense") return wowy::Group::Defensemen;
  if (name == "all" || name == "both") return wowy::Group::All;
  throw wowy::ValidationError("unknown group '" + name + "'");
}

std::vector<wowy::Group> groups_to_run(const std::string& name) {
  if (name == "both") return {wowy::Group::Forwards, wowy::Group::Defensemen};
  return {parse_group(name)};
}

std::pair<wowy::SeasonDataset, wowy::SeasonDataset> load_split(const CommonArgs& args,
                                                               const std::string& split) {
  if (split == "half") {
    wowy::SeasonDataset ds = load_dataset(args.shifts, args.events, args.permissive);
    return wowy::split_dataset(ds, wowy::SplitSpec{wowy::SplitKind::HalfSeason});
  }
  if (split == "seasons") {
    if (args.shifts2.empty() || args.events2.empty())
      throw wowy::ValidationError("--split seasons requires --shifts2 and --events2");
    return wowy::split_dataset(load_dataset(args.shifts, args.events, args.permissive),
                               load_dataset(args.shifts2, args.events2, args.permissive));
  }
  throw wowy::ValidationError("unknown split '" + split + "'");
}

// Fits both models on the group's samples and renders the comparison block;
// AIC/Cp relative to the playmaking fit, CV at the given folds/seed.
std::string summarize_models(const wowy::SeasonDataset& p1, const wowy::SeasonDataset& p2,
                             wowy::Group group, double min_minutes, int folds,
                             std::uint64_t seed) {
  std::vector<wowy::Sample> samples = wowy::build_samples(p1, p2, group, min_minutes);
  wowy::FitResult assists = wowy::ols_fit(samples, wowy::Model::AssistsOnly);
  wowy::FitResult play = wowy::ols_fit(samples, wowy::Model::Playmaking);
  try {
    wowy::Criteria c = wowy::information_criteria(assists, play);
    assists.aic = c.aic;
    assists.cp = c.cp;
  } catch (const wowy::UndefinedValueError&) {
  }
  try {
    wowy::Criteria c = wowy::information_criteria(play, play);
    play.aic = c.aic;
    play.cp = c.cp;
  } catch (const wowy::UndefinedValueError&) {
  }
  double cv_assists = wowy::kfold_cv(samples, wowy::Model::AssistsOnly, folds, seed);
  double cv_play = wowy::kfold_cv(samples, wowy::Model::Playmaking, folds, seed);
  char heading[128];
  std::snprintf(heading, sizeof(heading), "%s (min %.0f minutes, %d-fold CV, seed %llu)",
                wowy::to_string(group).c_str(), min_minutes, folds,
                static_cast<unsigned long long>(seed));
  return wowy::format_model_summary(heading, assists, play, cv_assists, cv_play);
}

std::string minutes_str(wowy::Seconds toi_s) {
  return wowy::csv::format_double(double(toi_s) / 60.0, 1);
}

void print_contrib_table(std::ostream& out, const std::vector<wowy::ContributionRecord>& rows,
                         const std::string& title, bool raw_measure) {
  out << title << '\n';
  char buf[256];
  std::snprintf(buf, sizeof(buf), "  %-4s %-10s %-4s %-6s %9s %9s %8s %8s %8s %9s\n", "rank",
                "player", "pos", "team", "on", "off", "m", "c", "a", "mins");
  out << buf;
  int prec = raw_measure ? 0 : 2;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const wowy::ContributionRecord& r = rows[i];
    std::snprintf(buf, sizeof(buf), "  %-4zu %-10s %-4s %-6s %9s %9s %8s %8s %8s %9s\n", i + 1,
                  r.player_id.c_str(), wowy::to_string(r.position).c_str(), r.team_id.c_str(),
                  wowy::csv::format_double(r.on_rate, prec).c_str(),
                  wowy::csv::format_double(r.off_rate, prec).c_str(),
                  wowy::csv::format_double(r.m, prec).c_str(),
                  wowy::csv::format_double(r.c, prec).c_str(),
                  wowy::csv::format_double(r.a, prec).c_str(), minutes_str(r.toi_s).c_str());
    out << buf;
  }
}

int run_simulate(const std::string& config_path, const std::string& out_dir,
                 const CommonArgs& args) {
  wowy::SimConfig cfg = wowy::load_sim_config(config_path);
  wowy::SimOutput season = wowy::generate_season(cfg);
  fs::create_directories(out_dir);
  atomic_write(fs::path(out_dir) / "shifts.csv",
               [&](const fs::path& p) { wowy::write_shifts_csv(p, season.shifts); });
  atomic_write(fs::path(out_dir) / "events.csv",
               [&](const fs::path& p) { wowy::write_events_csv(p, season.events); });
  atomic_write(fs::path(out_dir) / "truth.csv",
               [&](const fs::path& p) { wowy::write_truth_csv(p, season.truth); });
  note(args, "simulate: wrote " + std::to_string(season.shifts.size()) + " shifts, " +
                 std::to_string(season.events.size()) + " events to " + out_dir);
  return 0;
}

int run_contrib(const CommonArgs& args, const std::string& measure_name,
                const std::string& out_file, const std::string& toi_dir) {
  wowy::Measure measure = wowy::parse_measure(measure_name);
  wowy::SeasonDataset ds = load_dataset(args.shifts, args.events, args.permissive);
  std::vector<wowy::ContributionRecord> records = wowy::compute_all(ds, measure);
  if (!out_file.empty()) {
    atomic_write(out_file, [&](const fs::path& p) { wowy::write_contrib_csv(p, records); });
    note(args, "contrib: wrote " + std::to_string(records.size()) + " records to " + out_file);
  }
  if (!toi_dir.empty()) {
    fs::create_directories(toi_dir);
    atomic_write(fs::path(toi_dir) / "toi.csv",
                 [&](const fs::path& p) { wowy::write_toi_csv(p, wowy::player_toi_table(ds)); });
    atomic_write(fs::path(toi_dir) / "pair_toi.csv", [&](const fs::path& p) {
      wowy::write_pair_toi_csv(p, wowy::pair_toi_table(ds));
    });
    note(args, "contrib: wrote toi.csv and pair_toi.csv to " + toi_dir);
  }
  return 0;
}

int run_playmaking(const CommonArgs& args, const std::string& split, double min_minutes,
                   const std::string& group_name, int folds, std::uint64_t seed,
                   const std::string& out_dir) {
  auto [p1, p2] = load_split(args, split);
  fs::create_directories(out_dir);
  std::vector<wowy::PlaymakingRow> all_rows;
  std::string summary;
  for (wowy::Group group : groups_to_run(group_name)) {
    std::vector<wowy::PlaymakingRow> rows = wowy::playmaking_report(p1, p2, group, min_minutes);
    all_rows.insert(all_rows.end(), rows.begin(), rows.end());
    summary += summarize_models(p1, p2, group, min_minutes, folds, seed);
  }
  std::sort(all_rows.begin(), all_rows.end(),
            [](const wowy::PlaymakingRow& a, const wowy::PlaymakingRow& b) {
              return a.player_id < b.player_id;
            });
  atomic_write(fs::path(out_dir) / "playmaking.csv",
               [&](const fs::path& p) { wowy::write_playmaking_csv(p, all_rows); });
  atomic_write(fs::path(out_dir) / "model_summary.txt", [&](const fs::path& p) {
    std::ofstream out(p);
    out << summary;
  });
  if (!args.quiet) std::cout << summary;
  note(args, "playmaking: wrote " + std::to_string(all_rows.size()) + " rows to " + out_dir);
  return 0;
}

int run_evaluate(const CommonArgs& args, const std::string& split, double min_minutes,
                 const std::string& group_name, int folds, std::uint64_t seed,
                 std::vector<double> cutoffs, const std::string& out_dir) {
  auto [p1, p2] = load_split(args, split);
  if (cutoffs.empty()) cutoffs.push_back(min_minutes);
  fs::create_directories(out_dir);
  std::vector<wowy::EvalRow> all_rows;
  std::string summary;
  for (wowy::Group group : groups_to_run(group_name)) {
    std::vector<wowy::EvalRow> rows = wowy::consistency_report(p1, p2, cutoffs, group, split);
    all_rows.insert(all_rows.end(), rows.begin(), rows.end());
    summary += summarize_models(p1, p2, group, min_minutes, folds, seed);
  }
  atomic_write(fs::path(out_dir) / "evaluation.csv",
               [&](const fs::path& p) { wowy::write_evaluation_csv(p, all_rows); });
  atomic_write(fs::path(out_dir) / "model_summary.txt", [&](const fs::path& p) {
    std::ofstream out(p);
    out << summary;
  });
  if (!args.quiet) std::cout << summary;
  note(args, "evaluate: wrote " + std::to_string(all_rows.size()) + " rows to " + out_dir);
  return 0;
}

int run_report(const std::string& in_dir, int top_n, const std::string& group_name,
               double min_minutes) {
  wowy::Group group = parse_group(group_name);
  fs::path contrib_path = fs::path(in_dir) / "contrib.csv";
  fs::path play_path = fs::path(in_dir) / "playmaking.csv";
  bool found = false;

  if (fs::exists(contrib_path)) {
    found = true;
    std::vector<wowy::ContributionRecord> records = wowy::read_contrib_csv(contrib_path);
    std::string measure = records.empty() ? "?" : wowy::to_string(records.front().measure);
    bool raw = !records.empty() && records.front().measure == wowy::Measure::RawGoals;
    print_contrib_table(std::cout,
                        wowy::leaderboard(records, group, min_minutes,
                                          wowy::SortKey::Altruistic, std::size_t(top_n)),
                        "Top " + std::to_string(top_n) + " " + group_name +
                            " by altruistic contribution (" + measure + ")",
                        raw);
    std::cout << '\n';
    print_contrib_table(std::cout,
                        wowy::leaderboard(records, group, min_minutes, wowy::SortKey::Marginal,
                                          std::size_t(top_n)),
                        "Top " + std::to_string(top_n) + " " + group_name +
                            " by marginal contribution (" + measure + ")",
                        raw);
    std::cout << '\n';
  }

  if (fs::exists(play_path)) {
    found = true;
    std::vector<wowy::PlaymakingRow> rows = wowy::read_playmaking_csv(play_path);
    std::erase_if(rows, [&](const wowy::PlaymakingRow& r) {
      return !wowy::in_group(r.position, group) || double(r.toi_s) < min_minutes * 60.0;
    });
    std::sort(rows.begin(), rows.end(),
              [](const wowy::PlaymakingRow& a, const wowy::PlaymakingRow& b) {
                if (a.expected_assists_n != b.expected_assists_n)
                  return a.expected_assists_n > b.expected_assists_n;
                if (a.toi_s != b.toi_s) return a.toi_s > b.toi_s;
                return a.player_id < b.player_id;
              });
    if (rows.size() > std::size_t(top_n)) rows.resize(std::size_t(top_n));
    std::cout << "Top " << top_n << ' ' << group_name << " by expected assists\n";
    char buf[256];
    std::snprintf(buf, sizeof(buf), "  %-4s %-10s %-4s %8s %9s %9s %8s %9s\n", "rank", "player",
                  "pos", "A/60", "Alt/60", "play/60", "xA", "mins");
    std::cout << buf;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const wowy::PlaymakingRow& r = rows[i];
      std::snprintf(buf, sizeof(buf), "  %-4zu %-10s %-4s %8s %9s %9s %8s %9s\n", i + 1,
                    r.player_id.c_str(), wowy::to_string(r.position).c_str(),
                    wowy::csv::format_double(r.assists60, 2).c_str(),
                    wowy::csv::format_double(r.alt60, 2).c_str(),
                    wowy::csv::format_double(r.play60, 2).c_str(),
                    wowy::csv::format_double(r.expected_assists_n, 1).c_str(),
                    minutes_str(r.toi_s).c_str());
      std::cout << buf;
    }
  }

  if (!found)
    throw wowy::ValidationError("no contrib.csv or playmaking.csv in " + in_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"on-ice/off-ice contribution and playmaking analytics"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string out_dir = default_out_dir();
  std::string out_file;
  std::string config_path;
  std::string measure = "WSHOTS60";
  std::string split = "half";
  std::string group = "both";
  std::string toi_dir;
  std::string in_dir = default_out_dir();
  double min_minutes = 300;  // the published playing-time cutoff
  int folds = 10;
  std::uint64_t seed = 1;
  std::vector<double> cutoffs;
  int top_n = 5;
  double report_min_minutes = 0;

  auto add_common = [&](CLI::App* sub, bool two_period) {
    sub->add_option("--shifts", args.shifts, "shifts csv")->required();
    sub->add_option("--events", args.events, "events csv")->required();
    if (two_period) {
      sub->add_option("--shifts2", args.shifts2, "second-season shifts csv (--split seasons)");
      sub->add_option("--events2", args.events2, "second-season events csv (--split seasons)");
    }
    sub->add_flag("--permissive", args.permissive,
                  "downgrade shooter-not-on-ice to a warning");
    sub->add_flag("--quiet", args.quiet, "suppress progress text");
  };

  CLI::App* sim = app.add_subcommand("simulate", "generate a synthetic season");
  sim->add_option("--config", config_path, "key-value config file")->required();
  sim->add_option("--out", out_dir, "output directory (default $WOWY_OUT_DIR or .)");
  sim->add_flag("--quiet", args.quiet, "suppress progress text");

  CLI::App* contrib = app.add_subcommand("contrib", "compute contribution records");
  add_common(contrib, false);
  contrib->add_option("--measure", measure, "RAW_GOALS|GOALS60|WGOALS60|WSHOTS60")->required();
  contrib->add_option("--out", out_file, "output csv path")->required();
  contrib->add_option("--export-toi", toi_dir, "also write toi.csv and pair_toi.csv here");

  CLI::App* play = app.add_subcommand("playmaking", "fit the playmaking model and predict");
  add_common(play, true);
  play->add_option("--split", split, "half|seasons");
  play->add_option("--min-minutes", min_minutes, "minimum minutes in both periods");
  play->add_option("--group", group, "forwards|defensemen|both");
  play->add_option("--folds", folds, "cross-validation folds");
  play->add_option("--seed", seed, "cross-validation fold seed");
  play->add_option("--out", out_dir, "output directory");

  CLI::App* eval = app.add_subcommand("evaluate", "consistency and model comparison");
  add_common(eval, true);
  eval->add_option("--split", split, "half|seasons");
  eval->add_option("--min-minutes", min_minutes, "cutoff for the model summary");
  eval->add_option("--group", group, "forwards|defensemen|both");
  eval->add_option("--folds", folds, "cross-validation folds");
  eval->add_option("--seed", seed, "cross-validation fold seed");
  eval->add_option("--cutoffs", cutoffs, "minimum-minutes sweep, comma separated")
      ->delimiter(',');
  eval->add_option("--out", out_dir, "output directory");

  CLI::App* report = app.add_subcommand("report", "print leaderboards from computed files");
  report->add_option("--in", in_dir, "directory holding contrib.csv / playmaking.csv");
  report->add_option("--top", top_n, "rows per table")->check(CLI::PositiveNumber);
  report->add_option("--group", group, "forwards|defensemen|all");
  report->add_option("--min-minutes", report_min_minutes, "minimum minutes filter");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(sim)) return run_simulate(config_path, out_dir, args);
    if (app.got_subcommand(contrib)) return run_contrib(args, measure, out_file, toi_dir);
    if (app.got_subcommand(play))
      return run_playmaking(args, split, min_minutes, group, folds, seed, out_dir);
    if (app.got_subcommand(eval))
      return run_evaluate(args, split, min_minutes, group, folds, seed, cutoffs, out_dir);
    if (app.got_subcommand(report))
      return run_report(in_dir, top_n, group == "both" ? "forwards" : group, report_min_minutes);
  } catch (const wowy::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
