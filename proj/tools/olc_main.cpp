// Copyright 2026 The olc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "olc/bench.hpp"
#include "olc/config.hpp"

namespace fs = std::filesystem;
using namespace olc;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::string> seed_spec;
  std::optional<std::string> update;
};

void add_common(CLI::App* cmd, CommonOpts* opts) {
  cmd->add_option("--config", opts->config_path, "INI config file");
  cmd->add_option("--out", opts->out_dir, "output directory");
  cmd->add_option("--seeds", opts->seed_spec, "seed list: 3 | 0..9 | 1,4,7");
  cmd->add_option("--seed", opts->seed_spec, "single seed (alias of --seeds)");
  cmd->add_option("--update", opts->update, "policy update rule: fpl | gd")
      ->check(CLI::IsMember({"fpl", "gd"}));
}

bench::RunConfig load_config(const CommonOpts& opts) {
  bench::RunConfig cfg = opts.config_path.empty()
                             ? bench::default_config()
                             : bench::config_from_ini(
                                   cfg::Config::parse_file(opts.config_path));
  if (opts.seed_spec) cfg.seeds = cfg::parse_seed_spec(*opts.seed_spec);
  if (opts.update) {
    cfg.olc.update = (*opts.update == "fpl")
                         ? online::UpdateRule::kFplGame
                         : online::UpdateRule::kGradDescent;
  }
  return cfg;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << contents;
}

template <typename Fn>
std::string render(Fn&& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

int cmd_run(const CommonOpts& opts) {
  bench::RunConfig cfg = load_config(opts);
  fs::create_directories(opts.out_dir);

  bench::RunResult result;
  double wall = 0.0;
  result.rows.reserve(cfg.seeds.size());
  for (const auto seed : cfg.seeds) {
    bench::EpisodeData data;
    bench::SeedResult row = bench::run_episode(cfg, seed, &data);
    wall += row.wall_seconds;
    result.rows.push_back(row);
    write_file(fs::path(opts.out_dir) /
                   ("episode_seed" + std::to_string(seed) + ".csv"),
               render([&](std::ostream& os) {
                 bench::write_episode_csv(os, data);
               }));
    if (!data.policy_trace.empty()) {
      write_file(fs::path(opts.out_dir) /
                     ("policy_trace_seed" + std::to_string(seed) + ".txt"),
                 render([&](std::ostream& os) {
                   bench::write_policy_trace(os, data);
                 }));
    }
  }
  write_file(fs::path(opts.out_dir) / "result.csv",
             render([&](std::ostream& os) {
               bench::write_results_csv(os, result);
             }));
  write_file(fs::path(opts.out_dir) / "aggregate.csv",
             render([&](std::ostream& os) {
               bench::write_aggregate_csv(os, result);
             }));
  std::cerr << "run: " << cfg.seeds.size() << " episode(s), " << wall
            << " s total; collision fraction "
            << bench::format_double(result.mean_collision_fraction())
            << ", mean regret "
            << bench::format_double(result.mean(&bench::SeedResult::regret))
            << "\n";
  return 0;
}

int cmd_table(const CommonOpts& opts) {
  bench::RunConfig cfg = load_config(opts);
  fs::create_directories(opts.out_dir);
  const std::vector<std::pair<std::string, sim::DisturbanceProfile>> profiles =
      {{"gaussian", sim::GaussianProfile{}},
       {"sinusoid", sim::SinusoidProfile{}},
       {"adversarial", sim::AdversarialProfile{}}};
  const std::vector<bench::ControllerKind> controllers = {
      bench::ControllerKind::kOlc, bench::ControllerKind::kNominal,
      bench::ControllerKind::kZero};
  const bench::TableResult table =
      bench::table_experiment(cfg, profiles, controllers);
  write_file(fs::path(opts.out_dir) / "table.csv",
             render([&](std::ostream& os) {
               bench::write_table_csv(os, table);
             }));
  bench::render_table_text(std::cout, table);
  return 0;
}

int cmd_sweep(const CommonOpts& opts, const std::string& offsets_spec,
              const std::string& widths_spec, int trials) {
  bench::RunConfig cfg = load_config(opts);
  fs::create_directories(opts.out_dir);
  const auto parse_list = [](const std::string& spec) {
    std::vector<double> out;
    std::string v = spec;
    for (char& c : v)
      if (c == ',') c = ' ';
    std::istringstream ss(v);
    double x;
    while (ss >> x) out.push_back(x);
    if (out.empty()) throw ConfigError("bad list: " + spec);
    return out;
  };
  const bench::SweepGrid grid =
      bench::sweep_slalom(cfg, parse_list(offsets_spec),
                          parse_list(widths_spec), trials);
  write_file(fs::path(opts.out_dir) / "sweep.csv",
             render([&](std::ostream& os) { bench::write_sweep_csv(os, grid); }));
  bench::write_sweep_csv(std::cout, grid);
  return 0;
}

int cmd_regret(const CommonOpts& opts, const std::string& horizons_spec) {
  bench::RunConfig cfg = load_config(opts);
  fs::create_directories(opts.out_dir);
  std::vector<int> horizons;
  {
    std::string v = horizons_spec;
    for (char& c : v)
      if (c == ',') c = ' ';
    std::istringstream ss(v);
    int T;
    while (ss >> T) horizons.push_back(T);
    if (horizons.empty()) throw ConfigError("bad horizon list");
  }
  const bench::RegretStudy study = bench::regret_study(cfg, horizons);
  write_file(fs::path(opts.out_dir) / "regret.csv",
             render([&](std::ostream& os) {
               bench::write_regret_csv(os, study);
             }));
  for (std::size_t i = 0; i < study.horizons.size(); ++i)
    std::cout << "T=" << study.horizons[i] << " mean Reg_T/T = "
              << bench::format_double(study.mean_regret_per_step[i]) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"online-learning obstacle avoidance runner"};
  app.require_subcommand(1);

  CommonOpts run_opts, table_opts, sweep_opts, regret_opts;
  std::string offsets = "0,60,120,180";
  std::string widths = "360,280,220,170";
  int trials = 5;
  std::string horizons = "50,100,200,400";

  add_common(app.add_subcommand("run", "single config -> episode CSVs"),
             &run_opts);
  add_common(app.add_subcommand("table", "controller x profile summary"),
             &table_opts);
  CLI::App* sweep = app.add_subcommand("sweep", "slalom failure-rate grid");
  add_common(sweep, &sweep_opts);
  sweep->add_option("--offsets", offsets, "gate offsets");
  sweep->add_option("--widths", widths, "gate widths");
  sweep->add_option("--trials", trials, "trials per cell");
  CLI::App* regret = app.add_subcommand("regret", "Reg_T/T scaling study");
  add_common(regret, &regret_opts);
  regret->add_option("--horizons", horizons, "horizon list");

  try {
    app.parse(argc, argv);
    if (app.got_subcommand("run")) return cmd_run(run_opts);
    if (app.got_subcommand("table")) return cmd_table(table_opts);
    if (app.got_subcommand("sweep"))
      return cmd_sweep(sweep_opts, offsets, widths, trials);
    if (app.got_subcommand("regret")) return cmd_regret(regret_opts, horizons);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad usage is a config error; keep --help at 0
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ContractViolation& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const StabilizationError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
