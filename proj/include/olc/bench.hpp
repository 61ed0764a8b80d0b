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

#ifndef OLC_BENCH_HPP_
#define OLC_BENCH_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "olc/config.hpp"
#include "olc/dac.hpp"
#include "olc/envsim.hpp"
#include "olc/online.hpp"

namespace olc::bench {

enum class ControllerKind { kOlc, kNominal, kZero };

std::string to_string(ControllerKind kind);
std::string to_string(const sim::DisturbanceProfile& profile);

struct RunConfig {
  lindyn::LinSystem sys = lindyn::double_integrator(1.0);
  Eigen::MatrixXd lqr_Q;  // defaults to 0.001 * I
  Eigen::MatrixXd lqr_R;  // defaults to I
  std::optional<Eigen::MatrixXd> user_K;
  sim::Environment env = sim::make_centerline(50);
  sim::DisturbanceProfile profile = sim::GaussianProfile{};
  online::OlcParams olc;
  ControllerKind controller = ControllerKind::kOlc;
  std::vector<std::uint64_t> seeds = {0};
  int threads = 0;  // 0: hardware concurrency
  int policy_trace_every = 10;

  lindyn::StabilizedSystem stabilized() const;
};

// Build from an INI config ([system], [olc], [env], [disturbance], [run]).
RunConfig config_from_ini(const cfg::Config& ini);
// Defaults for the centerline benchmark scenario.
RunConfig default_config();

struct SeedResult {
  std::uint64_t seed = 0;
  bool solver_failed = false;
  int obstacles_passed = 0;
  int distinct_hits = 0;
  int collision_count = 0;
  double collision_fraction = 0.0;
  double lq_cost = 0.0;
  double c_obs = 0.0;
  int pass_left = 0;
  int pass_right = 0;
  double achieved_reward = 0.0;
  double hindsight_value = 0.0;
  double regret = 0.0;
  // Stability diagnostics: quantiles of ||M_{t+1} - M_t||_F over the solved
  // policies (no hard bound, reported only).
  double policy_delta_p50 = 0.0;
  double policy_delta_p90 = 0.0;
  double wall_seconds = 0.0;  // reported out-of-band, never in CSVs
};

struct EpisodeData {
  int dw = 0;
  std::vector<Eigen::VectorXd> states;      // x_0..x_T
  std::vector<Eigen::VectorXd> inputs;      // u_0..u_{T-1}
  std::vector<Eigen::VectorXd> noises;      // w_0..w_{T-1}
  std::vector<std::vector<Eigen::Vector2d>> sensed;  // per state index
  std::vector<double> rewards;              // realized l_{t+1}; nan before H
  std::vector<double> min_dist;             // at x_{t+1}; inf when none
  std::vector<game::RewardRecord> records;
  std::vector<std::pair<int, dac::DacPolicy>> policy_trace;
};

SeedResult run_episode(const RunConfig& config, std::uint64_t seed,
                       EpisodeData* data = nullptr);

struct RunResult {
  std::vector<SeedResult> rows;

  double mean(double SeedResult::* field) const;
  double stddev(double SeedResult::* field) const;
  double mean_collision_fraction() const;
  // Share of passes on the dominant side, pooled over rows.
  double one_sided_share() const;
  double right_share() const;
};

RunResult run_all(const RunConfig& config);

// Hindsight comparator value minus the achieved reward, over one episode's
// records and per-record realized rewards.
double empirical_regret(const lindyn::StabilizedSystem& ss,
                        std::span<const game::RewardRecord> records,
                        std::span<const double> realized,
                        const online::OlcParams& params);

struct TableCell {
  std::string controller;
  std::string profile;
  RunResult result;
};

struct TableResult {
  std::vector<TableCell> cells;
};

TableResult table_experiment(
    const RunConfig& base,
    const std::vector<std::pair<std::string, sim::DisturbanceProfile>>&
        profiles,
    const std::vector<ControllerKind>& controllers);

struct SweepGrid {
  std::vector<double> offsets;
  std::vector<double> gate_widths;
  int trials = 0;
  // failure_rate[w][o]: |gate_widths| x |offsets|
  std::vector<std::vector<double>> failure_rate;
};

SweepGrid sweep_slalom(const RunConfig& base,
                       const std::vector<double>& offsets,
                       const std::vector<double>& gate_widths, int trials);

struct RegretPoint {
  int T = 0;
  std::uint64_t seed = 0;
  double regret = 0.0;
  double regret_per_step = 0.0;
};

struct RegretStudy {
  std::vector<RegretPoint> points;
  std::vector<int> horizons;
  std::vector<double> mean_regret_per_step;  // by horizon
};

RegretStudy regret_study(const RunConfig& base,
                         const std::vector<int>& horizons);

// Deterministic CSV emitters (fixed %.10g formatting, no timestamps).
void write_episode_csv(std::ostream& os, const EpisodeData& data);
void write_results_csv(std::ostream& os, const RunResult& result);
void write_aggregate_csv(std::ostream& os, const RunResult& result);
void write_table_csv(std::ostream& os, const TableResult& table);
void render_table_text(std::ostream& os, const TableResult& table);
void write_sweep_csv(std::ostream& os, const SweepGrid& grid);
void write_regret_csv(std::ostream& os, const RegretStudy& study);
void write_policy_trace(std::ostream& os, const EpisodeData& data);

std::string format_double(double x);

// Spearman rank correlation (average ranks on ties).
double spearman(std::span<const double> xs, std::span<const double> ys);

}  // namespace olc::bench

#endif  // OLC_BENCH_HPP_
