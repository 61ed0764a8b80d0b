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

#include "olc/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

namespace olc::bench {

namespace {

Eigen::MatrixXd scaled_identity(int n, double s) {
  return s * Eigen::MatrixXd::Identity(n, n);
}

Eigen::VectorXd embed_obstacle(const Eigen::Vector2d& p, int dx) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dx);
  v[0] = p.x();
  v[1] = p.y();
  return v;
}

}  // namespace

std::string to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::kOlc: return "olc";
    case ControllerKind::kNominal: return "nominal";
    case ControllerKind::kZero: return "zero";
  }
  return "?";
}

std::string to_string(const sim::DisturbanceProfile& profile) {
  if (std::holds_alternative<sim::NoDisturbance>(profile)) return "none";
  if (std::holds_alternative<sim::GaussianProfile>(profile)) return "gaussian";
  if (std::holds_alternative<sim::DirectionalProfile>(profile))
    return "directional";
  if (std::holds_alternative<sim::SinusoidProfile>(profile)) return "sinusoid";
  return "adversarial";
}

lindyn::StabilizedSystem RunConfig::stabilized() const {
  if (user_K) return lindyn::with_feedback(sys, *user_K);
  return lindyn::stabilize(sys, lqr_Q, lqr_R);
}

RunConfig default_config() {
  RunConfig cfg;
  cfg.sys = lindyn::double_integrator(1.0);
  cfg.lqr_Q = scaled_identity(4, 0.001);
  cfg.lqr_R = scaled_identity(2, 1.0);
  cfg.olc.Q = scaled_identity(4, 0.001);
  cfg.olc.R = scaled_identity(2, 1.0);
  cfg.olc.T = 1170;
  cfg.env = sim::make_centerline(50);
  return cfg;
}

namespace {

Eigen::MatrixXd matrix_from_cfg(const cfg::Config& ini,
                                const std::string& section,
                                const std::string& key, int rows, int cols,
                                const Eigen::MatrixXd& fallback) {
  if (!ini.has(section, key)) return fallback;
  const std::vector<double> nums = ini.get_list(section, key);
  if (static_cast<int>(nums.size()) == 1 && rows == cols)
    return scaled_identity(rows, nums[0]);
  if (static_cast<int>(nums.size()) != rows * cols)
    throw ConfigError("[" + section + "] " + key + ": expected 1 or " +
                      std::to_string(rows * cols) + " numbers");
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = nums[r * cols + c];
  return m;
}

sim::DisturbanceProfile profile_from_cfg(const cfg::Config& ini) {
  const std::string name = ini.get("disturbance", "profile", "gaussian");
  if (name == "none") return sim::NoDisturbance{};
  if (name == "gaussian")
    return sim::GaussianProfile{ini.get_num("disturbance", "mean", 0.0),
                                ini.get_num("disturbance", "std", 0.5)};
  if (name == "directional")
    return sim::DirectionalProfile{ini.get_num("disturbance", "mean", 0.5),
                                   ini.get_num("disturbance", "std", 0.5)};
  if (name == "sinusoid")
    return sim::SinusoidProfile{ini.get_num("disturbance", "amplitude", 1.7),
                                ini.get_num("disturbance", "period", 20.0),
                                ini.get_num("disturbance", "phase", 0.0),
                                ini.get_int("disturbance", "axis", 2)};
  if (name == "adversarial")
    return sim::AdversarialProfile{
        ini.get_num("disturbance", "magnitude", 1.5)};
  throw ConfigError("unknown disturbance profile: " + name);
}

sim::Environment env_from_cfg(const cfg::Config& ini) {
  const std::string preset = ini.get("env", "preset", "centerline");
  sim::Environment env;
  if (preset == "centerline") {
    env = sim::make_centerline(ini.get_int("env", "n_obstacles", 50),
                               ini.get_num("env", "spacing", 600.0),
                               ini.get_num("env", "obstacle_radius", 115.0),
                               ini.get_num("env", "lead_in", 6.0));
  } else if (preset == "slalom") {
    env = sim::make_slalom(ini.get_num("env", "offset", 60.0),
                           ini.get_num("env", "gate_width", 240.0),
                           ini.get_int("env", "n_gates", 6),
                           ini.get_num("env", "wall_radius", 60.0),
                           ini.get_int("env", "wall_circles", 5),
                           ini.get_num("env", "spacing", 600.0),
                           ini.get_num("env", "lead_in", 6.0));
  } else if (preset == "random_field") {
    env = sim::make_random_field(
        ini.get_int("env", "n_obstacles", 40),
        ini.get_num("env", "lat_span", 400.0),
        ini.get_num("env", "length", 12000.0),
        ini.get_num("env", "obstacle_radius", 80.0),
        static_cast<std::uint64_t>(ini.get_int("env", "field_seed", 7)));
  } else if (preset == "corridor") {
    env = sim::make_corridor(ini.get_num("env", "offset", 120.0),
                             ini.get_int("env", "n_segments", 30),
                             ini.get_num("env", "half_width", 180.0),
                             ini.get_num("env", "wall_radius", 60.0),
                             ini.get_num("env", "spacing", 300.0));
  } else if (preset == "custom") {
    const std::string path = ini.get("env", "obstacle_file", "");
    if (path.empty()) throw ConfigError("custom env needs obstacle_file");
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open obstacle file: " + path);
    env.obstacles = sim::load_obstacles(f);
  } else if (preset == "empty") {
    env.obstacles.clear();
  } else {
    throw ConfigError("unknown env preset: " + preset);
  }
  env.sensor_radius = ini.get_num("env", "sensor_radius", env.sensor_radius);
  env.robot_radius = ini.get_num("env", "robot_radius", env.robot_radius);
  env.goal_band = ini.get_num("env", "goal_band", env.goal_band);
  env.station_speed =
      ini.get_num("env", "station_speed", env.station_speed);
  if (ini.has("env", "activation_range"))
    env.activation_range = ini.get_num("env", "activation_range", 0.0);
  return env;
}

}  // namespace

RunConfig config_from_ini(const cfg::Config& ini) {
  RunConfig cfg = default_config();

  const std::string sys_preset =
      ini.get("system", "preset", "double_integrator");
  if (sys_preset == "double_integrator") {
    cfg.sys = lindyn::double_integrator(ini.get_num("system", "dt", 1.0));
  } else if (sys_preset == "custom") {
    const int dx = ini.get_int("system", "dx", 0);
    const int du = ini.get_int("system", "du", 0);
    const int dw = ini.get_int("system", "dw", dx);
    if (dx < 1 || du < 1) throw ConfigError("custom system needs dx, du");
    const Eigen::MatrixXd A =
        matrix_from_cfg(ini, "system", "A", dx, dx, Eigen::MatrixXd());
    const Eigen::MatrixXd B =
        matrix_from_cfg(ini, "system", "B", dx, du, Eigen::MatrixXd());
    const Eigen::MatrixXd D = matrix_from_cfg(
        ini, "system", "D", dx, dw, Eigen::MatrixXd::Identity(dx, dw));
    if (A.size() == 0 || B.size() == 0)
      throw ConfigError("custom system needs A and B");
    cfg.sys = lindyn::LinSystem::make(A, B, D);
  } else {
    throw ConfigError("unknown system preset: " + sys_preset);
  }

  const int dx = cfg.sys.dx();
  const int du = cfg.sys.du();
  cfg.lqr_Q = matrix_from_cfg(ini, "system", "q_lqr", dx, dx,
                              scaled_identity(dx, 0.001));
  cfg.lqr_R = matrix_from_cfg(ini, "system", "r_lqr", du, du,
                              scaled_identity(du, 1.0));
  if (ini.has("system", "K"))
    cfg.user_K = matrix_from_cfg(ini, "system", "K", du, dx,
                                 Eigen::MatrixXd::Zero(du, dx));

  cfg.olc.T = ini.get_int("olc", "T", cfg.olc.T);
  cfg.olc.H = ini.get_int("olc", "H", cfg.olc.H);
  cfg.olc.eta = ini.get_num("olc", "eta", cfg.olc.eta);
  cfg.olc.lambda = ini.get_num("olc", "lambda", cfg.olc.lambda);
  cfg.olc.eps = ini.get_num("olc", "eps", cfg.olc.eps);
  cfg.olc.D_M = ini.get_num("olc", "D_M", cfg.olc.D_M);
  cfg.olc.lr = ini.get_num("olc", "lr", cfg.olc.lr);
  cfg.olc.L = ini.get_int("olc", "L", cfg.olc.L);
  cfg.olc.game_iters = ini.get_int("olc", "game_iters", cfg.olc.game_iters);
  cfg.olc.hindsight_iters =
      ini.get_int("olc", "hindsight_iters", cfg.olc.hindsight_iters);
  cfg.olc.sentinel_distance =
      ini.get_num("olc", "sentinel_distance", cfg.olc.sentinel_distance);
  cfg.olc.Q = matrix_from_cfg(ini, "olc", "Q", dx, dx,
                              scaled_identity(dx, 0.001));
  cfg.olc.R =
      matrix_from_cfg(ini, "olc", "R", du, du, scaled_identity(du, 1.0));
  const std::string update = ini.get("olc", "update", "gd");
  if (update == "gd")
    cfg.olc.update = online::UpdateRule::kGradDescent;
  else if (update == "fpl")
    cfg.olc.update = online::UpdateRule::kFplGame;
  else
    throw ConfigError("unknown update rule: " + update);

  const std::string controller = ini.get("olc", "controller", "olc");
  if (controller == "olc")
    cfg.controller = ControllerKind::kOlc;
  else if (controller == "nominal")
    cfg.controller = ControllerKind::kNominal;
  else if (controller == "zero")
    cfg.controller = ControllerKind::kZero;
  else
    throw ConfigError("unknown controller: " + controller);

  cfg.env = env_from_cfg(ini);
  cfg.profile = profile_from_cfg(ini);

  if (ini.has("run", "seeds"))
    cfg.seeds = cfg::parse_seed_spec(ini.get("run", "seeds", "0"));
  cfg.threads = ini.get_int("run", "threads", 0);
  cfg.policy_trace_every =
      ini.get_int("run", "policy_trace_every", cfg.policy_trace_every);
  return cfg;
}

SeedResult run_episode(const RunConfig& config, std::uint64_t seed,
                       EpisodeData* data) {
  const auto started = std::chrono::steady_clock::now();

  const lindyn::StabilizedSystem ss = config.stabilized();
  const int dx = ss.dx();
  const int dw = ss.dw();
  const int T = config.olc.T;
  const int H = config.olc.H;

  online::OlcParams params = config.olc;
  params.C_w = sim::disturbance_bound(config.profile, dw);
  const double sentinel = online::sentinel_distance_for(ss, params);

  sim::CourseTracker tracker(config.env, config.sys.A);
  Rng noise_rng = Rng(seed).stream("disturbance");

  std::optional<online::OnlineController> ctrl;
  if (config.controller == ControllerKind::kOlc)
    ctrl.emplace(ss, params, seed);

  // Baselines keep their own history so regret is measurable for them too.
  dac::DisturbanceHistory hist(dw, 2 * H + 2);
  std::vector<game::RewardRecord> base_records;

  std::vector<Eigen::VectorXd> xs, us, ws;
  std::vector<std::vector<Eigen::Vector2d>> sensed_log;
  xs.reserve(T + 1);

  SeedResult res;
  res.seed = seed;

  Eigen::VectorXd x = Eigen::VectorXd::Zero(dx);
  xs.push_back(x);
  sensed_log.push_back(tracker.advance(0, x));

  bool failed = false;
  for (int t = 0; t < T && !failed; ++t) {
    Eigen::VectorXd u;
    try {
      switch (config.controller) {
        case ControllerKind::kOlc:
          u = ctrl->act(x);
          break;
        case ControllerKind::kNominal:
          u = ss.K * x;
          break;
        case ControllerKind::kZero:
          u = Eigen::VectorXd::Zero(ss.du());
          break;
      }
    } catch (const SolverFailure&) {
      failed = true;
      break;
    }

    const Eigen::VectorXd w = sim::gen_disturbance(
        config.profile, t, dw, x.head<2>(), sensed_log.back(), noise_rng);
    const Eigen::VectorXd x_next = lindyn::step(config.sys, x, u, w);
    std::vector<Eigen::Vector2d> sensed_next = tracker.advance(t + 1, x_next);

    if (ctrl) {
      std::vector<Eigen::VectorXd> obstacles;
      obstacles.reserve(sensed_next.size());
      for (const auto& p : sensed_next)
        obstacles.push_back(embed_obstacle(p, dx));
      try {
        ctrl->observe_and_update(x_next, obstacles);
      } catch (const SolverFailure&) {
        failed = true;
      }
    } else {
      hist.push(w);
      if (t >= H) {
        const Eigen::VectorXd b0 = ss.Atil * x + ss.base.D * w;
        const Eigen::VectorXd b = hist.input_stack(t, H);
        if (sensed_next.empty()) {
          base_records.push_back(
              game::make_sentinel_record(t + 1, b0, b, sentinel));
        } else {
          std::vector<Eigen::VectorXd> obstacles;
          for (const auto& p : sensed_next)
            obstacles.push_back(embed_obstacle(p, dx));
          base_records.push_back(game::make_record(t + 1, b0, b, obstacles));
        }
      }
    }

    us.push_back(u);
    ws.push_back(w);
    xs.push_back(x_next);
    sensed_log.push_back(std::move(sensed_next));
    x = x_next;
  }

  res.solver_failed = failed;
  const int steps = static_cast<int>(us.size());

  // Realized rewards: l_{t+1} = obstacle term at x_{t+1} minus costs, with
  // the residual input u~_t = u_t - K x_t; sentinel distance when nothing
  // was sensed.
  std::vector<double> rewards(steps, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> realized;
  for (int t = H; t < steps; ++t) {
    const Eigen::VectorXd& xn = xs[t + 1];
    const auto& sensed = sensed_log[t + 1];
    double obstacle = sentinel * sentinel;
    if (!sensed.empty()) {
      obstacle = std::numeric_limits<double>::infinity();
      for (const auto& p : sensed) {
        const Eigen::VectorXd diff = xn - embed_obstacle(p, dx);
        obstacle = std::min(obstacle, diff.squaredNorm());
      }
    }
    const Eigen::VectorXd u_res = us[t] - ss.K * xs[t];
    const double r = obstacle - xn.dot(params.Q * xn) -
                     u_res.dot(params.R * u_res);
    rewards[t] = r;
    realized.push_back(r);
  }

  for (int t = 0; t < steps; ++t) {
    res.lq_cost += xs[t].dot(params.Q * xs[t]) + us[t].dot(params.R * us[t]);
  }

  // Windowed clearance objective: obstacles frozen at sensing time t, state
  // window tau = 1..L.
  const int L = std::max(1, params.L);
  for (int t = 0; t < steps; ++t) {
    double obstacle = sentinel * sentinel;
    if (!sensed_log[t].empty()) {
      obstacle = std::numeric_limits<double>::infinity();
      for (int tau = 1; tau <= L && t + tau <= steps; ++tau) {
        for (const auto& p : sensed_log[t]) {
          const Eigen::VectorXd diff = xs[t + tau] - embed_obstacle(p, dx);
          obstacle = std::min(obstacle, diff.squaredNorm());
        }
      }
    }
    res.c_obs += obstacle - xs[t].dot(params.Q * xs[t]) -
                 us[t].dot(params.R * us[t]);
  }

  res.obstacles_passed = tracker.obstacles_passed();
  res.distinct_hits = tracker.distinct_hits();
  res.collision_count = tracker.collision_count();
  res.pass_left = tracker.pass_left();
  res.pass_right = tracker.pass_right();
  if (failed) {
    res.collision_fraction = 1.0;
  } else if (res.obstacles_passed > 0) {
    res.collision_fraction =
        static_cast<double>(res.distinct_hits) / res.obstacles_passed;
  }

  if (ctrl && static_cast<int>(ctrl->played().size()) > H + 2) {
    std::vector<double> deltas;
    for (std::size_t i = H + 2; i < ctrl->played().size(); ++i)
      deltas.push_back((ctrl->played()[i].stacked() -
                        ctrl->played()[i - 1].stacked())
                           .norm());
    std::sort(deltas.begin(), deltas.end());
    res.policy_delta_p50 = deltas[deltas.size() / 2];
    res.policy_delta_p90 = deltas[(deltas.size() * 9) / 10];
  }

  const auto& records = ctrl ? ctrl->records() : base_records;
  res.achieved_reward = std::accumulate(realized.begin(), realized.end(), 0.0);
  if (!records.empty() && !failed) {
    const auto [best, value] =
        online::OnlineController::hindsight_best(ss, records, params);
    (void)best;
    res.hindsight_value = value;
    res.regret = value - res.achieved_reward;
  }

  if (data) {
    data->dw = dw;
    data->states = std::move(xs);
    data->inputs = std::move(us);
    data->noises = std::move(ws);
    data->rewards = std::move(rewards);
    data->records = records;
    data->min_dist.assign(steps, std::numeric_limits<double>::infinity());
    for (int t = 0; t < steps; ++t) {
      for (const auto& p : sensed_log[t + 1]) {
        const double d =
            (data->states[t + 1].head<2>() - p).norm();
        data->min_dist[t] = std::min(data->min_dist[t], d);
      }
    }
    data->sensed = std::move(sensed_log);
    if (ctrl) {
      for (int t = 0; t < static_cast<int>(ctrl->played().size());
           t += std::max(1, config.policy_trace_every))
        data->policy_trace.emplace_back(t, ctrl->played()[t]);
    }
  }

  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  return res;
}

double RunResult::mean(double SeedResult::* field) const {
  if (rows.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : rows) s += r.*field;
  return s / rows.size();
}

double RunResult::stddev(double SeedResult::* field) const {
  if (rows.size() < 2) return 0.0;
  const double m = mean(field);
  double s = 0.0;
  for (const auto& r : rows) s += (r.*field - m) * (r.*field - m);
  return std::sqrt(s / (rows.size() - 1));
}

double RunResult::mean_collision_fraction() const {
  return mean(&SeedResult::collision_fraction);
}

double RunResult::one_sided_share() const {
  long left = 0, right = 0;
  for (const auto& r : rows) {
    left += r.pass_left;
    right += r.pass_right;
  }
  const long total = left + right;
  if (total == 0) return 0.0;
  return static_cast<double>(std::max(left, right)) / total;
}

double RunResult::right_share() const {
  long left = 0, right = 0;
  for (const auto& r : rows) {
    left += r.pass_left;
    right += r.pass_right;
  }
  const long total = left + right;
  if (total == 0) return 0.0;
  return static_cast<double>(right) / total;
}

RunResult run_all(const RunConfig& config) {
  RunResult out;
  out.rows.resize(config.seeds.size());
  const int n = static_cast<int>(config.seeds.size());
  int threads = config.threads > 0
                    ? config.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, n));

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      out.rows[i] = run_episode(config, config.seeds[i]);
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return out;
}

double empirical_regret(const lindyn::StabilizedSystem& ss,
                        std::span<const game::RewardRecord> records,
                        std::span<const double> realized,
                        const online::OlcParams& params) {
  if (records.size() != realized.size())
    throw ContractViolation("one realized reward per record required");
  if (records.empty()) return 0.0;
  const auto [best, value] =
      online::OnlineController::hindsight_best(ss, records, params);
  (void)best;
  const double achieved =
      std::accumulate(realized.begin(), realized.end(), 0.0);
  return value - achieved;
}

TableResult table_experiment(
    const RunConfig& base,
    const std::vector<std::pair<std::string, sim::DisturbanceProfile>>&
        profiles,
    const std::vector<ControllerKind>& controllers) {
  TableResult table;
  for (const auto& kind : controllers) {
    for (const auto& [name, profile] : profiles) {
      RunConfig cfg = base;
      cfg.controller = kind;
      cfg.profile = profile;
      TableCell cell;
      cell.controller = to_string(kind);
      cell.profile = name;
      cell.result = run_all(cfg);
      table.cells.push_back(std::move(cell));
    }
  }
  return table;
}

SweepGrid sweep_slalom(const RunConfig& base,
                       const std::vector<double>& offsets,
                       const std::vector<double>& gate_widths, int trials) {
  if (offsets.empty() || gate_widths.empty() || trials < 1)
    throw ContractViolation("sweep needs a nonempty grid");
  SweepGrid grid;
  grid.offsets = offsets;
  grid.gate_widths = gate_widths;
  grid.trials = trials;
  grid.failure_rate.assign(gate_widths.size(),
                           std::vector<double>(offsets.size(), 0.0));
  for (std::size_t wi = 0; wi < gate_widths.size(); ++wi) {
    for (std::size_t oi = 0; oi < offsets.size(); ++oi) {
      RunConfig cfg = base;
      const int n_gates = 6;
      cfg.env = sim::make_slalom(offsets[oi], gate_widths[wi], n_gates,
                                 /*wall_radius=*/60.0, /*wall_circles=*/20);
      // Slower learning rate outside the centerline environment.
      cfg.olc.lr = 0.001;
      cfg.env.sensor_radius = base.env.sensor_radius;
      cfg.env.robot_radius = base.env.robot_radius;
      cfg.env.station_speed = base.env.station_speed;
      // Horizon matched to the course: lead-in, gates, and a tail.
      const double spacing_steps = 600.0 / cfg.env.station_speed;
      cfg.olc.T = static_cast<int>((6 + n_gates + 2) * spacing_steps);
      cfg.seeds.clear();
      for (int tr = 0; tr < trials; ++tr) cfg.seeds.push_back(tr);
      const RunResult result = run_all(cfg);
      int failures = 0;
      for (const auto& row : result.rows)
        if (row.solver_failed || row.distinct_hits > 0) ++failures;
      grid.failure_rate[wi][oi] = static_cast<double>(failures) / trials;
    }
  }
  return grid;
}

RegretStudy regret_study(const RunConfig& base,
                         const std::vector<int>& horizons) {
  RegretStudy study;
  study.horizons = horizons;
  for (const int T : horizons) {
    RunConfig cfg = base;
    cfg.olc.T = T;
    // Scale the course so obstacles keep arriving for the whole horizon;
    // no lead-in, so short horizons still meet obstacles.
    double spacing = 600.0;
    double radius = 115.0;
    if (base.env.obstacles.size() >= 2) {
      radius = base.env.obstacles.front().radius;
      spacing = base.env.obstacles[1].center.y() -
                base.env.obstacles[0].center.y();
    }
    const int n = std::max(
        1, static_cast<int>(T * base.env.station_speed / spacing));
    cfg.env = sim::make_centerline(n, spacing, radius, /*lead_in=*/0.0);
    cfg.env.sensor_radius = base.env.sensor_radius;
    cfg.env.robot_radius = base.env.robot_radius;
    cfg.env.station_speed = base.env.station_speed;

    const RunResult result = run_all(cfg);
    double sum = 0.0;
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
      RegretPoint pt;
      pt.T = T;
      pt.seed = result.rows[i].seed;
      pt.regret = result.rows[i].regret;
      pt.regret_per_step = pt.regret / T;
      sum += pt.regret_per_step;
      study.points.push_back(pt);
    }
    study.mean_regret_per_step.push_back(sum / result.rows.size());
  }
  return study;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

namespace {

void write_row_prefix(std::ostream& os, const SeedResult& r) {
  os << r.seed << ',' << (r.solver_failed ? 1 : 0) << ','
     << r.obstacles_passed << ',' << r.distinct_hits << ','
     << r.collision_count << ',' << format_double(r.collision_fraction) << ','
     << format_double(r.lq_cost) << ',' << format_double(r.c_obs) << ','
     << r.pass_left << ',' << r.pass_right << ','
     << format_double(r.achieved_reward) << ','
     << format_double(r.hindsight_value) << ',' << format_double(r.regret)
     << ',' << format_double(r.policy_delta_p50) << ','
     << format_double(r.policy_delta_p90);
}

}  // namespace

void write_episode_csv(std::ostream& os, const EpisodeData& data) {
  os << "t,px,py,vx,vy,ux,uy";
  for (int i = 0; i < data.dw; ++i) os << ",w" << i;
  os << ",reward,min_dist,sensed\n";
  const int steps = static_cast<int>(data.inputs.size());
  for (int t = 0; t < steps; ++t) {
    const auto& x = data.states[t];
    os << t;
    for (int i = 0; i < 4; ++i) os << ',' << format_double(x[i]);
    for (int i = 0; i < 2; ++i) os << ',' << format_double(data.inputs[t][i]);
    for (int i = 0; i < data.dw; ++i)
      os << ',' << format_double(data.noises[t][i]);
    os << ',' << format_double(data.rewards[t]);
    os << ','
       << (std::isinf(data.min_dist[t]) ? "inf"
                                        : format_double(data.min_dist[t]));
    os << ',' << data.sensed[t + 1].size() << "\n";
  }
}

void write_results_csv(std::ostream& os, const RunResult& result) {
  os << "seed,solver_failed,obstacles_passed,distinct_hits,collision_count,"
        "collision_fraction,lq_cost,c_obs,pass_left,pass_right,"
        "achieved_reward,hindsight_value,regret,policy_delta_p50,"
        "policy_delta_p90\n";
  for (const auto& r : result.rows) {
    write_row_prefix(os, r);
    os << "\n";
  }
}

void write_aggregate_csv(std::ostream& os, const RunResult& result) {
  os << "metric,mean,std\n";
  const auto emit = [&](const char* name, double SeedResult::* f) {
    os << name << ',' << format_double(result.mean(f)) << ','
       << format_double(result.stddev(f)) << "\n";
  };
  emit("collision_fraction", &SeedResult::collision_fraction);
  emit("lq_cost", &SeedResult::lq_cost);
  emit("c_obs", &SeedResult::c_obs);
  emit("achieved_reward", &SeedResult::achieved_reward);
  emit("hindsight_value", &SeedResult::hindsight_value);
  emit("regret", &SeedResult::regret);
  os << "pass_right_share," << format_double(result.right_share()) << ",0\n";
  os << "pass_one_sided_share," << format_double(result.one_sided_share())
     << ",0\n";
}

void write_table_csv(std::ostream& os, const TableResult& table) {
  os << "controller,profile,mean_lq,std_lq,collision_fraction,"
        "pass_left,pass_right,one_sided_share\n";
  for (const auto& cell : table.cells) {
    long left = 0, right = 0;
    for (const auto& r : cell.result.rows) {
      left += r.pass_left;
      right += r.pass_right;
    }
    os << cell.controller << ',' << cell.profile << ','
       << format_double(cell.result.mean(&SeedResult::lq_cost)) << ','
       << format_double(cell.result.stddev(&SeedResult::lq_cost)) << ','
       << format_double(cell.result.mean_collision_fraction()) << ',' << left
       << ',' << right << ',' << format_double(cell.result.one_sided_share())
       << "\n";
  }
}

void render_table_text(std::ostream& os, const TableResult& table) {
  os << "controller   profile       LQ mean +- std        collisions\n";
  for (const auto& cell : table.cells) {
    char line[160];
    std::snprintf(line, sizeof line, "%-12s %-12s %12.4g +- %-10.4g %8.3f\n",
                  cell.controller.c_str(), cell.profile.c_str(),
                  cell.result.mean(&SeedResult::lq_cost),
                  cell.result.stddev(&SeedResult::lq_cost),
                  cell.result.mean_collision_fraction());
    os << line;
  }
}

void write_sweep_csv(std::ostream& os, const SweepGrid& grid) {
  os << "gate_width\\offset";
  for (double o : grid.offsets) os << ',' << format_double(o);
  os << "\n";
  for (std::size_t wi = 0; wi < grid.gate_widths.size(); ++wi) {
    os << format_double(grid.gate_widths[wi]);
    for (std::size_t oi = 0; oi < grid.offsets.size(); ++oi)
      os << ',' << format_double(grid.failure_rate[wi][oi]);
    os << "\n";
  }
}

void write_regret_csv(std::ostream& os, const RegretStudy& study) {
  os << "T,seed,regret,regret_per_step\n";
  for (const auto& pt : study.points) {
    os << pt.T << ',' << pt.seed << ',' << format_double(pt.regret) << ','
       << format_double(pt.regret_per_step) << "\n";
  }
  os << "\nT,mean_regret_per_step\n";
  for (std::size_t i = 0; i < study.horizons.size(); ++i)
    os << study.horizons[i] << ','
       << format_double(study.mean_regret_per_step[i]) << "\n";
}

void write_policy_trace(std::ostream& os, const EpisodeData& data) {
  for (const auto& [t, policy] : data.policy_trace) {
    os << "t " << t << "\n";
    dac::write_policy(os, policy);
  }
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw ContractViolation("spearman needs matched samples");
  const auto ranks = [](std::span<const double> v) {
    const int n = static_cast<int>(v.size());
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return v[a] < v[b]; });
    std::vector<double> rank(n, 0.0);
    int i = 0;
    while (i < n) {
      int j = i;
      while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * (i + j) + 1.0;
      for (int k = i; k <= j; ++k) rank[idx[k]] = avg;
      i = j + 1;
    }
    return rank;
  };
  const std::vector<double> rx = ranks(xs);
  const std::vector<double> ry = ranks(ys);
  const int n = static_cast<int>(xs.size());
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace olc::bench
