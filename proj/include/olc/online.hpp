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

#ifndef OLC_ONLINE_HPP_
#define OLC_ONLINE_HPP_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "olc/dac.hpp"
#include "olc/game.hpp"
#include "olc/lindyn.hpp"
#include "olc/rng.hpp"

namespace olc::online {

enum class UpdateRule { kFplGame, kGradDescent };

struct OlcParams {
  int T = 100;
  int H = 10;
  double eta = 10.0;    // rate of the Exp(eta) perturbation entries
  double lambda = 1e-3; // weight of the (M . P0) perturbation term
  double eps = 1e-3;    // oracle tolerance
  double D_M = 135.0;
  Eigen::MatrixXd Q;  // dx x dx, PSD
  Eigen::MatrixXd R;  // du x du, PSD
  UpdateRule update = UpdateRule::kGradDescent;
  double lr = 0.008;
  int L = 5;  // safety horizon; consumed only by the benchmark metrics
  int game_iters = 50;
  int hindsight_iters = 500;
  double C_w = 2.0;  // disturbance norm bound estimate
  double xi = 10.0;  // cost-matrix norm bound
  double sentinel_distance = 0.0;  // <= 0: 10 * C_x
};

// Distance assigned to the imaginary obstacle on empty-sensing steps.
double sentinel_distance_for(const lindyn::StabilizedSystem& ss,
                             const OlcParams& params);

// Follow-the-perturbed-leader controller. Usage per step t:
//   u_t = act(x_t);                       // play M_t
//   ... x_{t+1} = dynamics(x_t, u_t, w_t) happens outside ...
//   observe_and_update(x_{t+1}, obstacles at t+1);
// Warm-up steps (until the first reward record exists) play fresh uniform
// draws from the D_M ball. The perturbation P0 is sampled once at init.
class OnlineController {
 public:
  OnlineController(lindyn::StabilizedSystem ss, OlcParams params,
                   std::uint64_t seed);

  const Eigen::MatrixXd& perturbation() const { return P0_; }
  const dac::DacPolicy& policy() const { return policy_; }
  const lindyn::StabilizedSystem& system() const { return ss_; }
  const OlcParams& params() const { return params_; }
  int time() const { return t_; }
  double sentinel_distance() const { return sentinel_; }

  Eigen::VectorXd act(const Eigen::VectorXd& x);

  // Obstacles are positions in perturbation coordinates, embedded to the
  // state dimension (zero velocity components). Empty list -> sentinel.
  void observe_and_update(const Eigen::VectorXd& x_next,
                          const std::vector<Eigen::VectorXd>& obstacles_next);

  const std::vector<game::RewardRecord>& records() const { return records_; }
  // Realized reward of record idx at the policy that was actually played.
  double reward_at(int idx) const { return rewards_[idx]; }
  const std::vector<double>& rewards() const { return rewards_; }
  const std::vector<dac::DacPolicy>& played() const { return played_; }
  const std::vector<Eigen::VectorXd>& disturbances() const { return w_log_; }
  const dac::DisturbanceHistory& history() const { return hist_; }

  // Recompute M_{t+1} from the stored records; bitwise-deterministic.
  dac::DacPolicy resolve_policy();

  static std::pair<dac::DacPolicy, double> hindsight_best(
      const lindyn::StabilizedSystem& ss,
      std::span<const game::RewardRecord> records, const OlcParams& params);

 private:
  dac::DacPolicy warmup_draw();
  dac::DacPolicy solve_next();
  dac::DacPolicy gradient_step(const dac::DacPolicy& from) const;

  lindyn::StabilizedSystem ss_;
  OlcParams params_;
  Eigen::MatrixXd P0_;
  double sentinel_;
  Rng warmup_rng_;
  dac::DisturbanceHistory hist_;
  game::GameSolver solver_;
  dac::DacPolicy policy_;
  dac::DacPolicy prev_policy_;  // policy in force when the last record landed

  int t_ = 0;
  bool awaiting_observe_ = false;
  Eigen::VectorXd x_t_, u_t_;

  std::vector<game::RewardRecord> records_;
  std::vector<double> rewards_;
  std::vector<dac::DacPolicy> played_;
  std::vector<Eigen::VectorXd> w_log_;
};

}  // namespace olc::online

#endif  // OLC_ONLINE_HPP_
