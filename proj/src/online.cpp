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

#include "olc/online.hpp"

#include <algorithm>
#include <cmath>

namespace olc::online {

namespace {

void check_psd(const Eigen::MatrixXd& m, double norm_cap, const char* name) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo < -1e-10 * std::max(1.0, hi))
    throw ContractViolation(std::string(name) + " must be PSD");
  if (norm_cap > 0.0 && hi > norm_cap)
    throw ContractViolation(std::string(name) + " norm exceeds xi");
}

void check_params(const lindyn::StabilizedSystem& ss, const OlcParams& p) {
  if (p.H < 1) throw ContractViolation("H >= 1 required");
  if (p.T < p.H) throw ContractViolation("H <= T required");
  if (!(p.eta > 0.0) || !(p.lambda >= 0.0))
    throw ContractViolation("eta > 0 and lambda >= 0 required");
  if (!(p.D_M > 0.0)) throw ContractViolation("D_M > 0 required");
  if (p.Q.rows() != ss.dx() || p.Q.cols() != ss.dx())
    throw ContractViolation("Q must be dx x dx");
  if (p.R.rows() != ss.du() || p.R.cols() != ss.du())
    throw ContractViolation("R must be du x du");
  check_psd(p.Q, p.xi, "Q");
  check_psd(p.R, p.xi, "R");
}

}  // namespace

double sentinel_distance_for(const lindyn::StabilizedSystem& ss,
                             const OlcParams& params) {
  if (params.sentinel_distance > 0.0) return params.sentinel_distance;
  const lindyn::Bounds b = lindyn::make_bounds(ss, params.H, params.D_M,
                                               params.C_w, params.xi);
  return 10.0 * b.C_x;
}

OnlineController::OnlineController(lindyn::StabilizedSystem ss,
                                   OlcParams params, std::uint64_t seed)
    : ss_(std::move(ss)),
      params_(std::move(params)),
      sentinel_(sentinel_distance_for(ss_, params_)),
      warmup_rng_(Rng(seed).stream("olc_warmup")),
      hist_(ss_.dw(), 2 * params_.H + 2),
      solver_(ss_.base.B, params_.Q, params_.R, params_.H, params_.D_M),
      policy_(dac::DacPolicy::zero(ss_.du(), ss_.dw(), params_.H,
                                   params_.D_M)) {
  check_params(ss_, params_);
  Rng p0_rng = Rng(seed).stream("olc_p0");
  P0_ = p0_rng.exponential_matrix(ss_.du(),
                                  params_.H * (ss_.dw() + 1), params_.eta);
  policy_ = warmup_draw();
  prev_policy_ = policy_;
}

dac::DacPolicy OnlineController::warmup_draw() {
  const Eigen::MatrixXd m = warmup_rng_.ball_matrix(
      ss_.du(), params_.H * (ss_.dw() + 1), params_.D_M);
  return dac::DacPolicy::from_stacked(m, params_.H, params_.D_M);
}

Eigen::VectorXd OnlineController::act(const Eigen::VectorXd& x) {
  if (awaiting_observe_)
    throw ContractViolation("act called twice without observe");
  x_t_ = x;
  u_t_ = dac::control(policy_, ss_, x, hist_);
  played_.push_back(policy_);
  awaiting_observe_ = true;
  return u_t_;
}

void OnlineController::observe_and_update(
    const Eigen::VectorXd& x_next,
    const std::vector<Eigen::VectorXd>& obstacles_next) {
  if (!awaiting_observe_) throw ContractViolation("observe before act");
  const Eigen::VectorXd w =
      lindyn::reconstruct_disturbance(ss_.base, x_t_, u_t_, x_next);
  hist_.push(w);
  w_log_.push_back(w);

  if (t_ >= params_.H) {
    const Eigen::VectorXd b0 = ss_.Atil * x_t_ + ss_.base.D * w;
    const Eigen::VectorXd b = hist_.input_stack(t_, params_.H);
    game::RewardRecord record =
        obstacles_next.empty()
            ? game::make_sentinel_record(t_ + 1, b0, b, sentinel_)
            : game::make_record(t_ + 1, b0, b, obstacles_next);
    rewards_.push_back(game::record_reward(record, ss_.base.B, params_.Q,
                                           params_.R, policy_.stacked()));
    records_.push_back(record);
    solver_.add_record(record);
  }

  if (records_.empty()) {
    policy_ = warmup_draw();
  } else {
    prev_policy_ = policy_;
    policy_ = (params_.update == UpdateRule::kFplGame)
                  ? solve_next()
                  : gradient_step(prev_policy_);
  }
  ++t_;
  awaiting_observe_ = false;
}

dac::DacPolicy OnlineController::solve_next() {
  game::GameParams gp;
  gp.n_iters = params_.game_iters;
  gp.tol = params_.eps;
  const game::GameResult res = solver_.run(gp, params_.lambda, P0_);
  return dac::DacPolicy::from_stacked(res.M, params_.H, params_.D_M);
}

dac::DacPolicy OnlineController::gradient_step(
    const dac::DacPolicy& from) const {
  const Eigen::MatrixXd M = from.stacked();
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(M.rows(), M.cols());
  for (const auto& r : records_)
    grad += game::record_gradient(r, ss_.base.B, params_.Q, params_.R, M);
  grad += params_.lambda * P0_;
  // The 1/t normalization keeps the ascent step stable as the window grows;
  // the argmax target is unchanged by the positive scaling.
  grad /= static_cast<double>(records_.size());
  const Eigen::MatrixXd stepped = M + params_.lr * grad;
  dac::DacPolicy next = from;
  const int width = ss_.dw() + 1;
  for (int i = 0; i < params_.H; ++i)
    next.gains[i] = stepped.middleCols(i * width, width);
  return next.projected();
}

dac::DacPolicy OnlineController::resolve_policy() {
  if (records_.empty()) return policy_;
  return (params_.update == UpdateRule::kFplGame) ? solve_next()
                                                  : gradient_step(prev_policy_);
}

std::pair<dac::DacPolicy, double> OnlineController::hindsight_best(
    const lindyn::StabilizedSystem& ss,
    std::span<const game::RewardRecord> records, const OlcParams& params) {
  if (records.empty()) throw ContractViolation("hindsight: no records");
  game::GameSolver solver(ss.base.B, params.Q, params.R, params.H,
                          params.D_M);
  for (const auto& r : records) solver.add_record(r);
  game::GameParams gp;
  gp.n_iters = params.hindsight_iters;
  gp.tol = params.eps;
  const Eigen::MatrixXd P0_zero =
      Eigen::MatrixXd::Zero(ss.du(), params.H * (ss.dw() + 1));
  const game::GameResult res = solver.run(gp, 0.0, P0_zero);
  return {dac::DacPolicy::from_stacked(res.M, params.H, params.D_M),
          res.value};
}

}  // namespace olc::online
