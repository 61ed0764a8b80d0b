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

#include <doctest.h>

#include <sstream>

#include "olc/dac.hpp"
#include "oracles.hpp"

using namespace olc;
using namespace olc::dac;

namespace {

// Simulate the closed loop with control() and return states x_0..x_T.
std::vector<Eigen::VectorXd> simulate(const lindyn::StabilizedSystem& ss,
                                      const DacPolicy& policy,
                                      const std::vector<Eigen::VectorXd>& ws,
                                      const Eigen::VectorXd& x0) {
  DisturbanceHistory hist(ss.dw(), 2 * policy.H() + 2);
  std::vector<Eigen::VectorXd> xs{x0};
  Eigen::VectorXd x = x0;
  for (const auto& w : ws) {
    const Eigen::VectorXd u = control(policy, ss, x, hist);
    x = lindyn::step(ss.base, x, u, w);
    hist.push(w);
    xs.push_back(x);
  }
  return xs;
}

DacPolicy random_policy(Rng& rng, int du, int dw, int H, double D_M) {
  return DacPolicy::from_stacked(rng.ball_matrix(du, H * (dw + 1), D_M), H,
                                 D_M);
}

}  // namespace

TEST_CASE("control: zero gains reduce to state feedback") {
  Rng rng(1);
  const auto ss = oracles::random_contractive(rng, 4, 2, 0.8);
  const auto policy = DacPolicy::zero(2, 4, 3, 1.0);
  DisturbanceHistory hist(4, 10);
  hist.push(rng.normal_vector(4));
  const Eigen::VectorXd x = rng.normal_vector(4);
  CHECK((control(policy, ss, x, hist) - ss.K * x).norm() < 1e-14);
}

TEST_CASE("control: bias column alone gives a constant input") {
  Rng rng(2);
  auto base = oracles::random_system(rng, 3, 2, 0.5);
  const auto ss = lindyn::with_feedback(base, Eigen::MatrixXd::Zero(2, 3));
  auto policy = DacPolicy::zero(2, 3, 1, 10.0);
  Eigen::Vector2d b(0.7, -0.2);
  policy.gains[0].col(3) = b;  // bias channel
  DisturbanceHistory hist(3, 6);
  for (int t = 0; t < 4; ++t) {
    const Eigen::VectorXd u = control(policy, ss, rng.normal_vector(3), hist);
    CHECK((u - b).norm() < 1e-14);
    hist.push(rng.normal_vector(3));
  }
}

TEST_CASE("control: matches an explicit summation") {
  Rng rng(3);
  const auto ss = oracles::random_contractive(rng, 4, 2, 0.9);
  const int H = 4;
  const auto policy = random_policy(rng, 2, 4, H, 2.0);
  DisturbanceHistory hist(4, 2 * H + 2);
  std::vector<Eigen::VectorXd> ws;
  for (int t = 0; t < 7; ++t) {
    const Eigen::VectorXd w = rng.normal_vector(4);
    ws.push_back(w);
    hist.push(w);
  }
  const Eigen::VectorXd x = rng.normal_vector(4);
  const Eigen::VectorXd got = control(policy, ss, x, hist);

  Eigen::VectorXd want = ss.K * x;
  const int t = static_cast<int>(ws.size());
  for (int i = 1; i <= H; ++i) {
    Eigen::VectorXd padded(5);
    padded.head(4) = ws[t - i];
    padded[4] = 1.0;
    want += policy.gains[i - 1] * padded;
  }
  CHECK((got - want).norm() < 1e-12 * (1.0 + want.norm()));
}

TEST_CASE("control: residual obeys the crude norm bound") {
  Rng rng(17);
  const auto ss = oracles::random_contractive(rng, 4, 2, 0.85);
  const int H = 4;
  const double D_M = 1.5;
  const double C_w = 2.0;
  const double bound = D_M * std::sqrt(double(H)) * std::sqrt(C_w * C_w + 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto policy = random_policy(rng, 2, 4, H, D_M);
    dac::DisturbanceHistory hist(4, 2 * H + 2);
    for (int s = 0; s < H + 2; ++s) {
      Eigen::VectorXd w = rng.normal_vector(4);
      if (w.norm() > C_w) w *= C_w / w.norm();
      hist.push(w);
    }
    const Eigen::VectorXd x = rng.normal_vector(4);
    const Eigen::VectorXd residual =
        control(policy, ss, x, hist) - ss.K * x;
    CHECK(residual.norm() <= bound * (1.0 + 1e-9));
  }
}

TEST_CASE("history: stored entries end in one, pre-episode pads too") {
  DisturbanceHistory hist(3, 8);
  Rng rng(4);
  hist.push(rng.normal_vector(3));
  hist.push(rng.normal_vector(3));
  CHECK(hist.at_time(0)[3] == 1.0);
  CHECK(hist.at_time(1)[3] == 1.0);
  const Eigen::VectorXd pre = hist.at_time(-5);
  CHECK(pre.head(3).norm() == 0.0);
  CHECK(pre[3] == 1.0);
  CHECK_THROWS_AS(hist.at_time(2), ContractViolation);
}

TEST_CASE("history: evicted entries are an error") {
  DisturbanceHistory hist(2, 3);
  Rng rng(5);
  for (int t = 0; t < 6; ++t) hist.push(rng.normal_vector(2));
  CHECK_THROWS_AS(hist.at_time(1), ContractViolation);
  CHECK(hist.at_time(5)[2] == 1.0);
}

TEST_CASE("psi: zero gains give the disturbance ladder") {
  Rng rng(6);
  const auto ss = oracles::random_contractive(rng, 3, 2, 0.7);
  const int H = 3;
  std::vector<DacPolicy> window(H + 1, DacPolicy::zero(2, 3, H, 1.0));
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(3, 4);
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(3, 3);
  for (int i = 0; i <= H; ++i) {
    expected.leftCols(3) = power * ss.base.D;
    CHECK((psi(ss, window, i) - expected).norm() < 1e-12);
    power = power * ss.Atil;
  }
  // Beyond H both indicator terms die.
  CHECK(psi(ss, window, 2 * H).norm() == 0.0);
  CHECK_THROWS_AS(psi(ss, window, 2 * H + 1), ContractViolation);
}

TEST_CASE("counterfactual state: all zero in, zero out") {
  Rng rng(7);
  const auto ss = oracles::random_contractive(rng, 3, 1, 0.8);
  const int H = 2;
  std::vector<DacPolicy> window(H + 1, DacPolicy::zero(1, 3, H, 1.0));
  DisturbanceHistory hist(3, 2 * H + 2);
  for (int t = 0; t < 2 * H + 1; ++t) hist.push(Eigen::VectorXd::Zero(3));
  // The one-pad bias channel is live, but the gains are zero.
  CHECK(counterfactual_state(ss, window, hist).norm() == 0.0);
}

TEST_CASE("counterfactual state: exact for t <= H from the origin") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto ss = oracles::random_contractive(rng, 4, 2, 0.85);
    const int H = 3;
    const auto policy = random_policy(rng, 2, 4, H, 1.5);
    for (int t = 0; t <= H; ++t) {
      std::vector<Eigen::VectorXd> ws;
      for (int s = 0; s <= t; ++s) ws.push_back(rng.normal_vector(4));
      const auto xs = simulate(ss, policy, ws, Eigen::VectorXd::Zero(4));

      DisturbanceHistory hist(4, 2 * H + 2);
      for (const auto& w : ws) hist.push(w);
      const auto window = fixed_window(policy, t);
      const Eigen::VectorXd y = counterfactual_state(ss, window, hist);
      CHECK((y - xs.back()).norm() < 1e-10 * (1.0 + xs.back().norm()));
    }
  }
}

TEST_CASE(
    "counterfactual state: truncation error is exactly the dropped term") {
  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const auto ss = oracles::random_contractive(rng, 4, 2, 0.8);
    const int H = 3;
    const auto policy = random_policy(rng, 2, 4, H, 1.0);
    const Eigen::VectorXd x0 = rng.normal_vector(4);
    const int t = H + 2 + (trial % 3);
    std::vector<Eigen::VectorXd> ws;
    for (int s = 0; s <= t; ++s) ws.push_back(rng.normal_vector(4));
    const auto xs = simulate(ss, policy, ws, x0);

    DisturbanceHistory hist(4, 2 * H + 2);
    for (const auto& w : ws) hist.push(w);
    const auto window = fixed_window(policy, t);
    const Eigen::VectorXd y = counterfactual_state(ss, window, hist);

    // x_{t+1} - y_{t+1} = Atil^{H+1} x_{t-H}.
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(4, 4);
    for (int i = 0; i <= H; ++i) power = power * ss.Atil;
    const Eigen::VectorXd dropped = power * xs[t - H];
    CHECK((xs.back() - y - dropped).norm() < 1e-10 * (1.0 + dropped.norm()));
    // And is bounded by the contraction envelope.
    CHECK((xs.back() - y).norm() <=
          std::pow(ss.spectral_norm, H + 1) * xs[t - H].norm() * (1 + 1e-9));
  }
}

TEST_CASE("counterfactual state: truncation error decays with H") {
  Rng rng(10);
  const auto ss = oracles::random_contractive(rng, 4, 2, 0.85);
  std::vector<double> mean_err;
  for (const int H : {2, 4, 8}) {
    double total = 0.0;
    for (int trial = 0; trial < 40; ++trial) {
      const auto policy = random_policy(rng, 2, 4, H, 1.0);
      const Eigen::VectorXd x0 = rng.normal_vector(4);
      const int t = H + 4;
      std::vector<Eigen::VectorXd> ws;
      for (int s = 0; s <= t; ++s) ws.push_back(rng.normal_vector(4));
      const auto xs = simulate(ss, policy, ws, x0);
      DisturbanceHistory hist(4, 2 * H + 2);
      for (const auto& w : ws) hist.push(w);
      const Eigen::VectorXd y =
          counterfactual_state(ss, fixed_window(policy, t), hist);
      total += (xs.back() - y).norm();
    }
    mean_err.push_back(total / 40);
  }
  CHECK(mean_err[1] < mean_err[0]);
  CHECK(mean_err[2] < mean_err[1]);
}

TEST_CASE("counterfactual state: linear in the gains") {
  Rng rng(11);
  const auto ss = oracles::random_contractive(rng, 4, 2, 0.8);
  const int H = 3;
  const int t = 2 * H;
  DisturbanceHistory hist(4, 2 * H + 2);
  for (int s = 0; s <= t; ++s) hist.push(rng.normal_vector(4));

  const auto m1 = random_policy(rng, 2, 4, H, 0.5);
  const auto m2 = random_policy(rng, 2, 4, H, 0.5);
  DacPolicy sum = m1;
  for (int i = 0; i < H; ++i) sum.gains[i] += m2.gains[i];
  sum.radius = 2.0;
  const auto zero = DacPolicy::zero(2, 4, H, 1.0);

  const Eigen::VectorXd y_sum =
      counterfactual_state(ss, fixed_window(sum, t), hist);
  const Eigen::VectorXd y1 =
      counterfactual_state(ss, fixed_window(m1, t), hist);
  const Eigen::VectorXd y2 =
      counterfactual_state(ss, fixed_window(m2, t), hist);
  const Eigen::VectorXd y0 =
      counterfactual_state(ss, fixed_window(zero, t), hist);
  CHECK((y_sum - (y1 + y2 - y0)).norm() < 1e-10 * (1.0 + y_sum.norm()));
}

TEST_CASE("bias equivalence: explicit constant equals one-pad folding") {
  Rng rng(12);
  const auto ss = oracles::random_contractive(rng, 4, 2, 0.8);
  const int H = 2;
  auto w_only = random_policy(rng, 2, 4, H, 1.0);
  for (int i = 0; i < H; ++i) w_only.gains[i].col(4).setZero();
  const Eigen::Vector2d bias(0.3, -0.4);

  // Folded: bias carried by a one-pad column.
  auto folded = w_only;
  folded.radius = 10.0;
  folded.gains[0].col(4) = bias;

  std::vector<Eigen::VectorXd> ws;
  for (int s = 0; s < 9; ++s) ws.push_back(rng.normal_vector(4));
  const Eigen::VectorXd x0 = rng.normal_vector(4);

  // Reference: u = K x + Sum M^[i] w~ + b with the bias added by hand.
  Eigen::VectorXd x = x0;
  DisturbanceHistory hist(4, 2 * H + 2);
  std::vector<Eigen::VectorXd> xs_ref{x0};
  for (const auto& w : ws) {
    const Eigen::VectorXd u = control(w_only, ss, x, hist) + bias;
    x = lindyn::step(ss.base, x, u, w);
    hist.push(w);
    xs_ref.push_back(x);
  }

  const auto xs_folded = simulate(ss, folded, ws, x0);
  for (std::size_t i = 0; i < xs_ref.size(); ++i)
    CHECK((xs_ref[i] - xs_folded[i]).norm() <
          1e-11 * (1.0 + xs_ref[i].norm()));
}

TEST_CASE("rollout: replay of the played constant policy is exact") {
  Rng rng(13);
  const auto ss = oracles::random_contractive(rng, 4, 2, 0.85);
  const int H = 3;
  const auto policy = random_policy(rng, 2, 4, H, 1.0);
  std::vector<Eigen::VectorXd> ws;
  for (int s = 0; s < 12; ++s) ws.push_back(rng.normal_vector(4));
  const Eigen::VectorXd x0 = rng.normal_vector(4);

  const auto xs = simulate(ss, policy, ws, x0);
  const auto rollout = counterfactual_rollout(ss, policy, ws, x0);
  REQUIRE(rollout.size() == ws.size());
  for (std::size_t t = 0; t < rollout.size(); ++t)
    CHECK((rollout[t].state - xs[t + 1]).norm() <
          1e-10 * (1.0 + xs[t + 1].norm()));
}

TEST_CASE("rollout: zero policy reproduces the pure feedback loop") {
  Rng rng(14);
  const auto ss = oracles::random_contractive(rng, 3, 2, 0.8);
  const auto zero = DacPolicy::zero(2, 3, 2, 1.0);
  std::vector<Eigen::VectorXd> ws;
  for (int s = 0; s < 8; ++s) ws.push_back(rng.normal_vector(3));
  Eigen::VectorXd x = rng.normal_vector(3);
  const auto rollout = counterfactual_rollout(ss, zero, ws, x);
  for (std::size_t t = 0; t < ws.size(); ++t) {
    x = ss.Atil * x + ss.base.D * ws[t];
    CHECK((rollout[t].state - x).norm() < 1e-12 * (1.0 + x.norm()));
    CHECK(rollout[t].residual.norm() == 0.0);
  }
}

TEST_CASE("policy: ball invariant and projection") {
  Rng rng(15);
  const auto policy = random_policy(rng, 2, 3, 4, 1.5);
  CHECK(policy.frob_norm() <= 1.5 * (1 + 1e-12));
  Eigen::MatrixXd big = Eigen::MatrixXd::Constant(2, 16, 1.0);
  CHECK_THROWS_AS(DacPolicy::from_stacked(big, 4, 0.1), ContractViolation);
  DacPolicy loose = DacPolicy::zero(2, 3, 4, 0.1);
  loose.gains[0].setConstant(1.0);
  const DacPolicy proj = loose.projected();
  CHECK(proj.frob_norm() == doctest::Approx(0.1));
}

TEST_CASE("policy: text round trip") {
  Rng rng(16);
  const auto policy = random_policy(rng, 2, 4, 3, 2.0);
  std::stringstream ss;
  write_policy(ss, policy);
  const DacPolicy back = read_policy(ss);
  REQUIRE(back.H() == policy.H());
  CHECK(back.radius == policy.radius);
  for (int i = 0; i < policy.H(); ++i)
    CHECK((back.gains[i] - policy.gains[i]).norm() == 0.0);
}
