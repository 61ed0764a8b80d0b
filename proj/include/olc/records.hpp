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

#ifndef OLC_RECORDS_HPP_
#define OLC_RECORDS_HPP_

#include <vector>

#include <Eigen/Dense>

#include "olc/errors.hpp"

namespace olc::game {

// Per-step hindsight data: the reward at step tau as a function of a
// counterfactual gain stack M is
//   min_j ||a_j + B M b||^2 - ||b0 + B M b||_Q^2 - ||M b||_R^2,
// with a_j = b0 - p_j, b0 the disturbance-only next-state part and b the
// one-padded disturbance stack feeding the input.
//
// Steps with nothing sensed carry a sentinel far obstacle; its obstacle term
// is the constant far_dist^2 (no M-dependence), so an imaginary obstacle can
// never dominate the update.
struct RewardRecord {
  int tau = 0;
  std::vector<Eigen::VectorXd> a;  // k vectors of size dx
  Eigen::VectorXd b;               // H*(dw+1)
  Eigen::VectorXd b0;              // dx
  bool sentinel = false;
  double far_dist = 0.0;

  int k() const { return static_cast<int>(a.size()); }
};

inline RewardRecord make_record(int tau, const Eigen::VectorXd& b0,
                                const Eigen::VectorXd& b,
                                const std::vector<Eigen::VectorXd>& obstacles) {
  if (obstacles.empty())
    throw ContractViolation("record needs >= 1 obstacle; use a sentinel");
  RewardRecord r;
  r.tau = tau;
  r.b0 = b0;
  r.b = b;
  r.a.reserve(obstacles.size());
  for (const auto& p : obstacles) {
    if (p.size() != b0.size())
      throw ContractViolation("obstacle dim != state dim");
    r.a.push_back(b0 - p);
  }
  return r;
}

inline RewardRecord make_sentinel_record(int tau, const Eigen::VectorXd& b0,
                                         const Eigen::VectorXd& b,
                                         double far_dist) {
  if (far_dist <= 0.0) throw ContractViolation("far_dist must be positive");
  RewardRecord r;
  r.tau = tau;
  r.b0 = b0;
  r.b = b;
  r.sentinel = true;
  r.far_dist = far_dist;
  Eigen::VectorXd p = b0;
  p[0] += far_dist;  // a_1 = b0 - p, kept so a_j = b0 - p_j holds throughout
  r.a.push_back(b0 - p);
  return r;
}

}  // namespace olc::game

#endif  // OLC_RECORDS_HPP_
