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

#ifndef OLC_DAC_HPP_
#define OLC_DAC_HPP_

#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "olc/lindyn.hpp"

namespace olc::dac {

// Disturbance-action policy: u = K x + sum_i M^{[i]} w~_{t-i}, where w~ is
// the one-padded disturbance (w; 1). The last column of each gain block is
// the bias channel. The whole stack lives in a Frobenius ball of radius D_M.
struct DacPolicy {
  std::vector<Eigen::MatrixXd> gains;  // gains[i-1] = M^{[i]}, du x (dw+1)
  double radius = 0.0;                 // D_M

  int H() const { return static_cast<int>(gains.size()); }
  int du() const { return gains.empty() ? 0 : static_cast<int>(gains[0].rows()); }
  int dw_pad() const {
    return gains.empty() ? 0 : static_cast<int>(gains[0].cols());
  }
  double frob_norm() const;

  // [M^{[1]} M^{[2]} ... M^{[H]}], du x H*(dw+1).
  Eigen::MatrixXd stacked() const;

  static DacPolicy zero(int du, int dw, int H, double D_M);
  static DacPolicy from_stacked(const Eigen::MatrixXd& m, int H, double D_M);

  // Scales into the ball when outside; identity otherwise.
  DacPolicy projected() const;
};

// Absolute-time log of one-padded disturbances. Entries at negative times
// read as the one-padded zero (0,...,0,1); entries evicted from the ring
// are an error to request.
class DisturbanceHistory {
 public:
  DisturbanceHistory(int dw, int capacity);

  void push(const Eigen::VectorXd& w);  // appends w~_{time}, advances time
  int time() const { return time_; }
  int dw() const { return dw_; }

  // w~_s. s >= time or evicted -> ContractViolation; s < 0 -> (0,..,0,1).
  Eigen::VectorXd at_time(int s) const;

  // (w~_{t-1}; ...; w~_{t-H}) - the feature vector of the input at time t.
  Eigen::VectorXd input_stack(int t, int H) const;

 private:
  int dw_;
  int capacity_;
  int time_ = 0;
  std::vector<Eigen::VectorXd> ring_;
};

// u = K x + sum_i M^{[i]} w~_{t-i} at t = hist.time().
Eigen::VectorXd control(const DacPolicy& policy,
                        const lindyn::StabilizedSystem& ss,
                        const Eigen::VectorXd& x,
                        const DisturbanceHistory& hist);

// Disturbance-to-state transfer matrix for lag i under a window of policies,
// window[j] = policy at time t-j (j = 0..H):
//   Psi_{t,i} = Atil^i [D|0] 1[i<=H]
//             + sum_j Atil^j B M_{t-j}^{[i-j]} 1[i-j in 1..H].
Eigen::MatrixXd psi(const lindyn::StabilizedSystem& ss,
                    std::span<const DacPolicy> window, int i);

// Truncated counterfactual next state y_{t+1} = sum_{i=0..2H} Psi_{t,i}
// w~_{t-i}, with t the newest time in hist. Drops the Atil^{H+1} x_{t-H}
// term.
Eigen::VectorXd counterfactual_state(const lindyn::StabilizedSystem& ss,
                                     std::span<const DacPolicy> window,
                                     const DisturbanceHistory& hist);

// Window of H+1 copies of one policy, with zero policies for slots that fall
// before time 0 (no policy existed before the episode).
std::vector<DacPolicy> fixed_window(const DacPolicy& policy, int t);

struct RolloutPoint {
  Eigen::VectorXd state;     // x_{t+1} under the fixed policy
  Eigen::VectorXd residual;  // u~_t = M w~-stack
};

// Exact replay of the whole horizon under a single fixed policy and the
// realized disturbance log (one-padded-zero history before time 0).
std::vector<RolloutPoint> counterfactual_rollout(
    const lindyn::StabilizedSystem& ss, const DacPolicy& policy,
    std::span<const Eigen::VectorXd> w_log, const Eigen::VectorXd& x0);

// Text round trip: H, radius, dims, then row-major gain blocks.
void write_policy(std::ostream& os, const DacPolicy& policy);
DacPolicy read_policy(std::istream& is);

}  // namespace olc::dac

#endif  // OLC_DAC_HPP_
