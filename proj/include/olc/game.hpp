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

#ifndef OLC_GAME_HPP_
#define OLC_GAME_HPP_

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "olc/records.hpp"
#include "olc/trs.hpp"

namespace olc::game {

struct GameParams {
  int n_iters = 50;
  double eg_rate = 0.0;  // <= 0: sqrt(ln k / N) / G with G a running loss max
  double tol = 1e-3;     // epsilon target of the oracle
  // Projected-ascent steps on the hard-min objective applied to the best
  // iterate. Degenerate instances (exactly symmetric obstacles) make the
  // alternation oscillate between corners of the relaxed argmax set; the
  // polish climbs onto the max-min ridge those corners straddle.
  int polish_iters = 80;
};

// Multiplicative-weights step on the simplex: c'_j proportional to
// c_j * exp(-eta * losses_j). Mass moves toward smaller losses.
Eigen::VectorXd eg_update(const Eigen::VectorXd& c,
                          const Eigen::VectorXd& losses, double eta);

// Hard-min objective of one record at a stacked gain matrix (no lambda term):
//   min_j ||a_j + B M b||^2 - ||b0 + B M b||_Q^2 - ||M b||_R^2,
// sentinel records contribute far_dist^2 as their obstacle term.
double record_reward(const RewardRecord& record, const Eigen::MatrixXd& B,
                     const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                     const Eigen::MatrixXd& M);

// Sum of record_reward over records plus lambda (M . P0).
double true_objective(const Eigen::MatrixXd& B,
                      std::span<const RewardRecord> records,
                      const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                      double lambda, const Eigen::MatrixXd& P0,
                      const Eigen::MatrixXd& M);

// Gradient of the hard-min objective of one record with respect to M
// (subgradient at the binding obstacle). Zero obstacle term for sentinels.
Eigen::MatrixXd record_gradient(const RewardRecord& record,
                                const Eigen::MatrixXd& B,
                                const Eigen::MatrixXd& Q,
                                const Eigen::MatrixXd& R,
                                const Eigen::MatrixXd& M);

struct GameTracePoint {
  int n = 0;
  double relaxed = 0.0;
  double true_value = 0.0;
  double gap = 0.0;
};

struct GameResult {
  Eigen::MatrixXd M;  // stacked du x H*(dw+1)
  double value = 0.0;  // true objective at M (hard min, lambda term included)
  double gap = 0.0;    // relaxed c-weighted value minus value, at the pair
  std::vector<Eigen::VectorXd> weights;        // c at the returned iterate
  std::vector<Eigen::VectorXd> final_weights;  // c after the last iteration
  int best_iter = -1;
  std::vector<GameTracePoint> trace;
};

// Convergence trace dump: one `n,relaxed,true,gap` row per iteration.
void write_game_trace(std::ostream& os, const GameResult& result);

// Alternating best-response solver: trust-region oracle for the gain player,
// exponentiated gradient for the per-step obstacle weights. Returns the
// iterate with the best true (hard-min) objective.
class GameSolver {
 public:
  GameSolver(const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
             const Eigen::MatrixXd& R, int H, double D_M);

  void add_record(const RewardRecord& record);
  int records() const { return acc_.records(); }
  int decision_dim() const { return acc_.dim(); }
  const trs::ObjectiveAccumulator& accumulator() const { return acc_; }

  GameResult run(const GameParams& params, double lambda,
                 const Eigen::MatrixXd& P0, bool keep_trace = false);

  double true_objective(const Eigen::MatrixXd& M, double lambda,
                        const Eigen::MatrixXd& P0) const;

 private:
  trs::ObjectiveAccumulator acc_;
  double D_M_;
  std::optional<trs::PreparedTrs> prepared_;
};

}  // namespace olc::game

#endif  // OLC_GAME_HPP_
