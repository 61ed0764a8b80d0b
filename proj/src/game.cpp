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

#include "olc/game.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace olc::game {

Eigen::VectorXd eg_update(const Eigen::VectorXd& c,
                          const Eigen::VectorXd& losses, double eta) {
  if (c.size() != losses.size())
    throw ContractViolation("eg_update: size mismatch");
  if (!losses.allFinite()) throw ContractViolation("eg_update: losses finite");
  if (!(eta > 0.0)) throw ContractViolation("eg_update: eta must be positive");
  double mass = 0.0;
  for (int j = 0; j < c.size(); ++j) {
    if (c[j] < -1e-12) throw ContractViolation("eg_update: negative weight");
    mass += std::max(c[j], 0.0);
  }
  if (mass <= 0.0) throw ContractViolation("eg_update: all-zero weights");

  // Shifting by the min loss is exact after renormalization and keeps the
  // exponentials in range.
  const double shift = losses.minCoeff();
  Eigen::VectorXd w(c.size());
  double sum = 0.0;
  for (int j = 0; j < c.size(); ++j) {
    w[j] = std::max(c[j], 0.0) * std::exp(-eta * (losses[j] - shift));
    sum += w[j];
  }
  if (sum <= 0.0) throw ContractViolation("eg_update: weights vanished");
  return w / sum;
}

double record_reward(const RewardRecord& record, const Eigen::MatrixXd& B,
                     const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                     const Eigen::MatrixXd& M) {
  const Eigen::VectorXd mb = M * record.b;
  const Eigen::VectorXd bu = B * mb;
  double obstacle;
  if (record.sentinel) {
    obstacle = record.far_dist * record.far_dist;
  } else {
    obstacle = std::numeric_limits<double>::infinity();
    for (const auto& a : record.a)
      obstacle = std::min(obstacle, (a + bu).squaredNorm());
  }
  const Eigen::VectorXd state = record.b0 + bu;
  return obstacle - state.dot(Q * state) - mb.dot(R * mb);
}

double true_objective(const Eigen::MatrixXd& B,
                      std::span<const RewardRecord> records,
                      const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                      double lambda, const Eigen::MatrixXd& P0,
                      const Eigen::MatrixXd& M) {
  double total = 0.0;
  for (const auto& r : records) total += record_reward(r, B, Q, R, M);
  if (lambda != 0.0) total += lambda * M.cwiseProduct(P0).sum();
  return total;
}

Eigen::MatrixXd record_gradient(const RewardRecord& record,
                                const Eigen::MatrixXd& B,
                                const Eigen::MatrixXd& Q,
                                const Eigen::MatrixXd& R,
                                const Eigen::MatrixXd& M) {
  const Eigen::VectorXd mb = M * record.b;
  const Eigen::VectorXd bu = B * mb;
  Eigen::VectorXd f = Eigen::VectorXd::Zero(B.cols());
  if (!record.sentinel) {
    int best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (int j = 0; j < record.k(); ++j) {
      const double v = (record.a[j] + bu).squaredNorm();
      if (v < best_val) {
        best_val = v;
        best = j;
      }
    }
    f += 2.0 * B.transpose() * (record.a[best] + bu);
  }
  f -= 2.0 * B.transpose() * (Q * (record.b0 + bu));
  f -= 2.0 * R * mb;
  return f * record.b.transpose();
}

void write_game_trace(std::ostream& os, const GameResult& result) {
  os << "n,relaxed,true,gap\n";
  char buf[40];
  for (const auto& pt : result.trace) {
    os << pt.n;
    for (double v : {pt.relaxed, pt.true_value, pt.gap}) {
      std::snprintf(buf, sizeof buf, "%.10g", v);
      os << ',' << buf;
    }
    os << "\n";
  }
}

GameSolver::GameSolver(const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                       const Eigen::MatrixXd& R, int H, double D_M)
    : acc_(B, Q, R, H), D_M_(D_M) {
  if (!(D_M > 0.0)) throw ContractViolation("D_M must be positive");
}

void GameSolver::add_record(const RewardRecord& record) {
  acc_.add(record);
  prepared_.reset();
}

double GameSolver::true_objective(const Eigen::MatrixXd& M, double lambda,
                                  const Eigen::MatrixXd& P0) const {
  double total = lambda != 0.0 ? lambda * M.cwiseProduct(P0).sum() : 0.0;
  for (int idx = 0; idx < acc_.records(); ++idx)
    total += record_reward(acc_.record(idx), acc_.B(), acc_.Q(), acc_.R(), M);
  return total;
}

GameResult GameSolver::run(const GameParams& params, double lambda,
                           const Eigen::MatrixXd& P0, bool keep_trace) {
  if (acc_.records() == 0) throw ContractViolation("run_game: no records");
  if (params.n_iters < 1) throw ContractViolation("run_game: N >= 1");

  const int du = static_cast<int>(acc_.B().cols());
  if (!prepared_) prepared_.emplace(acc_.P(), D_M_);

  int kbar = 1;
  std::vector<Eigen::VectorXd> c(acc_.records());
  for (int idx = 0; idx < acc_.records(); ++idx) {
    const int k = acc_.record(idx).k();
    kbar = std::max(kbar, k);
    c[idx] = Eigen::VectorXd::Constant(k, 1.0 / k);
  }

  GameResult result;
  result.value = -std::numeric_limits<double>::infinity();
  double running_loss_max = 0.0;
  const double trs_tol = std::clamp(params.tol, 1e-12, 1e-3);

  for (int n = 0; n < params.n_iters; ++n) {
    const Eigen::VectorXd p = acc_.linear(c, lambda, P0);
    const trs::TrsSolution sol = prepared_->solve(p, trs_tol);
    const Eigen::MatrixXd M = trs::unvec(sol.z, du);
    const double relaxed = sol.value + acc_.constant(c);
    const double truth = true_objective(M, lambda, P0);

    if (truth > result.value) {
      result.value = truth;
      result.M = M;
      result.gap = relaxed - truth;
      result.weights = c;
      result.best_iter = n;
    }
    if (keep_trace)
      result.trace.push_back({n, relaxed, truth, relaxed - truth});

    // One eta per sweep; per-step weight updates are independent given M.
    std::vector<Eigen::VectorXd> losses(acc_.records());
    for (int idx = 0; idx < acc_.records(); ++idx) {
      if (acc_.record(idx).sentinel) continue;
      losses[idx] = acc_.losses(idx, M);
      running_loss_max = std::max(running_loss_max, losses[idx].maxCoeff());
    }
    const double eta =
        params.eg_rate > 0.0
            ? params.eg_rate
            : std::sqrt(std::log(std::max(kbar, 2)) / params.n_iters) /
                  std::max(running_loss_max, 1e-12);
    for (int idx = 0; idx < acc_.records(); ++idx) {
      if (acc_.record(idx).sentinel) continue;
      c[idx] = eg_update(c[idx], losses[idx], eta);
    }
  }
  result.final_weights = std::move(c);

  if (params.polish_iters > 0) {
    Eigen::MatrixXd M = result.M;
    double value = result.value;
    double step = 0.1 * D_M_;
    for (int k = 0; k < params.polish_iters && step > 1e-13 * D_M_; ++k) {
      Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(M.rows(), M.cols());
      for (int idx = 0; idx < acc_.records(); ++idx)
        grad += record_gradient(acc_.record(idx), acc_.B(), acc_.Q(), acc_.R(),
                                M);
      if (lambda != 0.0) grad += lambda * P0;
      const double gn = grad.norm();
      if (gn < 1e-14) break;
      for (int back = 0; back < 30; ++back) {
        Eigen::MatrixXd trial = M + (step / gn) * grad;
        const double tn = trial.norm();
        if (tn > D_M_) trial *= D_M_ / tn;
        const double tv = true_objective(trial, lambda, P0);
        if (tv > value) {
          M = std::move(trial);
          value = tv;
          step *= 1.3;
          break;
        }
        step *= 0.5;
        if (step <= 1e-13 * D_M_) break;
      }
    }
    result.M = M;
    result.value = value;
  }

  // Gap at the returned pair: the c-weighted relaxation dominates the hard
  // min pointwise, so this is nonnegative by construction.
  {
    const Eigen::VectorXd m = trs::vec(result.M);
    const Eigen::VectorXd p_at = acc_.linear(result.weights, lambda, P0);
    const double relaxed =
        m.dot(acc_.P() * m) + p_at.dot(m) + acc_.constant(result.weights);
    result.gap = relaxed - result.value;
  }
  return result;
}

}  // namespace olc::game
