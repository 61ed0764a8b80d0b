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

#ifndef OLC_TRS_HPP_
#define OLC_TRS_HPP_

#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "olc/lindyn.hpp"
#include "olc/records.hpp"

namespace olc::trs {

// max_{||z|| <= radius} z^T P z + p^T z, with P symmetrized at construction.
struct TrustRegionInstance {
  Eigen::MatrixXd P;
  Eigen::VectorXd p;
  double radius = 0.0;

  TrustRegionInstance(Eigen::MatrixXd P_in, Eigen::VectorXd p_in,
                      double radius_in);
  int dim() const { return static_cast<int>(p.size()); }
};

struct TrsSolution {
  Eigen::VectorXd z;
  double value = 0.0;
  bool on_boundary = false;
  double multiplier = 0.0;  // KKT: 2 P z + p = 2 multiplier z, multiplier >= 0
};

// Exact solve via eigendecomposition and a safeguarded Newton iteration on
// the boundary secular equation; handles the interior and hard cases.
TrsSolution solve(const TrustRegionInstance& inst, double tol = 1e-10);

// Eigendecompose P once, then solve for many linear terms p. This is the hot
// path of the obstacle game: P never depends on the obstacle weights.
class PreparedTrs {
 public:
  PreparedTrs(const Eigen::MatrixXd& P, double radius);
  TrsSolution solve(const Eigen::VectorXd& p, double tol = 1e-10) const;
  double radius() const { return radius_; }

 private:
  double radius_;
  Eigen::VectorXd eigvals_;  // descending
  Eigen::MatrixXd eigvecs_;  // columns match eigvals_
};

// Quadratic form m^T P m + p^T m + constant over m = vec(M) (column-major),
// equal to the c-weighted game objective
//   sum_tau [ sum_j c_j ||a_j + B M b||^2 - ||b0 + B M b||_Q^2 - ||M b||_R^2 ]
//   + lambda (M . P0).
struct QuadraticObjective {
  Eigen::MatrixXd P;
  Eigen::VectorXd p;
  double constant = 0.0;
};

// Incremental assembly of the game quadratic. P and the c-independent linear
// part accumulate once per record; the c-weighted linear part is rebuilt per
// game iteration from cached per-obstacle vectors.
class ObjectiveAccumulator {
 public:
  ObjectiveAccumulator(const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                       const Eigen::MatrixXd& R, int H);

  void add(const game::RewardRecord& record);

  int records() const { return static_cast<int>(aux_.size()); }
  int dim() const { return dim_; }
  const Eigen::MatrixXd& P() const { return P_; }
  const Eigen::MatrixXd& B() const { return B_; }
  const Eigen::MatrixXd& Q() const { return Q_; }
  const Eigen::MatrixXd& R() const { return R_; }

  // Full linear term and constant for simplex weights c (one vector per
  // record; sentinel records ignore their weight).
  Eigen::VectorXd linear(std::span<const Eigen::VectorXd> weights,
                         double lambda, const Eigen::MatrixXd& P0) const;
  double constant(std::span<const Eigen::VectorXd> weights) const;

  // Obstacle losses ||a_j + B M b||^2 for one record at a stacked M.
  Eigen::VectorXd losses(int record_idx, const Eigen::MatrixXd& M) const;
  const game::RewardRecord& record(int idx) const { return aux_[idx].record; }

 private:
  struct RecordAux {
    game::RewardRecord record;
    std::vector<Eigen::VectorXd> v;  // per obstacle: vec(2 B^T a_j b^T)
    Eigen::VectorXd a_sq;            // per obstacle: ||a_j||^2
  };

  int dim_ = 0;
  int H_ = 1;
  Eigen::MatrixXd B_, Q_, R_;
  Eigen::MatrixXd g_full_;      // B^T B - B^T Q B - R
  Eigen::MatrixXd g_sentinel_;  // - B^T Q B - R
  Eigen::MatrixXd P_;
  Eigen::VectorXd p_const_;
  double const_const_ = 0.0;
  std::vector<RecordAux> aux_;
};

// One-shot build of the hidden-convex reduction: returns the trust-region
// instance over vec(M) plus the constant offset dropped by the argmax.
std::pair<TrustRegionInstance, double> build_instance(
    const lindyn::StabilizedSystem& ss,
    std::span<const game::RewardRecord> records,
    std::span<const Eigen::VectorXd> weights, const Eigen::MatrixXd& Q,
    const Eigen::MatrixXd& R, double lambda, const Eigen::MatrixXd& P0,
    double D_M);

// vec / unvec between a du x n stacked gain matrix and its column-major
// vectorization, the convention under which M b = (b^T (x) I) vec(M).
Eigen::VectorXd vec(const Eigen::MatrixXd& M);
Eigen::MatrixXd unvec(const Eigen::VectorXd& m, int du);

// Debug dump: keys P, p, radius, const.
void write_instance(std::ostream& os, const TrustRegionInstance& inst,
                    double constant);

}  // namespace olc::trs

#endif  // OLC_TRS_HPP_
