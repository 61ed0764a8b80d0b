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

#include "olc/lindyn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace olc::lindyn {

namespace {

void check_system_shapes(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                         const Eigen::MatrixXd& D) {
  if (A.rows() != A.cols()) throw ContractViolation("A must be square");
  if (B.rows() != A.rows()) throw ContractViolation("B row count != dx");
  if (D.rows() != A.rows()) throw ContractViolation("D row count != dx");
  if (B.cols() > A.rows())
    throw ContractViolation("more inputs than states (du > dx)");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(B);
  if (qr.rank() != B.cols())
    throw ContractViolation("B must have full column rank");
}

}  // namespace

LinSystem LinSystem::make(Eigen::MatrixXd A, Eigen::MatrixXd B) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Identity(A.rows(), A.rows());
  return make(std::move(A), std::move(B), std::move(D));
}

LinSystem LinSystem::make(Eigen::MatrixXd A, Eigen::MatrixXd B,
                          Eigen::MatrixXd D) {
  check_system_shapes(A, B, D);
  return LinSystem{std::move(A), std::move(B), std::move(D)};
}

LinSystem double_integrator(double dt) {
  if (dt <= 0.0) throw ContractViolation("dt must be positive");
  const Eigen::Matrix2d I2 = Eigen::Matrix2d::Identity();
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(4, 4);
  A.block<2, 2>(0, 2) = dt * I2;
  Eigen::MatrixXd B(4, 2);
  B.block<2, 2>(0, 0) = 0.5 * dt * dt * I2;
  B.block<2, 2>(2, 0) = dt * I2;
  return LinSystem::make(std::move(A), std::move(B));
}

Eigen::VectorXd step(const LinSystem& sys, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& u, const Eigen::VectorXd& w) {
  if (x.size() != sys.dx() || u.size() != sys.du() || w.size() != sys.dw())
    throw ContractViolation("step: dimension mismatch");
  return sys.A * x + sys.B * u + sys.D * w;
}

Eigen::VectorXd reconstruct_disturbance(const LinSystem& sys,
                                        const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& u,
                                        const Eigen::VectorXd& x_next) {
  if (x.size() != sys.dx() || u.size() != sys.du() ||
      x_next.size() != sys.dx())
    throw ContractViolation("reconstruct_disturbance: dimension mismatch");
  if (sys.dw() != sys.dx())
    throw ReconstructionError("reconstruction requires square D");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(sys.D);
  if (!lu.isInvertible())
    throw ReconstructionError("reconstruction requires invertible D");
  return lu.solve(x_next - sys.A * x - sys.B * u);
}

double spectral_norm_of(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

double spectral_radius_of(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);
  double r = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    r = std::max(r, std::abs(es.eigenvalues()[i]));
  return r;
}

namespace {

StabilizedSystem finalize(const LinSystem& sys, Eigen::MatrixXd K) {
  if (K.rows() != sys.du() || K.cols() != sys.dx())
    throw ContractViolation("K has wrong shape");
  StabilizedSystem ss;
  ss.base = sys;
  ss.K = std::move(K);
  ss.Atil = sys.A + sys.B * ss.K;
  ss.spectral_norm = spectral_norm_of(ss.Atil);
  ss.spectral_radius = spectral_radius_of(ss.Atil);
  if (ss.spectral_radius >= 1.0)
    throw StabilizationError("closed loop is not stable: rho(Atil) = " +
                             std::to_string(ss.spectral_radius));
  ss.norm_contractive = ss.spectral_norm < 1.0;
  ss.gamma = ss.norm_contractive ? 1.0 - ss.spectral_norm
                                 : 1.0 - ss.spectral_radius;
  ss.beta = std::max({ss.spectral_norm, spectral_norm_of(sys.B),
                      spectral_norm_of(sys.D), spectral_norm_of(ss.K)});
  return ss;
}

}  // namespace

StabilizedSystem stabilize(const LinSystem& sys, const Eigen::MatrixXd& Q_lqr,
                           const Eigen::MatrixXd& R_lqr) {
  if (Q_lqr.rows() != sys.dx() || Q_lqr.cols() != sys.dx())
    throw ContractViolation("Q_lqr has wrong shape");
  if (R_lqr.rows() != sys.du() || R_lqr.cols() != sys.du())
    throw ContractViolation("R_lqr has wrong shape");

  constexpr double kTol = 1e-10;
  constexpr int kMaxIters = 10000;

  Eigen::MatrixXd P = Q_lqr;
  bool converged = false;
  for (int it = 0; it < kMaxIters; ++it) {
    const Eigen::MatrixXd BtP = sys.B.transpose() * P;
    const Eigen::MatrixXd G = R_lqr + BtP * sys.B;
    const Eigen::MatrixXd K = G.ldlt().solve(BtP * sys.A);
    const Eigen::MatrixXd P_next =
        Q_lqr + sys.A.transpose() * P * (sys.A - sys.B * K);
    const double delta = (P_next - P).cwiseAbs().maxCoeff();
    P = P_next;
    if (delta < kTol) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw StabilizationError("Riccati recursion did not converge");

  const Eigen::MatrixXd BtP = sys.B.transpose() * P;
  const Eigen::MatrixXd G = R_lqr + BtP * sys.B;
  Eigen::MatrixXd K = -G.ldlt().solve(BtP * sys.A);
  return finalize(sys, std::move(K));
}

StabilizedSystem with_feedback(const LinSystem& sys, const Eigen::MatrixXd& K) {
  return finalize(sys, K);
}

Bounds make_bounds(const StabilizedSystem& ss, int H, double D_M, double C_w,
                   double xi) {
  if (H < 1 || D_M <= 0.0 || C_w <= 0.0 || xi <= 0.0)
    throw ContractViolation("make_bounds: arguments must be positive");
  Bounds b;
  b.C_w = C_w;
  b.C_u = H * D_M * C_w;
  b.C_x = 2.0 * ss.beta * H * D_M * C_w / ss.gamma;
  b.xi = xi;
  return b;
}

}  // namespace olc::lindyn
