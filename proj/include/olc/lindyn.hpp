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

#ifndef OLC_LINDYN_HPP_
#define OLC_LINDYN_HPP_

#include <Eigen/Dense>

#include "olc/errors.hpp"

namespace olc::lindyn {

// Discrete-time LTI perturbation model x' = A x + B u + D w.
// B must have full column rank (no redundant inputs); D maps the disturbance
// channel into the state and defaults to the identity.
struct LinSystem {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd D;

  int dx() const { return static_cast<int>(A.rows()); }
  int du() const { return static_cast<int>(B.cols()); }
  int dw() const { return static_cast<int>(D.cols()); }

  static LinSystem make(Eigen::MatrixXd A, Eigen::MatrixXd B);
  static LinSystem make(Eigen::MatrixXd A, Eigen::MatrixXd B,
                        Eigen::MatrixXd D);
};

// Planar double integrator, state (px, py, vx, vy), acceleration inputs.
// A = [[I, dt*I],[0, I]], B = [[dt^2/2*I],[dt*I]], D = I4.
LinSystem double_integrator(double dt);

// One exact step of the dynamics.
Eigen::VectorXd step(const LinSystem& sys, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& u, const Eigen::VectorXd& w);

// w = D^-1 (x_next - A x - B u). Requires square invertible D.
Eigen::VectorXd reconstruct_disturbance(const LinSystem& sys,
                                        const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& u,
                                        const Eigen::VectorXd& x_next);

// Closed loop under u = K x + residual. gamma is the contraction margin:
// 1 - ||Atil||_2 when the spectral norm is below one, otherwise the fallback
// 1 - rho(Atil). Construction requires rho(Atil) < 1.
struct StabilizedSystem {
  LinSystem base;
  Eigen::MatrixXd K;
  Eigen::MatrixXd Atil;
  double gamma = 0.0;
  double beta = 0.0;            // max of ||Atil||, ||B||, ||D||, ||K||
  double spectral_norm = 0.0;   // ||Atil||_2
  double spectral_radius = 0.0;
  bool norm_contractive = false;  // spectral_norm <= 1 - gamma holds

  int dx() const { return base.dx(); }
  int du() const { return base.du(); }
  int dw() const { return base.dw(); }
};

// LQR gain via the discrete Riccati recursion iterated to a fixed point
// (tolerance 1e-10, at most 10000 iterations).
StabilizedSystem stabilize(const LinSystem& sys, const Eigen::MatrixXd& Q_lqr,
                           const Eigen::MatrixXd& R_lqr);

// Same stability checks with a user-supplied gain.
StabilizedSystem with_feedback(const LinSystem& sys, const Eigen::MatrixXd& K);

double spectral_norm_of(const Eigen::MatrixXd& m);
double spectral_radius_of(const Eigen::MatrixXd& m);

// Norm bounds used by the truncation analysis and the sentinel distance.
// C_x = 2 beta H D_M C_w / gamma.
struct Bounds {
  double C_w = 0.0;
  double C_u = 0.0;
  double C_x = 0.0;
  double xi = 0.0;
};

Bounds make_bounds(const StabilizedSystem& ss, int H, double D_M, double C_w,
                   double xi);

}  // namespace olc::lindyn

#endif  // OLC_LINDYN_HPP_
