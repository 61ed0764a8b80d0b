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

#include "olc/trs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace olc::trs {

namespace {

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

// Deterministic sign: flip so the first coordinate above threshold is
// positive. Only valid when +/-v are interchangeable.
Eigen::VectorXd sign_normalized(Eigen::VectorXd v, double threshold) {
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > threshold) {
      if (v[i] < 0.0) v = -v;
      break;
    }
  }
  return v;
}

bool first_nonzero_positive(const Eigen::VectorXd& v, double threshold) {
  for (int i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > threshold) return v[i] > 0.0;
  return true;
}

}  // namespace

TrustRegionInstance::TrustRegionInstance(Eigen::MatrixXd P_in,
                                         Eigen::VectorXd p_in,
                                         double radius_in)
    : P(std::move(P_in)), p(std::move(p_in)), radius(radius_in) {
  if (P.rows() != P.cols() || P.rows() != p.size())
    throw ContractViolation("trust region instance: shape mismatch");
  if (!(radius > 0.0)) throw ContractViolation("radius must be positive");
  if (!all_finite(P) || !all_finite(p))
    throw ContractViolation("trust region instance: non-finite entries");
  P = 0.5 * (P + P.transpose().eval());
}

PreparedTrs::PreparedTrs(const Eigen::MatrixXd& P, double radius)
    : radius_(radius) {
  if (!(radius > 0.0)) throw ContractViolation("radius must be positive");
  if (!all_finite(P)) throw ContractViolation("non-finite P");
  Eigen::MatrixXd sym = 0.5 * (P + P.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success)
    throw SolverFailure("eigendecomposition failed", 0.0);
  // Eigen returns ascending order; store descending.
  const int d = static_cast<int>(P.rows());
  eigvals_.resize(d);
  eigvecs_.resize(d, d);
  for (int i = 0; i < d; ++i) {
    eigvals_[i] = es.eigenvalues()[d - 1 - i];
    eigvecs_.col(i) = es.eigenvectors().col(d - 1 - i);
  }
}

TrsSolution PreparedTrs::solve(const Eigen::VectorXd& p, double tol) const {
  if (p.size() != eigvals_.size())
    throw ContractViolation("trs solve: p dimension mismatch");
  if (!p.allFinite()) throw ContractViolation("trs solve: non-finite p");
  if (!(tol > 0.0) || tol > 1e-3)
    throw ContractViolation("trs solve: tol must be in (0, 1e-3]");

  const int d = static_cast<int>(p.size());
  const double D = radius_;
  const double lambda_max = eigvals_[0];
  const Eigen::VectorXd q = eigvecs_.transpose() * p;
  const double norm_p = p.norm();
  const double scale = std::max(1.0, std::abs(lambda_max));
  const double z_thresh = 1e-11 * std::max(1.0, D);

  const auto value_at = [&](const Eigen::VectorXd& z) {
    const Eigen::VectorXd w = eigvecs_.transpose() * z;
    return w.dot(eigvals_.cwiseProduct(w)) + p.dot(z);
  };
  const auto assemble = [&](const Eigen::VectorXd& w, double mu,
                            bool boundary) {
    TrsSolution sol;
    sol.z = eigvecs_ * w;
    if (boundary) {
      // Squash rounding drift exactly onto the sphere.
      const double n = sol.z.norm();
      if (n > 0.0) sol.z *= D / n;
    }
    sol.value = value_at(sol.z);
    sol.on_boundary = boundary;
    sol.multiplier = mu;
    return sol;
  };

  // Linear term absent: the answer is the top eigendirection or the origin.
  // A numerically-zero top eigenvalue counts as zero: the boundary point
  // would gain at most D^2 * eps over the much better conditioned origin.
  if (norm_p <= 1e-14 * scale * std::max(1.0, D)) {
    if (lambda_max <= 1e-12 * scale) {
      TrsSolution sol;
      sol.z = Eigen::VectorXd::Zero(d);
      sol.value = 0.0;
      sol.on_boundary = false;
      sol.multiplier = 0.0;
      return sol;
    }
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
    w[0] = D;
    TrsSolution sol = assemble(w, lambda_max, true);
    sol.z = sign_normalized(sol.z, z_thresh);
    return sol;
  }

  const auto w_of_mu = [&](double mu) {
    Eigen::VectorXd w(d);
    for (int i = 0; i < d; ++i) w[i] = q[i] / (2.0 * (mu - eigvals_[i]));
    return w;
  };
  const auto norm2_of_mu = [&](double mu) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
      const double wi = q[i] / (2.0 * (mu - eigvals_[i]));
      s += wi * wi;
    }
    return s;
  };

  // Interior case: strictly concave objective with the stationary point
  // inside the ball.
  if (lambda_max < 0.0) {
    const Eigen::VectorXd w0 = w_of_mu(0.0);
    if (w0.norm() < D * (1.0 - 1e-12)) return assemble(w0, 0.0, false);
  }

  // Hard case: no linear excitation along the top eigenspace and the rest of
  // the stationary point already fits inside the ball at mu = lambda_max.
  if (lambda_max >= 0.0) {
    const double eig_tol = 1e-12 * scale;
    double q_top_sq = 0.0;
    double n2_rest = 0.0;
    for (int i = 0; i < d; ++i) {
      if (eigvals_[i] >= lambda_max - eig_tol) {
        q_top_sq += q[i] * q[i];
      } else {
        const double wi = q[i] / (2.0 * (lambda_max - eigvals_[i]));
        n2_rest += wi * wi;
      }
    }
    // Threshold sits well under the 1e-8 KKT tolerance: a dropped top
    // component of this size perturbs the stationarity residual by less.
    if (std::sqrt(q_top_sq) <= 1e-9 * (1.0 + norm_p) && n2_rest < D * D) {
      Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
      for (int i = 0; i < d; ++i)
        if (eigvals_[i] < lambda_max - eig_tol)
          w[i] = q[i] / (2.0 * (lambda_max - eigvals_[i]));
      const double alpha = std::sqrt(std::max(0.0, D * D - n2_rest));
      const Eigen::VectorXd v_top = sign_normalized(eigvecs_.col(0), z_thresh);
      const Eigen::VectorXd base = eigvecs_ * w;
      const Eigen::VectorXd plus = base + alpha * v_top;
      const Eigen::VectorXd minus = base - alpha * v_top;
      const Eigen::VectorXd chosen =
          first_nonzero_positive(plus, z_thresh) ? plus : minus;
      TrsSolution sol;
      sol.z = chosen;
      const double n = sol.z.norm();
      if (n > 0.0) sol.z *= D / n;
      sol.value = value_at(sol.z);
      sol.on_boundary = true;
      sol.multiplier = lambda_max;
      return sol;
    }
  }

  // Boundary case: solve ||z(mu)|| = D for mu > max(lambda_max, 0) via
  // Newton on 1/||z(mu)|| - 1/D with a bisection safeguard.
  double lo = std::max(lambda_max, 0.0);
  double hi = lambda_max + 0.5 * norm_p / D + 1e-3 * scale;
  if (norm2_of_mu(lo) < D * D) {
    // Root sits at (or numerically below) the left end; z(lo) is already
    // essentially on the sphere.
    return assemble(w_of_mu(lo), lo, true);
  }
  double mu = hi;
  double residual = std::numeric_limits<double>::infinity();
  const double boundary_tol = 1e-13;
  for (int it = 0; it < 200; ++it) {
    const double n2 = norm2_of_mu(mu);
    const double n = std::sqrt(n2);
    residual = std::abs(n - D);
    if (residual <= boundary_tol * std::max(1.0, D))
      return assemble(w_of_mu(mu), mu, true);
    if (n > D)
      lo = mu;
    else
      hi = mu;
    // Near-hard instances push the root so close to lambda_max that n(mu)
    // cannot be resolved further in floating point; once the bracket has
    // collapsed, the rescale in assemble() absorbs the leftover.
    if (hi - lo <= 1e-15 * std::max(1.0, std::abs(lo)))
      return assemble(w_of_mu(hi), hi, true);
    // psi(mu) = 1/n - 1/D, psi'(mu) = n^{-3} sum w_i^2/(mu - lambda_i).
    double dsum = 0.0;
    for (int i = 0; i < d; ++i) {
      const double wi = q[i] / (2.0 * (mu - eigvals_[i]));
      dsum += wi * wi / (mu - eigvals_[i]);
    }
    const double psi = 1.0 / n - 1.0 / D;
    const double dpsi = dsum / (n2 * n);
    double next = mu - psi / dpsi;
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    mu = next;
  }
  throw SolverFailure("trust region secular equation did not converge",
                      residual);
}

TrsSolution solve(const TrustRegionInstance& inst, double tol) {
  PreparedTrs prepared(inst.P, inst.radius);
  return prepared.solve(inst.p, tol);
}

Eigen::VectorXd vec(const Eigen::MatrixXd& M) {
  return Eigen::Map<const Eigen::VectorXd>(M.data(), M.size());
}

Eigen::MatrixXd unvec(const Eigen::VectorXd& m, int du) {
  if (du <= 0 || m.size() % du != 0)
    throw ContractViolation("unvec: size not divisible by du");
  return Eigen::Map<const Eigen::MatrixXd>(m.data(), du, m.size() / du);
}

ObjectiveAccumulator::ObjectiveAccumulator(const Eigen::MatrixXd& B,
                                           const Eigen::MatrixXd& Q,
                                           const Eigen::MatrixXd& R, int H)
    : B_(B), Q_(Q), R_(R) {
  if (H < 1) throw ContractViolation("H must be >= 1");
  if (Q.rows() != B.rows() || Q.cols() != B.rows())
    throw ContractViolation("Q must be dx x dx");
  if (R.rows() != B.cols() || R.cols() != B.cols())
    throw ContractViolation("R must be du x du");
  const Eigen::MatrixXd BtQB = B.transpose() * Q * B;
  g_full_ = B.transpose() * B - BtQB - R;
  g_sentinel_ = -BtQB - R;
  H_ = H;
}

void ObjectiveAccumulator::add(const game::RewardRecord& record) {
  const int du = static_cast<int>(B_.cols());
  const int n = static_cast<int>(record.b.size());
  if (n % H_ != 0)
    throw ContractViolation("record b length not divisible by H");
  if (record.b0.size() != B_.rows())
    throw ContractViolation("record b0 dim != dx");
  if (dim_ == 0) {
    dim_ = du * n;
    P_ = Eigen::MatrixXd::Zero(dim_, dim_);
    p_const_ = Eigen::VectorXd::Zero(dim_);
  } else if (dim_ != du * n) {
    throw ContractViolation("record stack width inconsistent");
  }

  const Eigen::MatrixXd& G = record.sentinel ? g_sentinel_ : g_full_;
  for (int j1 = 0; j1 < n; ++j1) {
    const double bj1 = record.b[j1];
    if (bj1 == 0.0) continue;
    for (int j2 = 0; j2 < n; ++j2) {
      const double w = bj1 * record.b[j2];
      if (w != 0.0) P_.block(j1 * du, j2 * du, du, du) += w * G;
    }
  }

  const Eigen::VectorXd f_const = -2.0 * B_.transpose() * (Q_ * record.b0);
  for (int j = 0; j < n; ++j)
    p_const_.segment(j * du, du) += record.b[j] * f_const;

  const_const_ -= record.b0.dot(Q_ * record.b0);
  if (record.sentinel) const_const_ += record.far_dist * record.far_dist;

  RecordAux aux;
  aux.record = record;
  if (!record.sentinel) {
    aux.a_sq.resize(record.k());
    aux.v.reserve(record.k());
    for (int jo = 0; jo < record.k(); ++jo) {
      const Eigen::VectorXd f = 2.0 * B_.transpose() * record.a[jo];
      Eigen::VectorXd v(dim_);
      for (int j = 0; j < n; ++j) v.segment(j * du, du) = record.b[j] * f;
      aux.v.push_back(std::move(v));
      aux.a_sq[jo] = record.a[jo].squaredNorm();
    }
  }
  aux_.push_back(std::move(aux));
}

namespace {

void check_simplex(const Eigen::VectorXd& c, int k) {
  if (c.size() != k) throw ContractViolation("weight vector size != k");
  double sum = 0.0;
  for (int j = 0; j < k; ++j) {
    if (c[j] < -1e-12) throw ContractViolation("negative simplex weight");
    sum += c[j];
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw ContractViolation("simplex weights do not sum to one");
}

}  // namespace

Eigen::VectorXd ObjectiveAccumulator::linear(
    std::span<const Eigen::VectorXd> weights, double lambda,
    const Eigen::MatrixXd& P0) const {
  if (static_cast<int>(weights.size()) != records())
    throw ContractViolation("one weight vector per record required");
  Eigen::VectorXd p = p_const_;
  for (int idx = 0; idx < records(); ++idx) {
    const RecordAux& aux = aux_[idx];
    check_simplex(weights[idx], aux.record.k());
    if (aux.record.sentinel) continue;
    for (int jo = 0; jo < aux.record.k(); ++jo)
      p += weights[idx][jo] * aux.v[jo];
  }
  if (lambda != 0.0) {
    if (P0.rows() * P0.cols() != dim_)
      throw ContractViolation("P0 shape does not match decision dimension");
    p += lambda * vec(P0);
  }
  return p;
}

double ObjectiveAccumulator::constant(
    std::span<const Eigen::VectorXd> weights) const {
  if (static_cast<int>(weights.size()) != records())
    throw ContractViolation("one weight vector per record required");
  double c = const_const_;
  for (int idx = 0; idx < records(); ++idx) {
    const RecordAux& aux = aux_[idx];
    check_simplex(weights[idx], aux.record.k());
    if (aux.record.sentinel) continue;
    for (int jo = 0; jo < aux.record.k(); ++jo)
      c += weights[idx][jo] * aux.a_sq[jo];
  }
  return c;
}

Eigen::VectorXd ObjectiveAccumulator::losses(int record_idx,
                                             const Eigen::MatrixXd& M) const {
  const RecordAux& aux = aux_[record_idx];
  if (aux.record.sentinel)
    return Eigen::VectorXd::Constant(1,
                                     aux.record.far_dist * aux.record.far_dist);
  const Eigen::VectorXd bu = B_ * (M * aux.record.b);
  Eigen::VectorXd out(aux.record.k());
  for (int jo = 0; jo < aux.record.k(); ++jo)
    out[jo] = (aux.record.a[jo] + bu).squaredNorm();
  return out;
}

std::pair<TrustRegionInstance, double> build_instance(
    const lindyn::StabilizedSystem& ss,
    std::span<const game::RewardRecord> records,
    std::span<const Eigen::VectorXd> weights, const Eigen::MatrixXd& Q,
    const Eigen::MatrixXd& R, double lambda, const Eigen::MatrixXd& P0,
    double D_M) {
  if (records.empty()) throw ContractViolation("no records");
  int H = 1;
  // Stack width is H*(dw+1); recover H from the system's disturbance size.
  const int pad = ss.dw() + 1;
  if (records[0].b.size() % pad == 0)
    H = static_cast<int>(records[0].b.size()) / pad;
  ObjectiveAccumulator acc(ss.base.B, Q, R, H);
  for (const auto& r : records) acc.add(r);
  Eigen::VectorXd p = acc.linear(weights, lambda, P0);
  return {TrustRegionInstance(acc.P(), std::move(p), D_M),
          acc.constant(weights)};
}

void write_instance(std::ostream& os, const TrustRegionInstance& inst,
                    double constant) {
  char buf[32];
  os << "trs_instance v1\n";
  os << "dim " << inst.dim() << "\n";
  std::snprintf(buf, sizeof buf, "%.17g", inst.radius);
  os << "radius " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.17g", constant);
  os << "const " << buf << "\n";
  os << "P\n";
  for (int r = 0; r < inst.P.rows(); ++r) {
    for (int c = 0; c < inst.P.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", inst.P(r, c));
      os << buf << (c + 1 == inst.P.cols() ? "" : " ");
    }
    os << "\n";
  }
  os << "p\n";
  for (int i = 0; i < inst.p.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", inst.p[i]);
    os << buf << (i + 1 == inst.p.size() ? "" : " ");
  }
  os << "\n";
}

}  // namespace olc::trs
