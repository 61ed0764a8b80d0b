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

#include "olc/dac.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

namespace olc::dac {

namespace {

Eigen::VectorXd one_padded_zero(int dw) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dw + 1);
  v[dw] = 1.0;
  return v;
}

}  // namespace

double DacPolicy::frob_norm() const {
  double s = 0.0;
  for (const auto& g : gains) s += g.squaredNorm();
  return std::sqrt(s);
}

Eigen::MatrixXd DacPolicy::stacked() const {
  const int h = H();
  if (h == 0) return Eigen::MatrixXd();
  Eigen::MatrixXd m(du(), h * dw_pad());
  for (int i = 0; i < h; ++i) m.middleCols(i * dw_pad(), dw_pad()) = gains[i];
  return m;
}

DacPolicy DacPolicy::zero(int du, int dw, int H, double D_M) {
  if (H < 1) throw ContractViolation("policy needs H >= 1");
  DacPolicy p;
  p.radius = D_M;
  p.gains.assign(H, Eigen::MatrixXd::Zero(du, dw + 1));
  return p;
}

DacPolicy DacPolicy::from_stacked(const Eigen::MatrixXd& m, int H,
                                  double D_M) {
  if (H < 1 || m.cols() % H != 0)
    throw ContractViolation("stacked width not divisible by H");
  DacPolicy p;
  p.radius = D_M;
  const int width = static_cast<int>(m.cols()) / H;
  p.gains.reserve(H);
  for (int i = 0; i < H; ++i)
    p.gains.push_back(m.middleCols(i * width, width));
  if (p.frob_norm() > D_M * (1.0 + 1e-9))
    throw ContractViolation("policy outside its Frobenius ball");
  return p;
}

DacPolicy DacPolicy::projected() const {
  const double n = frob_norm();
  if (n <= radius || n == 0.0) return *this;
  DacPolicy p = *this;
  const double s = radius / n;
  for (auto& g : p.gains) g *= s;
  return p;
}

DisturbanceHistory::DisturbanceHistory(int dw, int capacity)
    : dw_(dw), capacity_(capacity) {
  if (dw < 0 || capacity < 1)
    throw ContractViolation("bad history dimensions");
  ring_.resize(capacity_);
}

void DisturbanceHistory::push(const Eigen::VectorXd& w) {
  if (w.size() != dw_) throw ContractViolation("disturbance dim mismatch");
  Eigen::VectorXd padded(dw_ + 1);
  padded.head(dw_) = w;
  padded[dw_] = 1.0;
  ring_[time_ % capacity_] = std::move(padded);
  ++time_;
}

Eigen::VectorXd DisturbanceHistory::at_time(int s) const {
  if (s >= time_) throw ContractViolation("disturbance not yet observed");
  if (s < 0) return one_padded_zero(dw_);
  if (s < time_ - capacity_)
    throw ContractViolation("disturbance evicted from history ring");
  return ring_[s % capacity_];
}

Eigen::VectorXd DisturbanceHistory::input_stack(int t, int H) const {
  Eigen::VectorXd stack(H * (dw_ + 1));
  for (int i = 1; i <= H; ++i)
    stack.segment((i - 1) * (dw_ + 1), dw_ + 1) = at_time(t - i);
  return stack;
}

Eigen::VectorXd control(const DacPolicy& policy,
                        const lindyn::StabilizedSystem& ss,
                        const Eigen::VectorXd& x,
                        const DisturbanceHistory& hist) {
  if (x.size() != ss.dx()) throw ContractViolation("control: state dim");
  if (policy.du() != ss.du() || policy.dw_pad() != ss.dw() + 1)
    throw ContractViolation("control: policy dims do not match system");
  Eigen::VectorXd u = ss.K * x;
  const int t = hist.time();
  for (int i = 1; i <= policy.H(); ++i)
    u += policy.gains[i - 1] * hist.at_time(t - i);
  return u;
}

namespace {

std::vector<Eigen::MatrixXd> atil_powers(const lindyn::StabilizedSystem& ss,
                                         int up_to) {
  std::vector<Eigen::MatrixXd> pw;
  pw.reserve(up_to + 1);
  pw.push_back(Eigen::MatrixXd::Identity(ss.dx(), ss.dx()));
  for (int i = 1; i <= up_to; ++i) pw.push_back(pw.back() * ss.Atil);
  return pw;
}

Eigen::MatrixXd psi_from_powers(const lindyn::StabilizedSystem& ss,
                                std::span<const DacPolicy> window, int i,
                                const std::vector<Eigen::MatrixXd>& pw) {
  const int H = static_cast<int>(window.size()) - 1;
  const int cols = ss.dw() + 1;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(ss.dx(), cols);
  if (i <= H) out.leftCols(ss.dw()) = pw[i] * ss.base.D;
  for (int j = 0; j <= H; ++j) {
    const int lag = i - j;
    if (lag >= 1 && lag <= H)
      out += pw[j] * ss.base.B * window[j].gains[lag - 1];
  }
  return out;
}

void check_window(const lindyn::StabilizedSystem& ss,
                  std::span<const DacPolicy> window) {
  if (window.empty()) throw ContractViolation("empty policy window");
  const int H = static_cast<int>(window.size()) - 1;
  for (const auto& p : window) {
    if (p.H() != H || p.du() != ss.du() || p.dw_pad() != ss.dw() + 1)
      throw ContractViolation("policy window dims inconsistent");
  }
}

}  // namespace

Eigen::MatrixXd psi(const lindyn::StabilizedSystem& ss,
                    std::span<const DacPolicy> window, int i) {
  check_window(ss, window);
  const int H = static_cast<int>(window.size()) - 1;
  if (i < 0 || i > 2 * H) throw ContractViolation("psi: lag out of range");
  return psi_from_powers(ss, window, i, atil_powers(ss, H));
}

Eigen::VectorXd counterfactual_state(const lindyn::StabilizedSystem& ss,
                                     std::span<const DacPolicy> window,
                                     const DisturbanceHistory& hist) {
  check_window(ss, window);
  const int H = static_cast<int>(window.size()) - 1;
  const int t = hist.time() - 1;
  if (t < 0) throw ContractViolation("counterfactual needs one disturbance");
  const auto pw = atil_powers(ss, H);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(ss.dx());
  for (int i = 0; i <= 2 * H; ++i)
    y += psi_from_powers(ss, window, i, pw) * hist.at_time(t - i);
  return y;
}

std::vector<DacPolicy> fixed_window(const DacPolicy& policy, int t) {
  std::vector<DacPolicy> window;
  const int H = policy.H();
  window.reserve(H + 1);
  for (int j = 0; j <= H; ++j) {
    if (t - j >= 0)
      window.push_back(policy);
    else
      window.push_back(DacPolicy::zero(policy.du(), policy.dw_pad() - 1, H,
                                       policy.radius));
  }
  return window;
}

std::vector<RolloutPoint> counterfactual_rollout(
    const lindyn::StabilizedSystem& ss, const DacPolicy& policy,
    std::span<const Eigen::VectorXd> w_log, const Eigen::VectorXd& x0) {
  if (x0.size() != ss.dx()) throw ContractViolation("rollout: state dim");
  DisturbanceHistory hist(ss.dw(), 2 * policy.H() + 2);
  std::vector<RolloutPoint> out;
  out.reserve(w_log.size());
  Eigen::VectorXd x = x0;
  for (const auto& w : w_log) {
    Eigen::VectorXd u_res = Eigen::VectorXd::Zero(ss.du());
    const int t = hist.time();
    for (int i = 1; i <= policy.H(); ++i)
      u_res += policy.gains[i - 1] * hist.at_time(t - i);
    x = ss.Atil * x + ss.base.B * u_res + ss.base.D * w;
    hist.push(w);
    out.push_back({x, u_res});
  }
  return out;
}

void write_policy(std::ostream& os, const DacPolicy& policy) {
  os << "dac_policy v1\n";
  os << "H " << policy.H() << "\n";
  os << "du " << policy.du() << "\n";
  os << "dw_pad " << policy.dw_pad() << "\n";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", policy.radius);
  os << "radius " << buf << "\n";
  for (int i = 0; i < policy.H(); ++i) {
    os << "M " << (i + 1) << "\n";
    const auto& g = policy.gains[i];
    for (int r = 0; r < g.rows(); ++r) {
      for (int c = 0; c < g.cols(); ++c) {
        std::snprintf(buf, sizeof buf, "%.17g", g(r, c));
        os << buf << (c + 1 == g.cols() ? "" : " ");
      }
      os << "\n";
    }
  }
}

DacPolicy read_policy(std::istream& is) {
  std::string tag, version;
  is >> tag >> version;
  if (tag != "dac_policy" || version != "v1")
    throw ContractViolation("not a dac_policy v1 stream");
  std::string key;
  int H = 0, du = 0, dw_pad = 0;
  double radius = 0.0;
  for (int field = 0; field < 4; ++field) {
    is >> key;
    if (key == "H")
      is >> H;
    else if (key == "du")
      is >> du;
    else if (key == "dw_pad")
      is >> dw_pad;
    else if (key == "radius")
      is >> radius;
    else
      throw ContractViolation("unexpected policy field: " + key);
  }
  if (H < 1 || du < 1 || dw_pad < 1)
    throw ContractViolation("bad policy header");
  DacPolicy p;
  p.radius = radius;
  p.gains.assign(H, Eigen::MatrixXd::Zero(du, dw_pad));
  for (int i = 0; i < H; ++i) {
    int idx = 0;
    is >> key >> idx;
    if (key != "M" || idx != i + 1)
      throw ContractViolation("bad policy block header");
    for (int r = 0; r < du; ++r)
      for (int c = 0; c < dw_pad; ++c) is >> p.gains[i](r, c);
  }
  if (!is) throw ContractViolation("truncated policy stream");
  return p;
}

}  // namespace olc::dac
