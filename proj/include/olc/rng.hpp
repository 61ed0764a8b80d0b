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

#ifndef OLC_RNG_HPP_
#define OLC_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

#include <Eigen/Dense>

namespace olc {

// Deterministic random stream. All draws go through explicit inverse-CDF /
// Box-Muller transforms so output depends only on (seed, call sequence),
// never on the standard library's distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

  // Independent stream derived from the original seed and a label (FNV-1a).
  Rng stream(std::string_view label) const {
    std::uint64_t h = 1469598103934665603ull;
    for (char c : label) {
      h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
      h *= 1099511628211ull;
    }
    return Rng(seed_ ^ h);
  }

  // Uniform on [0, 1).
  double uniform() {
    return std::ldexp(static_cast<double>(gen_() >> 11), -53);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal(double mean = 0.0, double stddev = 1.0) {
    if (has_spare_) {
      has_spare_ = false;
      return mean + stddev * spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0.0) u1 = std::ldexp(1.0, -53);  // guard log(0)
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return mean + stddev * r * std::cos(theta);
  }

  // Exponential with rate `rate` (mean 1/rate).
  double exponential(double rate) {
    double u = uniform();
    if (u >= 1.0) u = 1.0 - std::ldexp(1.0, -53);
    return -std::log1p(-u) / rate;
  }

  Eigen::VectorXd normal_vector(int n, double mean = 0.0, double stddev = 1.0) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = normal(mean, stddev);
    return v;
  }

  Eigen::MatrixXd normal_matrix(int rows, int cols, double mean = 0.0,
                                double stddev = 1.0) {
    Eigen::MatrixXd m(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) m(i, j) = normal(mean, stddev);
    return m;
  }

  Eigen::MatrixXd exponential_matrix(int rows, int cols, double rate) {
    Eigen::MatrixXd m(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) m(i, j) = exponential(rate);
    return m;
  }

  // Uniform over the Frobenius ball of the given radius.
  Eigen::MatrixXd ball_matrix(int rows, int cols, double radius) {
    const int d = rows * cols;
    Eigen::VectorXd dir = normal_vector(d);
    const double n = dir.norm();
    if (n == 0.0) return Eigen::MatrixXd::Zero(rows, cols);
    const double r = radius * std::pow(uniform(), 1.0 / d);
    dir *= r / n;
    return Eigen::Map<Eigen::MatrixXd>(dir.data(), rows, cols);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace olc

#endif  // OLC_RNG_HPP_
