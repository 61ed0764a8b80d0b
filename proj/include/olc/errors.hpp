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

#ifndef OLC_ERRORS_HPP_
#define OLC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace olc {

// Caller broke a precondition (dimension mismatch, invalid simplex, ...).
struct ContractViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Disturbance cannot be recovered from observed states (singular D).
struct ReconstructionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Riccati recursion did not converge, or the closed loop is unstable.
struct StabilizationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Iterative solver ran out of iterations; carries the last residual.
struct SolverFailure : std::runtime_error {
  SolverFailure(const std::string& what, double residual_in)
      : std::runtime_error(what), residual(residual_in) {}
  double residual;
};

// Malformed config file or inconsistent run options.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace olc

#endif  // OLC_ERRORS_HPP_
