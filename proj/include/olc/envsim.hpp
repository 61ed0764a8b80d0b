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

#ifndef OLC_ENVSIM_HPP_
#define OLC_ENVSIM_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "olc/lindyn.hpp"
#include "olc/rng.hpp"

namespace olc::sim {

// Course coordinates: x = lateral offset from the nominal line, y = station
// (distance along the course). The nominal plan runs straight down the
// course at station_speed per step, through whatever is in the way.
struct Obstacle {
  Eigen::Vector2d center;  // (lateral, station)
  double radius = 0.0;
};

struct Environment {
  std::vector<Obstacle> obstacles;
  double sensor_radius = 620.0;
  double robot_radius = 5.0;
  double goal_band = 120.0;
  double station_speed = 30.0;
  // An obstacle is anchored to the racer's ballistic frame once the nominal
  // station gets within this range of it (see CourseTracker).
  double activation_range = 620.0;
};

// n obstacles dead on the nominal line at uniform spacing. The lead-in
// stretch (in units of spacing) delays the first obstacle so the learner
// sheds its random warm-up gains before the first encounter.
Environment make_centerline(int n_obstacles, double spacing = 600.0,
                            double obstacle_radius = 115.0,
                            double lead_in_spacings = 6.0);

// Alternating gates: walls of tangent circles with a gap of gate_width,
// laterally offset by +/-offset per gate.
Environment make_slalom(double offset, double gate_width, int n_gates,
                        double wall_radius = 60.0, int wall_circles = 5,
                        double spacing = 600.0, double lead_in_spacings = 6.0);

// Uniformly scattered field (seeded layout).
Environment make_random_field(int n_obstacles, double lat_span, double length,
                              double obstacle_radius, std::uint64_t seed);

// Straight corridor whose center line sits `offset` off the nominal path.
Environment make_corridor(double offset, int n_segments, double half_width,
                          double wall_radius = 60.0, double spacing = 300.0);

// One `cx cy r` triple per line; blank lines and '#' comments skipped.
std::vector<Obstacle> load_obstacles(std::istream& is);

// Centers within the closed sensing ball around `position`, returned
// relative to `path_point`, sorted by (distance, angle).
std::vector<Eigen::Vector2d> sense(
    const Environment& env, const Eigen::Vector2d& position,
    const Eigen::Vector2d& path_point = Eigen::Vector2d::Zero());

struct CollisionSummary {
  int count = 0;  // contiguous contact runs, per obstacle
  std::optional<int> first_index;
  int distinct_obstacles = 0;
};

// A step collides when distance(position, center) < radius + robot_radius;
// contiguous colliding steps against the same obstacle count once.
CollisionSummary collision_check(std::span<const Eigen::Vector2d> trajectory,
                                 const Environment& env);

// Disturbance regimes.
struct GaussianProfile {
  double mean = 0.0;
  double stddev = 0.5;
};
struct DirectionalProfile {
  double mean = 0.5;
  double stddev = 0.5;
};
struct SinusoidProfile {
  // Lateral-velocity wave, sized so its within-window carry (~110 units by
  // each crossing) stays just inside the obstacle radius: the uncontrolled
  // racer still hits dead-center while the learner finds passing with the
  // carry strictly cheaper than fighting it, locking one side.
  double amplitude = 1.7;
  double period = 20.0;
  double phase = 0.0;
  int axis = 2;
};
struct AdversarialProfile {
  double magnitude = 1.5;  // C_w; aimed at the nearest sensed obstacle
};
struct NoDisturbance {};

using DisturbanceProfile =
    std::variant<NoDisturbance, GaussianProfile, DirectionalProfile,
                 SinusoidProfile, AdversarialProfile>;

Eigen::VectorXd gen_disturbance(const DisturbanceProfile& profile, int t,
                                int dw, const Eigen::Vector2d& racer_pos,
                                std::span<const Eigen::Vector2d> sensed,
                                Rng& rng);

// Norm-bound estimate C_w for the bounds bookkeeping.
double disturbance_bound(const DisturbanceProfile& profile, int dw);

// Ego-anchored course referencing. When an obstacle activates, it is pinned
// to the racer's ballistic continuation (free propagation of the racer's
// state at that step); from then on it approaches at nominal speed. The
// perturbation dynamics themselves never reset - only obstacle referencing
// is ego-relative, which is how the sensing hardware reports obstacles
// anyway.
class CourseTracker {
 public:
  CourseTracker(Environment env, Eigen::MatrixXd A_free);

  // Advance to step t (consecutive calls, starting at 0) with the racer's
  // perturbation state x = (pos; vel). Updates anchors, collision and
  // pass-side bookkeeping, and returns sensed obstacle positions in
  // perturbation coordinates.
  std::vector<Eigen::Vector2d> advance(int t, const Eigen::VectorXd& x);

  const Environment& env() const { return env_; }
  int obstacles_passed() const;
  int distinct_hits() const;
  int collision_count() const { return collision_count_; }
  std::optional<int> first_collision_step() const { return first_collision_; }
  int pass_left() const { return pass_left_; }
  int pass_right() const { return pass_right_; }

 private:
  struct Tracked {
    Eigen::VectorXd ref;  // ballistic anchor state, advanced by A_free
    bool active = false;
    bool finished = false;
    bool hit = false;
    bool in_contact = false;
    bool passed = false;
  };

  Eigen::Vector2d obstacle_position(int j, int t) const;

  Environment env_;
  Eigen::MatrixXd A_free_;
  std::vector<Tracked> tracked_;
  int last_step_ = -1;
  int collision_count_ = 0;
  std::optional<int> first_collision_;
  int pass_left_ = 0;
  int pass_right_ = 0;
};

}  // namespace olc::sim

#endif  // OLC_ENVSIM_HPP_
