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

#include "olc/envsim.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>
#include <string>

namespace olc::sim {

Environment make_centerline(int n_obstacles, double spacing,
                            double obstacle_radius, double lead_in_spacings) {
  if (n_obstacles < 1) throw ContractViolation("need >= 1 obstacle");
  if (spacing <= 0.0 || obstacle_radius <= 0.0 || lead_in_spacings < 0.0)
    throw ContractViolation("spacing, radius, lead-in must be nonnegative");
  Environment env;
  env.activation_range = spacing + env.station_speed / 2.0;
  env.obstacles.reserve(n_obstacles);
  const double lead_in = lead_in_spacings * spacing;
  for (int i = 1; i <= n_obstacles; ++i)
    env.obstacles.push_back({{0.0, lead_in + i * spacing}, obstacle_radius});
  return env;
}

Environment make_slalom(double offset, double gate_width, int n_gates,
                        double wall_radius, int wall_circles, double spacing,
                        double lead_in_spacings) {
  if (gate_width <= 0.0) throw ContractViolation("gate_width must be > 0");
  if (n_gates < 1 || wall_circles < 1)
    throw ContractViolation("need >= 1 gate and wall circle");
  Environment env;
  env.activation_range = spacing + env.station_speed / 2.0;
  const double lead_in = lead_in_spacings * spacing;
  for (int g = 1; g <= n_gates; ++g) {
    const double station = lead_in + g * spacing;
    const double gate_center = (g % 2 == 1 ? offset : -offset);
    for (int side : {-1, +1}) {
      for (int k = 0; k < wall_circles; ++k) {
        // Innermost circle surface sits exactly gate_width/2 from center;
        // further circles are tangent to their neighbor.
        const double lat = gate_center +
                           side * (gate_width / 2.0 + wall_radius +
                                   2.0 * wall_radius * k);
        env.obstacles.push_back({{lat, station}, wall_radius});
      }
    }
  }
  return env;
}

Environment make_random_field(int n_obstacles, double lat_span, double length,
                              double obstacle_radius, std::uint64_t seed) {
  if (n_obstacles < 1) throw ContractViolation("need >= 1 obstacle");
  Environment env;
  Rng rng = Rng(seed).stream("random_field");
  env.obstacles.reserve(n_obstacles);
  for (int i = 0; i < n_obstacles; ++i) {
    const double lat = rng.uniform(-lat_span, lat_span);
    const double station = rng.uniform(env.station_speed * 10.0, length);
    env.obstacles.push_back({{lat, station}, obstacle_radius});
  }
  std::sort(env.obstacles.begin(), env.obstacles.end(),
            [](const Obstacle& a, const Obstacle& b) {
              return a.center.y() < b.center.y();
            });
  return env;
}

Environment make_corridor(double offset, int n_segments, double half_width,
                          double wall_radius, double spacing) {
  if (n_segments < 1) throw ContractViolation("need >= 1 segment");
  Environment env;
  env.activation_range = spacing + env.station_speed / 2.0;
  for (int i = 1; i <= n_segments; ++i) {
    const double station = i * spacing;
    for (int side : {-1, +1}) {
      const double lat = offset + side * (half_width + wall_radius);
      env.obstacles.push_back({{lat, station}, wall_radius});
    }
  }
  return env;
}

std::vector<Obstacle> load_obstacles(std::istream& is) {
  std::vector<Obstacle> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double cx, cy, r;
    if (!(ss >> cx)) continue;  // blank
    if (!(ss >> cy >> r) || r <= 0.0)
      throw ContractViolation("bad obstacle line " + std::to_string(lineno));
    out.push_back({{cx, cy}, r});
  }
  return out;
}

namespace {

void sort_by_distance_then_angle(std::vector<Eigen::Vector2d>& rel,
                                 const Eigen::Vector2d& position,
                                 const Eigen::Vector2d& path_point) {
  std::sort(rel.begin(), rel.end(),
            [&](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
              const double da = (a + path_point - position).norm();
              const double db = (b + path_point - position).norm();
              if (da != db) return da < db;
              const double aa = std::atan2(a.y(), a.x());
              const double ab = std::atan2(b.y(), b.x());
              return aa < ab;
            });
}

}  // namespace

std::vector<Eigen::Vector2d> sense(const Environment& env,
                                   const Eigen::Vector2d& position,
                                   const Eigen::Vector2d& path_point) {
  std::vector<Eigen::Vector2d> rel;
  for (const auto& o : env.obstacles) {
    if ((o.center - position).norm() <= env.sensor_radius)
      rel.push_back(o.center - path_point);
  }
  sort_by_distance_then_angle(rel, position, path_point);
  return rel;
}

CollisionSummary collision_check(std::span<const Eigen::Vector2d> trajectory,
                                 const Environment& env) {
  CollisionSummary out;
  std::vector<bool> in_contact(env.obstacles.size(), false);
  std::vector<bool> ever_hit(env.obstacles.size(), false);
  for (int t = 0; t < static_cast<int>(trajectory.size()); ++t) {
    for (std::size_t j = 0; j < env.obstacles.size(); ++j) {
      const Obstacle& o = env.obstacles[j];
      const bool hit = (trajectory[t] - o.center).norm() <
                       o.radius + env.robot_radius;
      if (hit && !in_contact[j]) {
        ++out.count;
        if (!out.first_index) out.first_index = t;
      }
      if (hit) ever_hit[j] = true;
      in_contact[j] = hit;
    }
  }
  out.distinct_obstacles =
      static_cast<int>(std::count(ever_hit.begin(), ever_hit.end(), true));
  return out;
}

Eigen::VectorXd gen_disturbance(const DisturbanceProfile& profile, int t,
                                int dw, const Eigen::Vector2d& racer_pos,
                                std::span<const Eigen::Vector2d> sensed,
                                Rng& rng) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(dw);
  if (std::holds_alternative<NoDisturbance>(profile)) return w;
  if (const auto* g = std::get_if<GaussianProfile>(&profile)) {
    for (int i = 0; i < dw; ++i) w[i] = rng.normal(g->mean, g->stddev);
    return w;
  }
  if (const auto* d = std::get_if<DirectionalProfile>(&profile)) {
    for (int i = 0; i < dw; ++i) w[i] = rng.normal(d->mean, d->stddev);
    return w;
  }
  if (const auto* s = std::get_if<SinusoidProfile>(&profile)) {
    if (s->axis < 0 || s->axis >= dw)
      throw ContractViolation("sinusoid axis out of range");
    w[s->axis] =
        s->amplitude * std::sin(2.0 * M_PI * t / s->period + s->phase);
    return w;
  }
  const auto& adv = std::get<AdversarialProfile>(profile);
  Eigen::Vector2d dir;
  if (!sensed.empty()) {
    // sensed is sorted by distance; aim at the nearest.
    dir = sensed[0] - racer_pos;
  } else {
    dir = -racer_pos;  // push back toward the nominal path
  }
  const double n = dir.norm();
  if (n < 1e-12 || dw < 2) return w;
  dir *= adv.magnitude / n;
  if (dw >= 4) {
    // Velocity-channel shove: the pull integrates into position, so every
    // unit of magnitude costs the controller far more to counter.
    w[2] = dir.x();
    w[3] = dir.y();
  } else {
    w[0] = dir.x();
    w[1] = dir.y();
  }
  return w;
}

double disturbance_bound(const DisturbanceProfile& profile, int dw) {
  if (const auto* g = std::get_if<GaussianProfile>(&profile))
    return (std::abs(g->mean) + 3.0 * g->stddev) * std::sqrt(double(dw));
  if (const auto* d = std::get_if<DirectionalProfile>(&profile))
    return (std::abs(d->mean) + 3.0 * d->stddev) * std::sqrt(double(dw));
  if (const auto* s = std::get_if<SinusoidProfile>(&profile))
    return std::max(s->amplitude, 1e-6);
  if (const auto* a = std::get_if<AdversarialProfile>(&profile))
    return std::max(a->magnitude, 1e-6);
  return 1.0;
}

CourseTracker::CourseTracker(Environment env, Eigen::MatrixXd A_free)
    : env_(std::move(env)), A_free_(std::move(A_free)) {
  tracked_.resize(env_.obstacles.size());
}

Eigen::Vector2d CourseTracker::obstacle_position(int j, int t) const {
  const Obstacle& o = env_.obstacles[j];
  const Tracked& tr = tracked_[j];
  Eigen::Vector2d p = tr.ref.head<2>();
  p.x() += o.center.x();
  p.y() += o.center.y() - env_.station_speed * t;
  return p;
}

std::vector<Eigen::Vector2d> CourseTracker::advance(int t,
                                                    const Eigen::VectorXd& x) {
  if (t != last_step_ + 1)
    throw ContractViolation("course tracker steps must be consecutive");
  last_step_ = t;
  const double station = env_.station_speed * t;
  const Eigen::Vector2d pos = x.head<2>();

  for (std::size_t j = 0; j < tracked_.size(); ++j) {
    Tracked& tr = tracked_[j];
    if (tr.finished) continue;
    if (tr.active) {
      tr.ref = A_free_ * tr.ref;
    } else if (station >= env_.obstacles[j].center.y() - env_.activation_range) {
      tr.ref = x;  // pin to the racer's ballistic frame
      tr.active = true;
    } else {
      continue;
    }

    const Eigen::Vector2d p = obstacle_position(static_cast<int>(j), t);
    const double dist = (pos - p).norm();
    const bool contact = dist < env_.obstacles[j].radius + env_.robot_radius;
    if (contact && !tr.in_contact) {
      ++collision_count_;
      if (!first_collision_) first_collision_ = t;
    }
    if (contact) tr.hit = true;
    tr.in_contact = contact;

    if (!tr.passed && station >= env_.obstacles[j].center.y()) {
      tr.passed = true;
      const double rel_lat = pos.x() - p.x();
      if (rel_lat >= 0.0)
        ++pass_right_;
      else
        ++pass_left_;
    }
    if (station - env_.obstacles[j].center.y() >
        env_.sensor_radius + 2.0 * env_.station_speed) {
      tr.finished = true;
      tr.in_contact = false;
    }
  }

  std::vector<Eigen::Vector2d> sensed;
  for (std::size_t j = 0; j < tracked_.size(); ++j) {
    const Tracked& tr = tracked_[j];
    if (!tr.active || tr.finished) continue;
    const Eigen::Vector2d p = obstacle_position(static_cast<int>(j), t);
    if ((pos - p).norm() <= env_.sensor_radius) sensed.push_back(p);
  }
  std::sort(sensed.begin(), sensed.end(),
            [&](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
              const double da = (a - pos).norm();
              const double db = (b - pos).norm();
              if (da != db) return da < db;
              return std::atan2(a.y(), a.x()) < std::atan2(b.y(), b.x());
            });
  return sensed;
}

int CourseTracker::obstacles_passed() const {
  int n = 0;
  for (const auto& tr : tracked_)
    if (tr.passed) ++n;
  return n;
}

int CourseTracker::distinct_hits() const {
  int n = 0;
  for (const auto& tr : tracked_)
    if (tr.hit) ++n;
  return n;
}

}  // namespace olc::sim
