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

#include <doctest.h>

#include <sstream>

#include "olc/envsim.hpp"
#include "oracles.hpp"

using namespace olc;
using namespace olc::sim;

TEST_CASE("sense: empty when nothing is in range") {
  Environment env = make_centerline(3, 600.0, 100.0);
  env.sensor_radius = 50.0;
  CHECK(sense(env, {0.0, 0.0}).empty());
}

TEST_CASE("sense: boundary obstacle included (closed ball)") {
  Environment env;
  env.sensor_radius = 100.0;
  env.obstacles.push_back({{0.0, 100.0}, 10.0});
  const auto got = sense(env, {0.0, 0.0});
  REQUIRE(got.size() == 1);
  CHECK(got[0].y() == doctest::Approx(100.0));
}

TEST_CASE("sense: relative to the path point, sorted by distance") {
  Environment env;
  env.sensor_radius = 1000.0;
  env.obstacles.push_back({{50.0, 300.0}, 10.0});
  env.obstacles.push_back({{-20.0, 100.0}, 10.0});
  const Eigen::Vector2d position(0.0, 0.0);
  const Eigen::Vector2d path_point(0.0, 50.0);
  const auto got = sense(env, position, path_point);
  REQUIRE(got.size() == 2);
  CHECK(got[0].x() == doctest::Approx(-20.0));
  CHECK(got[0].y() == doctest::Approx(50.0));   // 100 - 50
  CHECK(got[1].y() == doctest::Approx(250.0));  // 300 - 50
}

TEST_CASE("sense: matches a brute-force filter on random fields") {
  Rng rng(81);
  for (int trial = 0; trial < 20; ++trial) {
    Environment env;
    env.sensor_radius = rng.uniform(50.0, 400.0);
    const int n = 1 + static_cast<int>(rng.uniform() * 30);
    for (int i = 0; i < n; ++i)
      env.obstacles.push_back(
          {{rng.uniform(-500, 500), rng.uniform(-500, 500)}, 10.0});
    const Eigen::Vector2d pos(rng.uniform(-200, 200), rng.uniform(-200, 200));
    const auto got = sense(env, pos);
    int expect = 0;
    for (const auto& o : env.obstacles)
      if ((o.center - pos).norm() <= env.sensor_radius) ++expect;
    CHECK(static_cast<int>(got.size()) == expect);
    for (std::size_t i = 1; i < got.size(); ++i)
      CHECK((got[i - 1] - pos).norm() <= (got[i] - pos).norm() + 1e-12);
  }
}

TEST_CASE("gen_disturbance: gaussian with zero std is the constant mean") {
  Rng rng(82);
  const Eigen::VectorXd w = gen_disturbance(GaussianProfile{0.7, 0.0}, 3, 4,
                                            {0, 0}, {}, rng);
  for (int i = 0; i < 4; ++i) CHECK(w[i] == doctest::Approx(0.7));
}

TEST_CASE("gen_disturbance: sinusoid zeroes at half period") {
  Rng rng(83);
  const SinusoidProfile prof{0.5, 20.0, 0.0, 0};
  const Eigen::VectorXd w =
      gen_disturbance(prof, 10, 4, {0, 0}, {}, rng);
  CHECK(std::abs(w[0]) < 1e-12);
  CHECK(w.tail(3).norm() == 0.0);
  const Eigen::VectorXd peak = gen_disturbance(prof, 5, 4, {0, 0}, {}, rng);
  CHECK(peak[0] == doctest::Approx(0.5));
}

TEST_CASE("gen_disturbance: gaussian sample statistics") {
  Rng rng(84);
  const GaussianProfile prof{0.0, 0.5};
  double sum = 0.0, sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd w = gen_disturbance(prof, i, 1, {0, 0}, {}, rng);
    sum += w[0];
    sq += w[0] * w[0];
  }
  const double mean = sum / n;
  const double stddev = std::sqrt(sq / n - mean * mean);
  CHECK(std::abs(mean - 0.0) < 0.01);
  CHECK(std::abs(stddev - 0.5) < 0.02);
}

TEST_CASE("gen_disturbance: adversarial aims at the nearest obstacle") {
  Rng rng(85);
  const AdversarialProfile prof{1.5};
  std::vector<Eigen::Vector2d> sensed{{3.0, 4.0}, {100.0, 0.0}};
  const Eigen::Vector2d racer(0.0, 0.0);
  const Eigen::VectorXd w = gen_disturbance(prof, 0, 4, racer, sensed, rng);
  CHECK(w.norm() == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(w[2] == doctest::Approx(1.5 * 3.0 / 5.0));
  CHECK(w[3] == doctest::Approx(1.5 * 4.0 / 5.0));
  CHECK(w[0] == 0.0);
  // Nothing sensed: push back toward the nominal path.
  const Eigen::VectorXd back =
      gen_disturbance(prof, 0, 4, {10.0, 0.0}, {}, rng);
  CHECK(back[2] == doctest::Approx(-1.5));
  // At the origin with nothing sensed: no push at all.
  CHECK(gen_disturbance(prof, 0, 4, {0.0, 0.0}, {}, rng).norm() == 0.0);
}

TEST_CASE("gen_disturbance: determinism per seed") {
  const GaussianProfile prof{0.0, 0.5};
  Rng a(123), b(123);
  for (int i = 0; i < 50; ++i) {
    const Eigen::VectorXd wa = gen_disturbance(prof, i, 4, {0, 0}, {}, a);
    const Eigen::VectorXd wb = gen_disturbance(prof, i, 4, {0, 0}, {}, b);
    CHECK((wa - wb).norm() == 0.0);
  }
}

TEST_CASE("collision_check: clean trajectory") {
  Environment env = make_centerline(3, 600.0, 100.0);
  std::vector<Eigen::Vector2d> traj;
  for (int t = 0; t < 100; ++t) traj.push_back({500.0, 30.0 * t});
  const auto sum = collision_check(traj, env);
  CHECK(sum.count == 0);
  CHECK_FALSE(sum.first_index.has_value());
}

TEST_CASE("collision_check: path through an obstacle center") {
  Environment env = make_centerline(1, 600.0, 100.0);
  std::vector<Eigen::Vector2d> traj;
  for (int t = 0; t < 160; ++t) traj.push_back({0.0, 30.0 * t});
  const auto sum = collision_check(traj, env);
  CHECK(sum.count >= 1);
  CHECK(sum.distinct_obstacles == 1);
  REQUIRE(sum.first_index.has_value());
  CHECK(*sum.first_index > 0);
}

TEST_CASE("collision_check: contiguous contact counts once, re-entry twice") {
  Environment env;
  env.robot_radius = 1.0;
  env.obstacles.push_back({{0.0, 0.0}, 5.0});
  std::vector<Eigen::Vector2d> traj{{0, 0}, {1, 0}, {100, 0}, {2, 0}, {3, 0}};
  const auto sum = collision_check(traj, env);
  CHECK(sum.count == 2);
  CHECK(sum.distinct_obstacles == 1);
}

TEST_CASE("collision_check: matches a per-step brute force") {
  Rng rng(86);
  for (int trial = 0; trial < 20; ++trial) {
    Environment env;
    env.robot_radius = rng.uniform(1.0, 10.0);
    for (int i = 0; i < 12; ++i)
      env.obstacles.push_back(
          {{rng.uniform(-100, 100), rng.uniform(-100, 100)},
           rng.uniform(5.0, 30.0)});
    std::vector<Eigen::Vector2d> traj;
    for (int t = 0; t < 60; ++t)
      traj.push_back({rng.uniform(-120, 120), rng.uniform(-120, 120)});
    const auto sum = collision_check(traj, env);

    int expect_count = 0, expect_distinct = 0;
    for (const auto& o : env.obstacles) {
      bool prev = false, ever = false;
      for (const auto& z : traj) {
        const bool hit = (z - o.center).norm() < o.radius + env.robot_radius;
        if (hit && !prev) ++expect_count;
        prev = hit;
        ever |= hit;
      }
      if (ever) ++expect_distinct;
    }
    CHECK(sum.count == expect_count);
    CHECK(sum.distinct_obstacles == expect_distinct);
  }
}

TEST_CASE("make_centerline: all centers on the nominal line") {
  const Environment env = make_centerline(50, 600.0, 115.0);
  REQUIRE(env.obstacles.size() == 50);
  for (const auto& o : env.obstacles) {
    CHECK(std::abs(o.center.x()) < 1e-12);
    CHECK(o.radius == 115.0);
  }
  CHECK(env.obstacles[0].center.y() == doctest::Approx(4200.0));
  CHECK(env.obstacles[49].center.y() == doctest::Approx(33600.0));
}

TEST_CASE("make_slalom: measured gate gap equals gate_width") {
  for (double width : {120.0, 240.0, 360.0}) {
    const Environment env = make_slalom(80.0, width, 3, 60.0, 4, 600.0);
    // Gate 1 sits at station (6+1)*600 with center +80.
    std::vector<const Obstacle*> at_gate;
    for (const auto& o : env.obstacles)
      if (std::abs(o.center.y() - 4200.0) < 1e-9) at_gate.push_back(&o);
    REQUIRE(at_gate.size() == 8);
    double left_inner = -1e9, right_inner = 1e9;
    for (const auto* o : at_gate) {
      const double lat = o->center.x();
      if (lat < 80.0)
        left_inner = std::max(left_inner, lat + o->radius);
      else
        right_inner = std::min(right_inner, lat - o->radius);
    }
    CHECK(std::abs((right_inner - left_inner) - width) < 1e-9);
  }
}

TEST_CASE("make_slalom: too-narrow gate forces a straight-path collision") {
  Environment env = make_slalom(0.0, 8.0, 1, 60.0, 4, 600.0);
  env.robot_radius = 5.0;
  std::vector<Eigen::Vector2d> traj;
  for (int t = 0; t <= 150; ++t) traj.push_back({0.0, 30.0 * t});
  CHECK(collision_check(traj, env).count >= 1);

  // A huge gate at zero offset leaves the straight path clean.
  Environment open = make_slalom(0.0, 500.0, 1, 60.0, 4, 600.0);
  open.robot_radius = 5.0;
  CHECK(collision_check(traj, open).count == 0);
}

TEST_CASE("load_obstacles: parses triples, skips comments") {
  std::istringstream is("# a comment\n10 20 5\n\n-3.5 600 115 # inline\n");
  const auto obs = load_obstacles(is);
  REQUIRE(obs.size() == 2);
  CHECK(obs[0].center.x() == 10.0);
  CHECK(obs[1].radius == 115.0);
  std::istringstream bad("1 2\n");
  CHECK_THROWS_AS(load_obstacles(bad), ContractViolation);
}

TEST_CASE("tracker: zero-input racer hits every centerline obstacle") {
  Environment env = make_centerline(5, 600.0, 115.0);
  const auto sys = lindyn::double_integrator(1.0);
  CourseTracker tracker(env, sys.A);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
  auto sensed = tracker.advance(0, x);
  for (int t = 0; t < 11 * 20 + 10; ++t) {
    // Open loop, no disturbance: the racer rides the nominal line.
    x = sys.A * x;
    sensed = tracker.advance(t + 1, x);
  }
  CHECK(tracker.obstacles_passed() == 5);
  CHECK(tracker.distinct_hits() == 5);
  CHECK(tracker.collision_count() >= 5);
}

TEST_CASE("tracker: obstacles spawn dead ahead and approach at speed") {
  Environment env = make_centerline(2, 600.0, 115.0);
  const auto sys = lindyn::double_integrator(1.0);
  CourseTracker tracker(env, sys.A);
  // Racer with a constant lateral offset and drift velocity.
  Eigen::VectorXd x(4);
  x << 40.0, 0.0, 1.5, 0.0;
  auto sensed = tracker.advance(0, x);
  bool seen = false;
  int last_countdown = 0;
  for (int t = 1; t <= 145; ++t) {
    x = sys.A * x;  // ballistic racer
    sensed = tracker.advance(t, x);
    if (!sensed.empty()) {
      // Ballistic anchoring: relative lateral offset stays zero while the
      // station gap shrinks by station_speed per step.
      CHECK(std::abs(sensed[0].x() - x[0]) < 1e-9);
      const int countdown = static_cast<int>(std::lround(sensed[0].y() - x[1]));
      if (seen) CHECK(countdown == last_countdown - 30);
      last_countdown = countdown;
      seen = true;
    }
  }
  CHECK(seen);
}

TEST_CASE("tracker: pass side reflects relative lateral position") {
  Environment env = make_centerline(1, 600.0, 10.0);
  const auto sys = lindyn::double_integrator(1.0);

  CourseTracker right(env, sys.A);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
  right.advance(0, x);
  for (int t = 1; t <= 145; ++t) {
    Eigen::VectorXd moved = x;
    moved[0] = 50.0 * t / 145.0;  // slides right relative to its anchor
    right.advance(t, moved);
  }
  CHECK(right.pass_right() == 1);
  CHECK(right.pass_left() == 0);
}

TEST_CASE("tracker: steps must be consecutive") {
  Environment env = make_centerline(1, 600.0, 10.0);
  const auto sys = lindyn::double_integrator(1.0);
  CourseTracker tracker(env, sys.A);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
  tracker.advance(0, x);
  CHECK_THROWS_AS(tracker.advance(2, x), ContractViolation);
}

TEST_CASE("presets: random field and corridor construct sanely") {
  const Environment field = make_random_field(40, 400.0, 12000.0, 80.0, 7);
  CHECK(field.obstacles.size() == 40);
  for (std::size_t i = 1; i < field.obstacles.size(); ++i)
    CHECK(field.obstacles[i - 1].center.y() <= field.obstacles[i].center.y());
  const Environment same = make_random_field(40, 400.0, 12000.0, 80.0, 7);
  CHECK(same.obstacles[13].center == field.obstacles[13].center);

  const Environment corr = make_corridor(120.0, 10, 180.0, 60.0, 300.0);
  CHECK(corr.obstacles.size() == 20);
}

TEST_CASE("disturbance_bound: covers the profiles") {
  CHECK(disturbance_bound(GaussianProfile{0.0, 0.5}, 4) ==
        doctest::Approx(1.5 * 2.0));
  CHECK(disturbance_bound(SinusoidProfile{}, 4) == doctest::Approx(1.7));
  CHECK(disturbance_bound(AdversarialProfile{2.0}, 4) == doctest::Approx(2.0));
}
