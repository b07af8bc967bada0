// SPDX-License-Identifier: Apache-2.0
//
// raaloc - localization with retro-directive antenna arrays
// Copyright (C) 2026 The raaloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <random>

#include "raaloc/locengine.hpp"
#include "raaloc/scenario_io.hpp"

using namespace raaloc;

namespace {

const std::string kScenario = std::string(RAALOC_SOURCE_DIR) + "/scenarios/reference_room.json";

double true_bearing(const Position& from, const Position& to) {
  return std::atan2(to.z - from.z, to.x - from.x);
}

double line_cost(const std::vector<Position>& anchors, const std::vector<double>& bearings, double x,
                 double z) {
  double acc = 0.0;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const double s = std::sin(bearings[i]);
    const double c = std::cos(bearings[i]);
    const double r = s * (x - anchors[i].x) - c * (z - anchors[i].z);
    acc += r * r;
  }
  return acc;
}

Position grid_minimizer(const std::vector<Position>& anchors, const std::vector<double>& bearings,
                        Position around) {
  double half = 0.25;
  double step = 5e-3;
  Position best = around;
  for (int pass = 0; pass < 3; ++pass) {
    double best_cost = INFINITY;
    Position centre = best;
    const int cells = static_cast<int>(std::lround(half / step));
    for (int i = -cells; i <= cells; ++i)
      for (int j = -cells; j <= cells; ++j) {
        const double x = centre.x + i * step;
        const double z = centre.z + j * step;
        const double cost = line_cost(anchors, bearings, x, z);
        if (cost < best_cost) {
          best_cost = cost;
          best = {x, z};
        }
      }
    half = 2 * step;
    step /= 20;
  }
  return best;
}

// Cheap variant of the reference room: linear arrays and a short path.
Scenario small_scenario() {
  Scenario s = io::load_scenario(kScenario);
  const double lambda = s.rf.wavelength();
  for (auto& a : s.anchors)
    a.array = ArrayGeometry::linear(32, lambda / 2, a.array.pose);
  for (auto& r : s.raas) {
    r.geometry = ArrayGeometry::linear(64, lambda / 2, r.geometry.pose);
    r.trajectory.waypoints = {{0.0, {-1.0, 0.5}}, {1.5, {1.0, -0.5}}};
  }
  s.trials = 4;
  s.trx.snr_threshold = db_to_linear(24.0);
  return s;
}

}  // namespace

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {2}) != derive_seed(2, {2}));
  CHECK(derive_seed(1, {}) != derive_seed(1, {0}));
}

TEST_CASE("two exact bearings intersect") {
  const std::vector<Position> anchors = {{0, 0}, {10, 0}};
  const Position target{5, 5};
  const std::vector<double> b = {true_bearing(anchors[0], target), true_bearing(anchors[1], target)};
  const Position p = fuse_aoa_ls(anchors, b);
  CHECK(std::abs(p.x - 5) < 1e-9);
  CHECK(std::abs(p.z - 5) < 1e-9);
}

TEST_CASE("consistent overdetermined bearings") {
  const std::vector<Position> anchors = {{-4, 4}, {4, 4}, {4, -4}, {-4, -4}};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const Position t{u(rng), u(rng)};
    std::vector<double> b;
    for (const auto& a : anchors)
      b.push_back(true_bearing(a, t));
    const Position p = fuse_aoa_ls(anchors, b);
    CHECK(distance(p, t) < 1e-9);
  }
}

TEST_CASE("fusion failure modes") {
  const std::vector<Position> one = {{0, 0}};
  const std::vector<double> b1 = {0.3};
  CHECK_THROWS_WITH_AS(fuse_aoa_ls(one, b1), "underdetermined", std::invalid_argument);
  const std::vector<Position> two = {{0, 0}, {1, 1}};
  const std::vector<double> parallel = {0.7, 0.7 + kPi};
  CHECK_THROWS_WITH_AS(fuse_aoa_ls(two, parallel), "degenerate geometry", std::domain_error);
}

TEST_CASE("noisy bearings agree with a brute-force minimizer") {
  const std::vector<Position> anchors = {{-4, 4}, {4, 4}, {4, -4}, {-4, -4}};
  const Position truth{1.2, -0.7};
  std::mt19937_64 rng(4);
  std::normal_distribution<double> noise(0.0, 0.2 * kPi / 180.0);
  double ls_sum = 0.0;
  double grid_sum = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> b;
    for (const auto& a : anchors)
      b.push_back(true_bearing(a, truth) + noise(rng));
    const Position ls = fuse_aoa_ls(anchors, b);
    const Position grid = grid_minimizer(anchors, b, truth);
    ls_sum += distance(ls, truth);
    grid_sum += distance(grid, truth);
  }
  CHECK(ls_sum == doctest::Approx(grid_sum).epsilon(0.05));
}

TEST_CASE("empirical CDF") {
  const Ecdf e = ecdf({3.0, 1.0, 2.0});
  CHECK(e.at(2.0) == doctest::Approx(2.0 / 3.0));
  CHECK(e.at(0.5) == 0.0);
  CHECK(e.at(3.0) == 1.0);
  CHECK(e.quantile(0.5) == 2.0);
  CHECK(e.quantile(1.0) == 3.0);

  const Ecdf ties = ecdf({1.0, 1.0, 2.0, 2.0});
  CHECK(ties.values().size() == 2);
  CHECK(ties.at(1.0) == 0.5);
  CHECK(ties.sample_count() == 4);
  CHECK(ties.quantile(0.5) == 1.0);
  CHECK(ties.quantile(0.51) == 2.0);

  CHECK_THROWS_AS(ecdf({}), std::invalid_argument);
  CHECK_THROWS_AS(e.quantile(0.0), std::invalid_argument);
}

TEST_CASE("empirical CDF of uniform samples stays inside the DKW band") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> s(10'000);
  for (auto& v : s)
    v = u(rng);
  const Ecdf e = ecdf(s);
  double worst = 0.0;
  for (std::size_t i = 0; i < e.values().size(); ++i) {
    const double below = i == 0 ? 0.0 : e.fractions()[i - 1];
    worst = std::max({worst, std::abs(e.fractions()[i] - e.values()[i]), std::abs(below - e.values()[i])});
  }
  CHECK(worst < 0.02);
}

TEST_CASE("median") {
  CHECK(median({3, 1, 2}) == 2);
  CHECK(median({4, 1, 3, 2}) == 2.5);
  CHECK_THROWS_AS(median({}), std::invalid_argument);
}

TEST_CASE("thread count resolution") {
  CHECK(resolve_threads(3, 10) == 3);
  CHECK(resolve_threads(8, 2) == 2);
  setenv("RAALOC_THREADS", "1", 1);
  CHECK(resolve_threads(0, 50) == 1);
  unsetenv("RAALOC_THREADS");
  CHECK(resolve_threads(0, 1) == 1);
}

TEST_CASE("scenario invariants") {
  Scenario s = io::load_scenario(kScenario);
  CHECK_NOTHROW(s.validate());
  CHECK(s.step_count() == 100);
  CHECK(s.id_length() == 40);
  Scenario bad = s;
  bad.anchors.resize(1);
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = s;
  bad.update_rate_hz = 1e6;  // 40 symbols of 100 ns do not fit into 1 us
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = s;
  bad.raas.clear();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("static RAA at the room centre is located to within a centimetre") {
  Scenario s = io::load_scenario(kScenario);
  s.raas[0].trajectory.waypoints = {{0.0, {0.0, 0.0}}, {0.5, {0.0, 0.0}}};
  const auto records = simulate_trajectory(s, 0, 99);
  REQUIRE(records.size() == 6);
  for (const auto& r : records) {
    REQUIRE(r.error.has_value());
    CHECK(r.bearings_used == 4);
    CHECK(*r.error < 0.01);
  }
}

TEST_CASE("reference trajectory produces one record per step and is reproducible") {
  const Scenario s = io::load_scenario(kScenario);
  const auto a = simulate_trajectory(s, 0, 7);
  const auto b = simulate_trajectory(s, 0, 7);
  REQUIRE(a.size() == 100);
  REQUIRE(b.size() == 100);
  int fixes = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].step == static_cast<int>(i));
    CHECK(a[i].time_s == doctest::Approx(0.1 * static_cast<double>(i)));
    CHECK(a[i].truth == b[i].truth);
    CHECK(a[i].error == b[i].error);
    CHECK(a[i].estimate == b[i].estimate);
    fixes += a[i].error.has_value();
    for (std::size_t k = 0; k < a[i].observations.size(); ++k)
      CHECK(a[i].observations[k].result.snr_trace == b[i].observations[k].result.snr_trace);
  }
  CHECK(fixes == 100);
  CHECK(a.front().truth == Position{-2.5, -1.0});
}

TEST_CASE("vectors are kept only on request") {
  Scenario s = small_scenario();
  const auto lean = simulate_trajectory(s, 0, 1);
  const auto full = simulate_trajectory(s, 0, 1, SimulationOptions{true});
  bool any = false;
  for (std::size_t i = 0; i < lean.size(); ++i)
    for (std::size_t k = 0; k < lean[i].observations.size(); ++k) {
      CHECK(lean[i].observations[k].result.final_beamformer.size() == 0);
      if (full[i].observations[k].result.detected) {
        any = true;
        CHECK(full[i].observations[k].result.final_beamformer.size() == 32);
        CHECK(full[i].observations[k].result.demod_symbols.size() == 40);
      }
      CHECK(lean[i].error == full[i].error);
    }
  CHECK(any);
}

TEST_CASE("lowering the detection threshold never loses detections") {
  Scenario s = small_scenario();
  int previous = -1;
  for (double eta_db : {36.0, 32.0, 28.0, 24.0, 20.0}) {
    s.trx.snr_threshold = db_to_linear(eta_db);
    const auto mc = monte_carlo(s, 1);
    int detections = 0;
    for (const auto& per_anchor : mc.iterations)
      for (const auto& it : per_anchor)
        detections += static_cast<int>(it.size());
    CAPTURE(eta_db);
    CHECK(detections >= previous);
    previous = detections;
  }
  CHECK(previous > 0);
}

TEST_CASE("Monte Carlo aggregation does not depend on the worker count") {
  Scenario s = small_scenario();
  s.trx.snr_threshold = db_to_linear(24.0);
  const auto one = monte_carlo(s, 1);
  const auto two = monte_carlo(s, 2);
  CHECK(two.threads_used == 2);
  CHECK(one.errors == two.errors);
  CHECK(one.outages == two.outages);
  CHECK(one.iterations == two.iterations);
  std::size_t samples = 0;
  for (int o : one.outages)
    samples += static_cast<std::size_t>(o);
  samples += one.all_errors().size();
  CHECK(samples == static_cast<std::size_t>(s.trials * s.step_count()));
}

TEST_CASE("channel tracking shortens the search of a slow RAA") {
  Scenario s = io::load_scenario(kScenario);
  s.rf.raa_gain = 1.0;
  s.raas[0].gain = 1.0;
  s.trials = 2;
  std::vector<double> random_init;
  std::vector<double> tracking;
  for (bool track : {false, true}) {
    s.trx.channel_tracking = track;
    const auto mc = monte_carlo(s, 1);
    for (const auto& per_anchor : mc.iterations)
      for (int k : per_anchor[0])
        (track ? tracking : random_init).push_back(k);
  }
  CHECK(median(tracking) < median(random_init));
}
