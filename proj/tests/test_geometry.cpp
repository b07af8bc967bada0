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
#include <random>

#include "golden_values.hpp"
#include "raaloc/geometry.hpp"

using namespace raaloc;

namespace {

constexpr double kDeg = kPi / 180.0;
const double kLambda = RfParams{}.wavelength();

// Scalar reference: element n carries exp(+j 2 pi / lambda n d sin(phi)) / sqrt(N).
Complex ula_element(int n, int count, double spacing, double angle) {
  const double phase = 2.0 * kPi / kLambda * n * spacing * std::sin(angle);
  return Complex(std::cos(phase), std::sin(phase)) / std::sqrt(static_cast<double>(count));
}

}  // namespace

TEST_CASE("wavelength follows the carrier frequency") {
  RfParams rf;
  CHECK(rf.wavelength() == doctest::Approx(golden::kWavelength28GHz).epsilon(1e-9));
  rf.carrier_frequency_hz = 14e9;
  CHECK(rf.wavelength() == doctest::Approx(2.0 * golden::kWavelength28GHz).epsilon(1e-9));
}

TEST_CASE("RF parameters must be positive") {
  RfParams rf;
  CHECK_NOTHROW(rf.validate());
  rf.bandwidth_hz = 0.0;
  CHECK_THROWS_AS(rf.validate(), std::invalid_argument);
  rf = RfParams{};
  rf.raa_gain = -1.0;
  CHECK_THROWS_AS(rf.validate(), std::invalid_argument);
}

TEST_CASE("steering vector at broadside is uniform") {
  const auto g = ArrayGeometry::linear(4, kLambda / 2);
  const CVector v = steering_vector(g, 0.0, kLambda);
  REQUIRE(v.size() == 4);
  for (int n = 0; n < 4; ++n) {
    CHECK(v(n).real() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(v(n).imag()) < 1e-15);
  }
}

TEST_CASE("steering vector at 30 degrees steps the phase by pi/2") {
  const auto g = ArrayGeometry::linear(4, kLambda / 2);
  const CVector v = steering_vector(g, 30.0 * kDeg, kLambda);
  const Complex expected[4] = {{0.5, 0.0}, {0.0, 0.5}, {-0.5, 0.0}, {0.0, -0.5}};
  for (int n = 0; n < 4; ++n)
    CHECK(std::abs(v(n) - expected[n]) < 1e-12);
}

TEST_CASE("steering vector matches the scalar element loop") {
  const auto g = ArrayGeometry::linear(100, kLambda / 2);
  const double phi = 17.3 * kDeg;
  const CVector v = steering_vector(g, phi, kLambda);
  for (int n = 0; n < 100; ++n)
    CHECK(std::abs(v(n) - ula_element(n, 100, kLambda / 2, phi)) < 1e-12);
}

TEST_CASE("steering vectors have unit norm") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(-kPi / 2, kPi / 2);
  std::uniform_int_distribution<int> count(1, 256);
  for (int i = 0; i < 200; ++i) {
    const auto g = ArrayGeometry::linear(count(rng), kLambda / 2);
    CHECK(std::abs(steering_vector(g, angle(rng), kLambda).norm() - 1.0) < 1e-12);
  }
  const auto p = ArrayGeometry::planar(7, 3, kLambda / 2);
  CHECK(std::abs(planar_steering_vector(p, 0.4, kLambda).norm() - 1.0) < 1e-12);
}

TEST_CASE("grid directions of a half-wavelength ULA are orthogonal") {
  const int n = 64;
  const auto g = ArrayGeometry::linear(n, kLambda / 2);
  const CVector a = steering_vector(g, 0.0, kLambda);
  const CVector b = steering_vector(g, std::asin(2.0 / n), kLambda);
  CHECK(std::abs(a.dot(b)) < 1e-12);
}

TEST_CASE("steering vector rejects planar layouts and rear angles") {
  const auto p = ArrayGeometry::planar(2, 2, kLambda / 2);
  CHECK_THROWS_AS(steering_vector(p, 0.0, kLambda), std::invalid_argument);
  const auto l = ArrayGeometry::linear(4, kLambda / 2);
  CHECK_THROWS_AS(steering_vector(l, 2.0, kLambda), std::invalid_argument);
  CHECK_THROWS_AS(planar_steering_vector(l, 0.0, kLambda), std::invalid_argument);
}

TEST_CASE("planar steering vector at broadside") {
  const CVector v2 = planar_steering_vector(ArrayGeometry::planar(2, 2, kLambda / 2), 0.0, kLambda);
  for (int i = 0; i < 4; ++i)
    CHECK(std::abs(v2(i) - Complex(0.5, 0.0)) < 1e-15);
  const CVector v10 =
      planar_steering_vector(ArrayGeometry::planar(10, 10, kLambda / 2), 0.0, kLambda);
  REQUIRE(v10.size() == 100);
  for (int i = 0; i < 100; ++i)
    CHECK(std::abs(v10(i) - Complex(0.1, 0.0)) < 1e-15);
}

TEST_CASE("planar steering vector is the Kronecker product of the axis factors") {
  const int nx = 4;
  const int ny = 2;
  const double az = 30.0 * kDeg;
  const CVector v = planar_steering_vector(ArrayGeometry::planar(nx, ny, kLambda / 2), az, kLambda);
  for (int ix = 0; ix < nx; ++ix)
    for (int iy = 0; iy < ny; ++iy) {
      // The orthogonal axis sees broadside.
      const Complex expected =
          ula_element(ix, nx, kLambda / 2, az) * ula_element(iy, ny, kLambda / 2, 0.0);
      CHECK(std::abs(v(ix * ny + iy) - expected) < 1e-12);
    }
}

TEST_CASE("planar vector with one row reduces to the ULA vector") {
  const CVector p = planar_steering_vector(ArrayGeometry::planar(9, 1, kLambda / 2), 0.3, kLambda);
  const CVector l = steering_vector(ArrayGeometry::linear(9, kLambda / 2), 0.3, kLambda);
  CHECK((p - l).norm() < 1e-15);
}

TEST_CASE("array geometry invariants") {
  CHECK_THROWS_AS(ArrayGeometry::linear(0, 0.005), std::invalid_argument);
  CHECK_THROWS_AS(ArrayGeometry::planar(3, 0, 0.005), std::invalid_argument);
  CHECK_THROWS_AS(ArrayGeometry::linear(3, 0.0), std::invalid_argument);
  const auto p = ArrayGeometry::planar(10, 4, 0.005);
  CHECK(p.element_count() == 40);
  CHECK(p.in_plane_count() == 10);
  CHECK_FALSE(p.is_linear());
}

TEST_CASE("path loss") {
  CHECK(path_loss(kLambda / (4.0 * kPi), kLambda) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(path_loss(6.0, kLambda) / path_loss(3.0, kLambda) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(path_loss(10.0, kLambda) == doctest::Approx(golden::kPathLoss10m).epsilon(1e-12));
  CHECK(linear_to_db(path_loss(10.0, kLambda)) == doctest::Approx(81.39).epsilon(1e-3));
  CHECK(path_loss(2.0, kLambda) > path_loss(1.999, kLambda));
  CHECK_THROWS_AS(path_loss(0.0, kLambda), std::domain_error);
  CHECK_THROWS_AS(path_loss(-1.0, kLambda), std::domain_error);
}

TEST_CASE("free-space received power drops 6 dB per distance doubling") {
  const double p1 = 1.0 / path_loss(5.0, kLambda);
  const double p2 = 1.0 / path_loss(10.0, kLambda);
  CHECK(linear_to_db(p1 / p2) == doctest::Approx(20.0 * std::log10(2.0)).epsilon(1e-12));
}

TEST_CASE("bearing in the anchor frame") {
  const Pose up{{0.0, 0.0}, kPi / 2};
  CHECK(bearing(up, {0.0, 5.0}) == doctest::Approx(0.0));
  CHECK(bearing(up, {5.0, 5.0}) == doctest::Approx(kPi / 4).epsilon(1e-14));
  CHECK(bearing(up, {-5.0, 5.0}) == doctest::Approx(-kPi / 4).epsilon(1e-14));
  CHECK_THROWS_WITH_AS(bearing(up, {0.0, -1.0}), "out of field of view", std::domain_error);
  CHECK_THROWS_AS(bearing(up, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("bearing agrees with a rotation-matrix oracle") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::uniform_real_distribution<double> heading(-kPi, kPi);
  int checked = 0;
  for (int i = 0; i < 2000; ++i) {
    const Pose pose{{u(rng), u(rng)}, heading(rng)};
    const Position p{u(rng), u(rng)};
    const double dx = p.x - pose.position.x;
    const double dz = p.z - pose.position.z;
    // Rotate into (right, forward) coordinates of the array.
    const double forward = std::cos(pose.boresight) * dx + std::sin(pose.boresight) * dz;
    const double right = std::sin(pose.boresight) * dx - std::cos(pose.boresight) * dz;
    if (forward <= 1e-9) {
      CHECK_THROWS(bearing(pose, p));
      continue;
    }
    CHECK(bearing(pose, p) == doctest::Approx(std::atan2(right, forward)).epsilon(1e-12));
    // Round trip through the global bearing.
    const double theta = global_bearing(pose, bearing(pose, p));
    CHECK(std::abs(wrap_angle(theta - std::atan2(dz, dx))) < 1e-12);
    ++checked;
  }
  CHECK(checked > 500);
}

TEST_CASE("wrap_angle maps into (-pi, pi]") {
  CHECK(wrap_angle(3 * kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(0.5 + 4 * kPi) == doctest::Approx(0.5));
}
