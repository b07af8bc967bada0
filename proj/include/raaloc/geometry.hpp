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

#ifndef RAALOC_GEOMETRY_HPP
#define RAALOC_GEOMETRY_HPP

#include <cmath>
#include <complex>
#include <variant>

#include <Eigen/Dense>

namespace raaloc {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s
inline constexpr double kBoltzmann = 1.380649e-23;      // J/K
inline constexpr double kReferenceTemperature = 290.0;  // K

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

// Radio parameters shared by every node of a scenario. Gains and noise
// figures are linear power ratios; raa_gain is a linear amplitude.
struct RfParams {
  double carrier_frequency_hz = 28e9;
  double bandwidth_hz = 10e6;
  double symbol_time_s = 100e-9;
  double tx_power_w = 1e-3;
  double element_gain_trx = 1.0;
  double element_gain_raa = 1.0;
  double noise_figure_trx = 1.9952623149688795;  // 3 dB
  double noise_figure_raa = 1.9952623149688795;
  double raa_gain = 1.0;

  double wavelength() const { return kSpeedOfLight / carrier_frequency_hz; }

  // Throws std::invalid_argument naming the first non-positive field.
  void validate() const;

  bool operator==(const RfParams&) const = default;
};

// Points live in the x-z plane.
struct Position {
  double x = 0.0;
  double z = 0.0;

  bool operator==(const Position&) const = default;
};

// Boresight is the direction angle of the array normal measured from +x
// toward +z, so an array looking along +z has boresight pi/2. Local angles
// are measured from boresight and are positive toward +x for that array.
struct Pose {
  Position position;
  double boresight = kPi / 2.0;

  bool operator==(const Pose&) const = default;
};

struct LinearLayout {
  int elements = 1;
  bool operator==(const LinearLayout&) const = default;
};

// nx is the in-plane axis; ny only adds gain.
struct PlanarLayout {
  int nx = 1;
  int ny = 1;
  bool operator==(const PlanarLayout&) const = default;
};

struct ArrayGeometry {
  std::variant<LinearLayout, PlanarLayout> layout = LinearLayout{};
  double spacing_m = 0.0;
  Pose pose;

  static ArrayGeometry linear(int elements, double spacing_m, Pose pose = {});
  static ArrayGeometry planar(int nx, int ny, double spacing_m, Pose pose = {});

  bool is_linear() const { return std::holds_alternative<LinearLayout>(layout); }
  int element_count() const;
  // Elements along the axis that resolves angles in the x-z plane.
  int in_plane_count() const;
  void validate() const;

  bool operator==(const ArrayGeometry&) const = default;
};

// Unit-norm ULA steering vector v(angle); element n has phase
// +(2 pi / lambda) n spacing sin(angle).
CVector steering_vector(const ArrayGeometry& geometry, double angle, double wavelength);

// Kronecker product of the in-plane ULA vector and the broadside vector of
// the orthogonal axis; element index is ix * ny + iy.
CVector planar_steering_vector(const ArrayGeometry& geometry, double azimuth, double wavelength);

// Dispatches on the layout.
CVector array_response(const ArrayGeometry& geometry, double angle, double wavelength);

// Free-space link loss (4 pi d / lambda)^2.
double path_loss(double distance_m, double wavelength);

// Angle of the point seen from the pose, in (-pi/2, pi/2]. Throws
// std::domain_error("out of field of view") for the rear half-plane.
double bearing(const Pose& pose, const Position& point);

// Global direction angle (from +x toward +z) of a local angle.
inline double global_bearing(const Pose& pose, double local_angle) {
  return pose.boresight - local_angle;
}

double distance(const Position& a, const Position& b);

// Wraps to (-pi, pi].
double wrap_angle(double angle);

}  // namespace raaloc

#endif
