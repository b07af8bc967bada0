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

#include "raaloc/geometry.hpp"

#include <stdexcept>
#include <string>

namespace raaloc {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw std::invalid_argument(std::string("RfParams: ") + name + " must be positive");
}

CVector ula_vector(int elements, double spacing, double angle, double wavelength) {
  CVector v(elements);
  const double step = 2.0 * kPi / wavelength * spacing * std::sin(angle);
  const double scale = 1.0 / std::sqrt(static_cast<double>(elements));
  for (int n = 0; n < elements; ++n)
    v(n) = std::polar(scale, step * n);
  return v;
}

void check_angle(double angle) {
  if (!(std::abs(angle) <= kPi / 2.0))
    throw std::invalid_argument("steering angle must lie in [-pi/2, pi/2]");
}

}  // namespace

void RfParams::validate() const {
  require_positive(carrier_frequency_hz, "carrier_frequency_hz");
  require_positive(bandwidth_hz, "bandwidth_hz");
  require_positive(symbol_time_s, "symbol_time_s");
  require_positive(tx_power_w, "tx_power_w");
  require_positive(element_gain_trx, "element_gain_trx");
  require_positive(element_gain_raa, "element_gain_raa");
  require_positive(noise_figure_trx, "noise_figure_trx");
  require_positive(noise_figure_raa, "noise_figure_raa");
  require_positive(raa_gain, "raa_gain");
}

ArrayGeometry ArrayGeometry::linear(int elements, double spacing_m, Pose pose) {
  ArrayGeometry g{LinearLayout{elements}, spacing_m, pose};
  g.validate();
  return g;
}

ArrayGeometry ArrayGeometry::planar(int nx, int ny, double spacing_m, Pose pose) {
  ArrayGeometry g{PlanarLayout{nx, ny}, spacing_m, pose};
  g.validate();
  return g;
}

int ArrayGeometry::element_count() const {
  if (const auto* l = std::get_if<LinearLayout>(&layout))
    return l->elements;
  const auto& p = std::get<PlanarLayout>(layout);
  return p.nx * p.ny;
}

int ArrayGeometry::in_plane_count() const {
  if (const auto* l = std::get_if<LinearLayout>(&layout))
    return l->elements;
  return std::get<PlanarLayout>(layout).nx;
}

void ArrayGeometry::validate() const {
  if (const auto* l = std::get_if<LinearLayout>(&layout)) {
    if (l->elements < 1)
      throw std::invalid_argument("array needs at least one element");
  } else {
    const auto& p = std::get<PlanarLayout>(layout);
    if (p.nx < 1 || p.ny < 1)
      throw std::invalid_argument("array needs at least one element");
  }
  if (!(spacing_m > 0.0))
    throw std::invalid_argument("array spacing must be positive");
}

CVector steering_vector(const ArrayGeometry& geometry, double angle, double wavelength) {
  const auto* l = std::get_if<LinearLayout>(&geometry.layout);
  if (!l)
    throw std::invalid_argument("steering_vector needs a linear array; use planar_steering_vector");
  check_angle(angle);
  return ula_vector(l->elements, geometry.spacing_m, angle, wavelength);
}

CVector planar_steering_vector(const ArrayGeometry& geometry, double azimuth, double wavelength) {
  const auto* p = std::get_if<PlanarLayout>(&geometry.layout);
  if (!p)
    throw std::invalid_argument("planar_steering_vector needs a planar array");
  check_angle(azimuth);
  const CVector in_plane = ula_vector(p->nx, geometry.spacing_m, azimuth, wavelength);
  const double broadside = 1.0 / std::sqrt(static_cast<double>(p->ny));
  CVector v(p->nx * p->ny);
  for (int ix = 0; ix < p->nx; ++ix)
    for (int iy = 0; iy < p->ny; ++iy)
      v(ix * p->ny + iy) = in_plane(ix) * broadside;
  return v;
}

CVector array_response(const ArrayGeometry& geometry, double angle, double wavelength) {
  return geometry.is_linear() ? steering_vector(geometry, angle, wavelength)
                              : planar_steering_vector(geometry, angle, wavelength);
}

double path_loss(double distance_m, double wavelength) {
  if (!(distance_m > 0.0))
    throw std::domain_error("path_loss: distance must be positive");
  const double r = 4.0 * kPi * distance_m / wavelength;
  return r * r;
}

double wrap_angle(double angle) {
  double a = std::remainder(angle, 2.0 * kPi);
  if (a <= -kPi)
    a += 2.0 * kPi;
  return a;
}

double bearing(const Pose& pose, const Position& point) {
  const double dx = point.x - pose.position.x;
  const double dz = point.z - pose.position.z;
  if (dx == 0.0 && dz == 0.0)
    throw std::invalid_argument("bearing: point coincides with the array position");
  const double local = wrap_angle(pose.boresight - std::atan2(dz, dx));
  if (!(local > -kPi / 2.0 && local <= kPi / 2.0))
    throw std::domain_error("out of field of view");
  return local;
}

double distance(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.z - b.z);
}

}  // namespace raaloc
