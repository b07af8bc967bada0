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

#include "raaloc/channel.hpp"

#include <limits>
#include <stdexcept>

namespace raaloc {

ChannelMatrix::ChannelMatrix(const ArrayGeometry& trx, const ArrayGeometry& raa,
                             double wavelength, const PathSet& paths, double distance,
                             double departure, double arrival)
    : distance_(distance), departure_(departure), arrival_(arrival) {
  if (paths.paths.empty())
    throw std::domain_error("channel needs at least one path");
  const int p_count = static_cast<int>(paths.paths.size());
  const int m = raa.element_count();
  const int n = trx.element_count();
  const double sqrt_m = std::sqrt(static_cast<double>(m));
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  gains_.resize(p_count);
  raa_responses_.resize(m, p_count);
  trx_responses_.resize(n, p_count);
  for (int p = 0; p < p_count; ++p) {
    const auto& path = paths.paths[p];
    if (!std::isfinite(path.gain.real()) || !std::isfinite(path.gain.imag()))
      throw std::domain_error("path gain must be finite");
    gains_(p) = path.gain;
    raa_responses_.col(p) = sqrt_m * array_response(raa, path.arrival, wavelength).conjugate();
    trx_responses_.col(p) = sqrt_n * array_response(trx, path.departure, wavelength).conjugate();
  }
}

CVector ChannelMatrix::apply(const CVector& x) const {
  const CVector coeff = gains_.cwiseProduct(trx_responses_.transpose() * x);
  return raa_responses_ * coeff;
}

CVector ChannelMatrix::apply_transpose(const CVector& r) const {
  const CVector coeff = gains_.cwiseProduct(raa_responses_.transpose() * r);
  return trx_responses_ * coeff;
}

CMatrix ChannelMatrix::dense() const {
  return raa_responses_ * gains_.asDiagonal() * trx_responses_.transpose();
}

double free_space_amplitude(const RfParams& rf, double distance) {
  if (!(distance > 0.0))
    throw std::domain_error("channel distance must be positive");
  return std::sqrt(rf.element_gain_trx * rf.element_gain_raa) * rf.wavelength() /
         (4.0 * kPi * distance);
}

ChannelMatrix los_channel(const RfParams& rf, const ArrayGeometry& trx, const ArrayGeometry& raa,
                          double distance, double departure, double arrival) {
  PathSet single;
  single.paths.push_back({free_space_amplitude(rf, distance), departure, arrival});
  single.los = true;
  single.k_factor = std::numeric_limits<double>::infinity();
  return ChannelMatrix(trx, raa, rf.wavelength(), single, distance, departure, arrival);
}

ChannelMatrix multipath_channel(const RfParams& rf, const ArrayGeometry& trx,
                                const ArrayGeometry& raa, const PathSet& paths, double distance,
                                double departure, double arrival) {
  if (paths.paths.empty())
    throw std::domain_error("multipath_channel: empty path set");
  if (paths.k_factor < 0.0)
    throw std::domain_error("multipath_channel: negative K-factor");
  return ChannelMatrix(trx, raa, rf.wavelength(), paths, distance, departure, arrival);
}

PathSet surrogate_paths(const RfParams& rf, double distance, double departure, double arrival,
                        const MultipathParams& params, Rng& rng) {
  if (params.clusters < 0)
    throw std::invalid_argument("surrogate_paths: negative cluster count");
  const double amplitude = free_space_amplitude(rf, distance);
  const double k = db_to_linear(params.k_factor_db);
  PathSet set;
  set.los = true;
  set.k_factor = k;
  const double los_share = params.clusters == 0 ? 1.0 : k / (k + 1.0);
  set.paths.push_back({amplitude * std::sqrt(los_share), departure, arrival});
  if (params.clusters == 0)
    return set;

  std::uniform_real_distribution<double> angle(-params.angle_spread, params.angle_spread);
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  const double cluster_amplitude =
      amplitude * std::sqrt(1.0 / (k + 1.0) / static_cast<double>(params.clusters));
  for (int c = 0; c < params.clusters; ++c) {
    const double dep = angle(rng);
    const double arr = angle(rng);
    const double ph = phase(rng);
    set.paths.push_back({std::polar(cluster_amplitude, ph), dep, arr});
  }
  return set;
}

CMatrix round_trip_operator(const ChannelMatrix& h, double tx_power, double raa_gain) {
  const CMatrix dense = h.dense();
  return std::sqrt(tx_power) * raa_gain * (dense.adjoint() * dense);
}

NoiseModel noise_variances(const RfParams& rf) {
  const double kt0 = kBoltzmann * kReferenceTemperature;
  return {kt0 * rf.noise_figure_trx * rf.bandwidth_hz, kt0 * rf.noise_figure_raa * rf.bandwidth_hz};
}

CVector sample_cn(double variance, int n, Rng& rng) {
  if (variance < 0.0)
    throw std::domain_error("sample_cn: negative variance");
  CVector out = CVector::Zero(n);
  if (variance == 0.0)
    return out;
  std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
  for (int i = 0; i < n; ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    out(i) = Complex(re, im);
  }
  return out;
}

}  // namespace raaloc
