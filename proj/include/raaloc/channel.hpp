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

#ifndef RAALOC_CHANNEL_HPP
#define RAALOC_CHANNEL_HPP

#include <random>
#include <vector>

#include "raaloc/geometry.hpp"

namespace raaloc {

using Rng = std::mt19937_64;

// One plane-wave component between the transceiver and the RAA. The gain
// multiplies the unnormalized outer product u~(arrival) v~^T(departure).
struct PathComponent {
  Complex gain;
  double departure = 0.0;  // at the transceiver, local angle
  double arrival = 0.0;    // at the RAA, local angle

  bool operator==(const PathComponent&) const = default;
};

struct PathSet {
  std::vector<PathComponent> paths;
  bool los = true;
  double k_factor = 0.0;  // linear, LOS power over NLOS power
};

// Parameters of the clustered Rician surrogate used in place of tabulated
// CDL profiles.
struct MultipathParams {
  int clusters = 4;
  double angle_spread = kPi / 3.0;  // NLOS angles uniform in [-spread, spread]
  double k_factor_db = 13.0;

  bool operator==(const MultipathParams&) const = default;
};

// M x N matrix (RAA elements x transceiver elements) kept in factored form
// H = R diag(g) T^T where the columns of R and T are the unnormalized array
// responses of each path. Products cost O(P (M + N)).
class ChannelMatrix {
 public:
  ChannelMatrix(const ArrayGeometry& trx, const ArrayGeometry& raa, double wavelength,
                const PathSet& paths, double distance, double departure, double arrival);

  int rows() const { return static_cast<int>(raa_responses_.rows()); }
  int cols() const { return static_cast<int>(trx_responses_.rows()); }
  int path_count() const { return static_cast<int>(gains_.size()); }

  CVector apply(const CVector& x) const;            // H x
  CVector apply_transpose(const CVector& r) const;  // H^T r
  CMatrix dense() const;

  double distance() const { return distance_; }
  double departure() const { return departure_; }
  double arrival() const { return arrival_; }

 private:
  CVector gains_;
  CMatrix raa_responses_;  // M x P
  CMatrix trx_responses_;  // N x P
  double distance_;
  double departure_;
  double arrival_;
};

struct NoiseModel {
  double trx_variance = 0.0;  // sigma_w^2, W
  double raa_variance = 0.0;  // sigma_eta^2, W
};

// Free-space amplitude sqrt(G_A G_RAA) lambda / (4 pi d) of one path.
double free_space_amplitude(const RfParams& rf, double distance);

ChannelMatrix los_channel(const RfParams& rf, const ArrayGeometry& trx, const ArrayGeometry& raa,
                          double distance, double departure, double arrival);

ChannelMatrix multipath_channel(const RfParams& rf, const ArrayGeometry& trx,
                                const ArrayGeometry& raa, const PathSet& paths, double distance,
                                double departure, double arrival);

// LOS path carrying K/(K+1) of the free-space power plus equal-power NLOS
// clusters with uniform phases and angles.
PathSet surrogate_paths(const RfParams& rf, double distance, double departure, double arrival,
                        const MultipathParams& params, Rng& rng);

// A = sqrt(P_T) g H^H H.
CMatrix round_trip_operator(const ChannelMatrix& h, double tx_power, double raa_gain);

NoiseModel noise_variances(const RfParams& rf);

// n i.i.d. CN(0, variance) samples.
CVector sample_cn(double variance, int n, Rng& rng);

}  // namespace raaloc

#endif
