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

#ifndef RAALOC_ANALYSIS_HPP
#define RAALOC_ANALYSIS_HPP

#include <span>
#include <vector>

#include "raaloc/geometry.hpp"

// Closed-form convergence analytics of the iterative scheme. Reflected RAA
// noise is neglected here (sigma_j^2 ~ sigma_w^2), unlike the signal-level
// simulation in trx.
namespace raaloc::analysis {

// Per-direction maxima SNR_{j,max} = lambda_j^2 / sigma_w^2, non-increasing.
// Directions beyond maxima.size() have zero eigenvalue.
struct SnrSpectrum {
  std::vector<double> maxima;
  int elements = 1;  // N

  void validate() const;
};

struct SnrTrace {
  // per_direction[k-1][j] = SNR_j[k] for the listed directions.
  std::vector<std::vector<double>> per_direction;
  std::vector<double> decision;  // SNR_dec[k]

  int iterations() const { return static_cast<int>(decision.size()); }
};

// |x_j[0]|^2 = 1/N for every direction.
std::vector<double> uniform_fractions(int elements);

// SNR_j[1] = SNR_{j,max} |x_j[0]|^2 and
// SNR_j[k] = SNR_{j,max} (SNR_j[k-1] + 1) / (N + sum_i SNR_i[k-1]).
// initial_fractions has N entries summing to one (1e-9); only directions
// with non-zero maxima enter SNR_dec.
SnrTrace snr_recursion(const SnrSpectrum& spectrum, std::span<const double> initial_fractions,
                       int k_max);

// Power fractions |x_j[k]|^2 propagated directly (N entries per row);
// row k holds the fractions after iteration k, row 0 the initial ones.
std::vector<std::vector<double>> fraction_recursion(const SnrSpectrum& spectrum,
                                                    std::span<const double> initial_fractions,
                                                    int k_max);

// SNR_dec = (sum_j SNR_j / sqrt(SNR_{j,max}))^2 over non-null directions.
double decision_snr(std::span<const double> snr, std::span<const double> maxima);

// Positive root of x = S (x + 1) / (x + N).
double equilibrium_snr(double max_snr, int elements);

struct LinkBudget {
  double max_snr = 0.0;        // paraxial LOS, all power on the RAA
  double bootstrap_snr = 0.0;  // max_snr / N
};

// SNR_max = P_T g^2 N^2 M^2 G_A^2 G_RAA^2 lambda^4 / (sigma_w^2 (4 pi d)^4).
LinkBudget max_and_bootstrap_snr(const RfParams& rf, int trx_elements, int raa_elements,
                                 double distance);

// |<v1, v2>| for unit-norm vectors of equal length.
double correlation_coefficient(const CVector& v1, const CVector& v2);

// sin(pi x) / (pi x).
double sinc(double x);

// Tracking pays off iff rho > 1/N.
bool tracking_benefit(double rho, int elements);

// v < 2 d sqrt(6 (N - 1)) / (pi tau N sqrt(N)). The path-loss ratio between
// consecutive steps cancels out of the criterion, so it does not appear.
double max_tracking_speed(double distance, int elements, double step_interval);

}  // namespace raaloc::analysis

#endif
