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

#include "raaloc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "raaloc/channel.hpp"

namespace raaloc::analysis {

namespace {

void check_fractions(std::span<const double> fractions, int elements) {
  if (static_cast<int>(fractions.size()) != elements)
    throw std::invalid_argument("initial fractions must have one entry per element");
  double sum = 0.0;
  for (double f : fractions) {
    if (f < 0.0)
      throw std::invalid_argument("initial fractions must be non-negative");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("initial fractions must sum to one");
}

}  // namespace

void SnrSpectrum::validate() const {
  if (elements < 1)
    throw std::invalid_argument("SnrSpectrum: N must be at least 1");
  if (static_cast<int>(maxima.size()) > elements)
    throw std::invalid_argument("SnrSpectrum: more directions than elements");
  for (std::size_t j = 0; j < maxima.size(); ++j) {
    if (!(maxima[j] >= 0.0))
      throw std::invalid_argument("SnrSpectrum: maxima must be non-negative");
    if (j > 0 && maxima[j] > maxima[j - 1])
      throw std::invalid_argument("SnrSpectrum: maxima must be non-increasing");
  }
}

std::vector<double> uniform_fractions(int elements) {
  if (elements < 1)
    throw std::invalid_argument("uniform_fractions: N must be at least 1");
  return std::vector<double>(static_cast<std::size_t>(elements), 1.0 / elements);
}

double decision_snr(std::span<const double> snr, std::span<const double> maxima) {
  double acc = 0.0;
  for (std::size_t j = 0; j < maxima.size() && j < snr.size(); ++j)
    if (maxima[j] > 0.0)
      acc += snr[j] / std::sqrt(maxima[j]);
  return acc * acc;
}

SnrTrace snr_recursion(const SnrSpectrum& spectrum, std::span<const double> initial_fractions,
                       int k_max) {
  spectrum.validate();
  check_fractions(initial_fractions, spectrum.elements);
  if (k_max < 1)
    throw std::invalid_argument("snr_recursion: k_max must be at least 1");

  const auto& maxima = spectrum.maxima;
  const double n = static_cast<double>(spectrum.elements);
  SnrTrace trace;
  std::vector<double> current(maxima.size());
  for (std::size_t j = 0; j < maxima.size(); ++j)
    current[j] = maxima[j] * initial_fractions[j];

  for (int k = 1; k <= k_max; ++k) {
    if (k > 1) {
      const double total = std::accumulate(current.begin(), current.end(), 0.0);
      std::vector<double> next(maxima.size());
      for (std::size_t j = 0; j < maxima.size(); ++j)
        next[j] = maxima[j] * (current[j] + 1.0) / (n + total);
      current = std::move(next);
    }
    trace.per_direction.push_back(current);
    trace.decision.push_back(decision_snr(current, maxima));
  }
  return trace;
}

std::vector<std::vector<double>> fraction_recursion(const SnrSpectrum& spectrum,
                                                    std::span<const double> initial_fractions,
                                                    int k_max) {
  spectrum.validate();
  check_fractions(initial_fractions, spectrum.elements);
  const auto n = static_cast<std::size_t>(spectrum.elements);
  std::vector<std::vector<double>> rows;
  rows.emplace_back(initial_fractions.begin(), initial_fractions.end());
  for (int k = 1; k <= k_max; ++k) {
    const auto& prev = rows.back();
    std::vector<double> next(n);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double s = j < spectrum.maxima.size() ? spectrum.maxima[j] : 0.0;
      next[j] = s * prev[j] + 1.0;
      total += next[j];
    }
    for (auto& f : next)
      f /= total;
    rows.push_back(std::move(next));
  }
  return rows;
}

double equilibrium_snr(double max_snr, int elements) {
  if (!(max_snr > 0.0) || elements < 1)
    throw std::invalid_argument("equilibrium_snr: need S > 0 and N >= 1");
  const double b = max_snr - elements;
  const double disc = std::sqrt(b * b + 4.0 * max_snr);
  // Avoid cancellation when S << N.
  if (b >= 0.0)
    return (b + disc) / 2.0;
  return 2.0 * max_snr / (disc - b);
}

LinkBudget max_and_bootstrap_snr(const RfParams& rf, int trx_elements, int raa_elements,
                                 double distance) {
  rf.validate();
  if (trx_elements < 1 || raa_elements < 1 || !(distance > 0.0))
    throw std::invalid_argument("max_and_bootstrap_snr: inputs must be positive");
  const double noise = noise_variances(rf).trx_variance;
  const double lambda = rf.wavelength();
  const double n = trx_elements;
  const double m = raa_elements;
  const double g2 = rf.raa_gain * rf.raa_gain;
  const double ga = rf.element_gain_trx;
  const double gr = rf.element_gain_raa;
  const double loss = std::pow(4.0 * kPi * distance, 4);
  LinkBudget out;
  out.max_snr = rf.tx_power_w * g2 * n * n * m * m * ga * ga * gr * gr * std::pow(lambda, 4) /
                (noise * loss);
  out.bootstrap_snr = out.max_snr / n;
  return out;
}

double correlation_coefficient(const CVector& v1, const CVector& v2) {
  if (v1.size() != v2.size())
    throw std::invalid_argument("correlation_coefficient: length mismatch");
  return std::min(1.0, std::abs(v1.dot(v2)));
}

double sinc(double x) {
  if (x == 0.0)
    return 1.0;
  const double px = kPi * x;
  return std::sin(px) / px;
}

bool tracking_benefit(double rho, int elements) {
  if (elements < 1)
    throw std::invalid_argument("tracking_benefit: N must be at least 1");
  return rho > 1.0 / elements;
}

double max_tracking_speed(double distance, int elements, double step_interval) {
  if (!(distance > 0.0) || elements < 1 || !(step_interval > 0.0))
    throw std::invalid_argument("max_tracking_speed: inputs must be positive");
  const double n = elements;
  return 2.0 * distance * std::sqrt(6.0 * (n - 1.0)) / (kPi * step_interval * n * std::sqrt(n));
}

}  // namespace raaloc::analysis
