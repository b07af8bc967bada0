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

#include "raaloc/trx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace raaloc {

void TrxConfig::validate() const {
  if (!(snr_threshold > 0.0))
    throw std::invalid_argument("TrxConfig: snr_threshold must be positive");
  if (!(ratio_threshold > 1.0))
    throw std::invalid_argument("TrxConfig: ratio_threshold must exceed 1");
  if (max_iterations < 2)
    throw std::invalid_argument("TrxConfig: max_iterations must be at least 2");
  if (aoa_oversampling < 1 || aoa_oversampling > kMaxAoaOversampling)
    throw std::invalid_argument("TrxConfig: aoa_oversampling must be in [1, 16]");
}

CVector init_beamformer(const InitStrategy& strategy, int elements, Rng& rng) {
  if (elements < 1)
    throw std::invalid_argument("init_beamformer: need at least one element");
  if (const auto* prev = std::get_if<InitPrevious>(&strategy)) {
    if (prev->beam.size() != elements)
      throw std::invalid_argument("init_beamformer: previous beam has the wrong length");
    const double norm = prev->beam.norm();
    if (!(norm > 0.0))
      throw std::invalid_argument("init_beamformer: previous beam is zero");
    return prev->beam / norm;
  }
  CVector x = sample_cn(1.0, elements, rng);
  const double norm = x.norm();
  if (!(norm > 0.0)) {
    x = CVector::Ones(elements);
    return x / std::sqrt(static_cast<double>(elements));
  }
  return x / norm;
}

CVector step_update(const CVector& y) {
  const double norm = y.norm();
  if (!(norm > 0.0))
    throw std::runtime_error("no received signal");
  return y.conjugate() / norm;
}

bool detect(double gamma_k, double gamma_km1, const TrxConfig& config) {
  return gamma_k > config.snr_threshold && gamma_k / gamma_km1 < config.ratio_threshold;
}

double estimate_aoa(const CVector& y, double spacing, double wavelength, int oversampling) {
  if (y.size() == 0)
    throw std::invalid_argument("estimate_aoa: empty vector");
  if (oversampling < 1)
    throw std::invalid_argument("estimate_aoa: oversampling must be positive");
  if (!(spacing > 0.0) || !(wavelength > 0.0))
    throw std::invalid_argument("estimate_aoa: spacing and wavelength must be positive");

  const int n = static_cast<int>(y.size());
  const int bins = n * oversampling;
  const int lowest = -(bins / 2);
  const int highest = (bins % 2 == 0) ? bins / 2 - 1 : bins / 2;
  const double scale = wavelength / (2.0 * spacing);
  const CVector w = y.conjugate();

  double best_power = -1.0;
  int best_bin = 0;
  auto visit = [&](int bin) {
    const double s = scale * 2.0 * bin / bins;
    if (std::abs(s) > 1.0)
      return;
    const Complex step = std::polar(1.0, -2.0 * kPi * bin / bins);
    Complex twiddle(1.0, 0.0);
    Complex q(0.0, 0.0);
    for (int k = 0; k < n; ++k) {
      q += w(k) * twiddle;
      twiddle *= step;
    }
    const double power = std::norm(q);
    if (power > best_power) {
      best_power = power;
      best_bin = bin;
    }
  };
  visit(0);
  for (int m = 1; m <= std::max(-lowest, highest); ++m) {
    if (m <= highest)
      visit(m);
    if (-m >= lowest)
      visit(-m);
  }
  return std::asin(std::clamp(scale * 2.0 * best_bin / bins, -1.0, 1.0));
}

double estimate_aoa(const CVector& y, const ArrayGeometry& array, double wavelength,
                    int oversampling) {
  if (y.size() != array.element_count())
    throw std::invalid_argument("estimate_aoa: vector length does not match the array");
  if (array.is_linear())
    return estimate_aoa(y, array.spacing_m, wavelength, oversampling);
  const auto& planar = std::get<PlanarLayout>(array.layout);
  CVector collapsed = CVector::Zero(planar.nx);
  for (int ix = 0; ix < planar.nx; ++ix)
    for (int iy = 0; iy < planar.ny; ++iy)
      collapsed(ix) += y(ix * planar.ny + iy);
  return estimate_aoa(collapsed, array.spacing_m, wavelength, oversampling);
}

Complex demodulate(const CVector& x_prev, const CVector& y) {
  if (x_prev.size() != y.size())
    throw std::invalid_argument("demodulate: length mismatch");
  return x_prev.dot(y.conjugate());
}

std::vector<Complex> normalize_symbols(std::span<const Complex> symbols) {
  Complex squared(0.0, 0.0);
  for (const auto& u : symbols)
    squared += u * u;
  const double reference = squared == Complex(0.0, 0.0) ? 0.0 : std::arg(squared) / 2.0;
  const Complex rotation = std::polar(1.0, -reference);
  std::vector<Complex> out(symbols.begin(), symbols.end());
  for (auto& u : out)
    u *= rotation;
  return out;
}

IdMatch correlate_id(std::span<const Complex> symbols, std::span<const PnSequence> codebook) {
  if (codebook.empty())
    throw std::invalid_argument("correlate_id: empty codebook");
  std::vector<int> hard(symbols.size());
  std::transform(symbols.begin(), symbols.end(), hard.begin(),
                 [](const Complex& u) { return u.real() >= 0.0 ? 1 : -1; });

  IdMatch best;
  double best_abs = -1.0;
  for (std::size_t index = 0; index < codebook.size(); ++index) {
    const auto chips = codebook[index].antipodal();
    const int k = static_cast<int>(chips.size());
    if (k == 0)
      throw std::invalid_argument("correlate_id: empty codebook entry");
    if (hard.size() < chips.size())
      throw std::invalid_argument("correlate_id: fewer symbols than the ID length");
    for (int lag = 0; lag < k; ++lag) {
      long sum = 0;
      for (std::size_t s = 0; s < hard.size(); ++s)
        sum += hard[s] * chips[(s + static_cast<std::size_t>(lag)) % chips.size()];
      const double corr = static_cast<double>(sum) / static_cast<double>(hard.size());
      if (std::abs(corr) > best_abs) {
        best_abs = std::abs(corr);
        best = {static_cast<int>(index), lag, corr};
      }
    }
  }
  return best;
}

DeflationBasis::DeflationBasis(int elements) : basis_(elements, 0) {}

CVector DeflationBasis::project_out(const CVector& v) const {
  if (empty())
    return v;
  // Two passes keep the residual orthogonal when v lies mostly in the span.
  CVector r = v - basis_ * (basis_.adjoint() * v);
  r -= basis_ * (basis_.adjoint() * r);
  return r;
}

double DeflationBasis::leakage(const CVector& x) const {
  if (empty())
    return 0.0;
  return (basis_.adjoint() * x).norm();
}

void DeflationBasis::add(const CVector& v) {
  if (v.size() != basis_.rows())
    throw std::invalid_argument("DeflationBasis: vector length mismatch");
  const CVector r = project_out(v);
  const double norm = r.norm();
  if (!(norm > 1e-12 * std::max(1.0, v.norm())))
    throw std::invalid_argument("DeflationBasis: vector lies in the current span");
  basis_.conservativeResize(Eigen::NoChange, basis_.cols() + 1);
  basis_.col(basis_.cols() - 1) = r / norm;
}

CVector deflate(const CVector& y, const DeflationBasis& basis) {
  if (basis.empty())
    return step_update(y);
  if (y.size() != basis.elements())
    throw std::invalid_argument("deflate: length mismatch");
  const CVector r = basis.project_out(y.conjugate());
  const double norm = r.norm();
  if (!(norm > 1e-14 * y.norm()) || !(norm > 0.0))
    throw std::runtime_error("no residual signal");
  return r / norm;
}

OperatorLink::OperatorLink(CMatrix round_trip, double noise_variance, PnSequence id,
                           std::uint64_t cycle_offset)
    : round_trip_(std::move(round_trip)),
      noise_variance_(noise_variance),
      id_(std::move(id)),
      cycle_offset_(cycle_offset) {
  if (round_trip_.rows() != round_trip_.cols() || round_trip_.rows() == 0)
    throw std::invalid_argument("OperatorLink: round-trip operator must be square");
  if (noise_variance_ < 0.0)
    throw std::invalid_argument("OperatorLink: negative noise variance");
}

CVector OperatorLink::respond(const CVector& x, std::uint64_t symbol_index, Rng& rng) {
  const double phase = id_phase(id_, cycle_offset_, symbol_index);
  CVector y = (std::polar(1.0, -phase) * (round_trip_ * x)).conjugate();
  if (noise_variance_ > 0.0)
    y += sample_cn(noise_variance_, elements(), rng);
  return y;
}

BackscatterLink::BackscatterLink(int elements, double tx_power, NoiseModel noise,
                                 std::vector<Reflector> reflectors, bool raa_noise)
    : elements_(elements),
      tx_amplitude_(std::sqrt(tx_power)),
      noise_(noise),
      reflectors_(std::move(reflectors)),
      raa_noise_(raa_noise) {
  for (const auto& r : reflectors_)
    if (r.channel.cols() != elements_)
      throw std::invalid_argument("BackscatterLink: channel width does not match the array");
}

CVector BackscatterLink::respond(const CVector& x, std::uint64_t symbol_index, Rng& rng) {
  CVector y = sample_cn(noise_.trx_variance, elements_, rng);
  for (const auto& reflector : reflectors_) {
    CVector z = tx_amplitude_ * reflector.channel.apply(x);
    if (raa_noise_)
      z += sample_cn(noise_.raa_variance, static_cast<int>(z.size()), rng);
    const double phase = id_phase(reflector.id, reflector.cycle_offset, symbol_index);
    y += reflector.channel.apply_transpose(backscatter(z, reflector.gain, phase));
  }
  return y;
}

namespace {

CVector start_vector(const InterrogationRequest& request, int n, Rng& rng,
                     const DeflationBasis* basis) {
  CVector x = init_beamformer(request.init, n, rng);
  if (!basis || basis->empty())
    return x;
  for (int attempt = 0; attempt < 8; ++attempt) {
    const CVector r = basis->project_out(x);
    const double norm = r.norm();
    if (norm > 1e-6)
      return r / norm;
    x = init_beamformer(InitRandom{}, n, rng);
  }
  throw std::runtime_error("no residual signal");
}

}  // namespace

InterrogationResult run_interrogation(RoundTripLink& link, const InterrogationRequest& request,
                                      Rng& rng, const DeflationBasis* basis) {
  request.config.validate();
  if (!(request.noise_variance > 0.0))
    throw std::invalid_argument("run_interrogation: noise variance must be positive");
  const int n = link.elements();
  if (request.array.element_count() != n)
    throw std::invalid_argument("run_interrogation: array does not match the link");
  if (basis && !basis->empty() && basis->elements() != n)
    throw std::invalid_argument("run_interrogation: basis does not match the link");

  InterrogationResult result;
  const bool deflating = basis && !basis->empty();
  CVector x = start_vector(request, n, rng, basis);
  if (deflating)
    result.max_basis_leakage = basis->leakage(x);

  const auto& cfg = request.config;
  result.snr_trace.reserve(static_cast<std::size_t>(cfg.max_iterations + request.id_symbols));
  double gamma_prev = 0.0;
  for (int k = 1; k <= cfg.max_iterations; ++k) {
    const CVector y = link.respond(x, request.first_symbol + static_cast<std::uint64_t>(k - 1), rng);
    const double gamma = y.squaredNorm() / request.noise_variance;
    result.snr_trace.push_back(gamma);
    x = deflating ? deflate(y, *basis) : step_update(y);
    if (deflating)
      result.max_basis_leakage = std::max(result.max_basis_leakage, basis->leakage(x));
    if (k >= 2 && detect(gamma, gamma_prev, cfg)) {
      result.detected = true;
      result.detect_iteration = k;
      break;
    }
    gamma_prev = gamma;
  }
  result.final_beamformer = x;
  if (!result.detected)
    return result;

  result.beamformer_at_detection = x;
  result.aoa_estimate =
      estimate_aoa(x.conjugate(), request.array, request.wavelength, cfg.aoa_oversampling);

  const std::uint64_t id_start =
      request.first_symbol + static_cast<std::uint64_t>(result.detect_iteration);
  result.demod_symbols.reserve(static_cast<std::size_t>(request.id_symbols));
  for (int j = 0; j < request.id_symbols; ++j) {
    const CVector y = link.respond(x, id_start + static_cast<std::uint64_t>(j), rng);
    result.snr_trace.push_back(y.squaredNorm() / request.noise_variance);
    result.demod_symbols.push_back(demodulate(x, y));
  }
  if (!request.codebook.empty() && request.id_symbols > 0) {
    const auto normalized = normalize_symbols(result.demod_symbols);
    result.matched_id = correlate_id(normalized, request.codebook);
  }
  return result;
}

std::vector<InterrogationResult> interrogate_all(RoundTripLink& link,
                                                 const InterrogationRequest& request,
                                                 int max_devices,
                                                 std::span<const CVector> tracked_beams,
                                                 Rng& rng) {
  std::vector<InterrogationResult> found;
  DeflationBasis basis(link.elements());
  std::uint64_t next_symbol = request.first_symbol;
  for (int search = 0; search < max_devices; ++search) {
    InterrogationRequest req = request;
    req.init = InitRandom{};
    double best = 0.5;
    for (const auto& beam : tracked_beams) {
      if (beam.size() != link.elements() || !(beam.norm() > 0.0))
        continue;
      const double residual = basis.project_out(beam / beam.norm()).norm();
      if (residual > best) {
        best = residual;
        req.init = InitPrevious{beam};
      }
    }
    // The symbol clock keeps running across searches.
    req.first_symbol = next_symbol;
    InterrogationResult r = run_interrogation(link, req, rng, &basis);
    next_symbol += r.snr_trace.size();
    const bool detected = r.detected;
    found.push_back(std::move(r));
    if (!detected)
      break;
    try {
      basis.add(found.back().beamformer_at_detection);
    } catch (const std::invalid_argument&) {
      break;
    }
  }
  return found;
}

}  // namespace raaloc
