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

#ifndef RAALOC_TRX_HPP
#define RAALOC_TRX_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "raaloc/channel.hpp"
#include "raaloc/raa.hpp"

namespace raaloc {

struct TrxConfig {
  double snr_threshold = 1000.0;             // eta_1, linear (30 dB)
  double ratio_threshold = 1.9952623149688795;  // eta_2, linear (3 dB)
  int max_iterations = 40;
  int aoa_oversampling = 1;
  bool channel_tracking = false;

  // Throws std::invalid_argument on eta_1 <= 0, eta_2 <= 1,
  // max_iterations < 2 or oversampling outside [1, 16].
  void validate() const;

  bool operator==(const TrxConfig&) const = default;
};

inline constexpr int kMaxAoaOversampling = 16;

struct InitRandom {};
struct InitPrevious {
  CVector beam;
};
using InitStrategy = std::variant<InitRandom, InitPrevious>;

// Unit-norm starting beamformer. Random draws i.i.d. CN entries; previous
// renormalizes the supplied vector.
CVector init_beamformer(const InitStrategy& strategy, int elements, Rng& rng);

// x[k] = conj(y[k]) / |y[k]|. Throws std::runtime_error("no received
// signal") for a zero vector.
CVector step_update(const CVector& y);

// gamma_k > eta_1 and gamma_k / gamma_km1 < eta_2, both strict.
bool detect(double gamma_k, double gamma_km1, const TrxConfig& config);

// Peak of the zero-padded DFT of conj(y) mapped through centered bins
// i' to asin((lambda / (2 spacing)) * 2 i' / N'), N' = N * oversampling.
// Bins outside the visible region are skipped; ties go to smaller |i'|.
double estimate_aoa(const CVector& y, double spacing, double wavelength, int oversampling);

// Planar arrays are first summed coherently over the orthogonal axis.
double estimate_aoa(const CVector& y, const ArrayGeometry& array, double wavelength,
                    int oversampling);

// u[k] = x^H[k-1] conj(y[k]).
Complex demodulate(const CVector& x_prev, const CVector& y);

// Removes the common phase of a BPSK packet: rotates by -arg(sum u^2) / 2.
std::vector<Complex> normalize_symbols(std::span<const Complex> symbols);

struct IdMatch {
  int index = -1;
  int lag = 0;
  double score = 0.0;  // signed, in [-1, 1]

  bool operator==(const IdMatch&) const = default;
};

// Hard-decides Re(symbol) >= 0 -> +1 and correlates against every codebook
// entry at every cyclic lag: symbol[k] ~ chip[(k + lag) mod K]. Returns the
// entry and lag of the largest |correlation|.
IdMatch correlate_id(std::span<const Complex> symbols, std::span<const PnSequence> codebook);

// Orthonormal columns spanning previously detected beamformers.
class DeflationBasis {
 public:
  explicit DeflationBasis(int elements = 0);

  int elements() const { return static_cast<int>(basis_.rows()); }
  int rank() const { return static_cast<int>(basis_.cols()); }
  bool empty() const { return basis_.cols() == 0; }
  const CMatrix& matrix() const { return basis_; }

  // Orthonormalizes against the current columns and appends. Throws
  // std::invalid_argument if the vector already lies in the span.
  void add(const CVector& v);

  // (I - B B^H) v
  CVector project_out(const CVector& v) const;
  // |B^H x|
  double leakage(const CVector& x) const;

 private:
  CMatrix basis_;
};

// (I - B B^H) conj(y) normalized. Throws std::runtime_error("no residual
// signal") when conj(y) lies inside span(B).
CVector deflate(const CVector& y, const DeflationBasis& basis);

// Everything between the transmitted beamformer x[k-1] and the received
// vector y[k]: channel, RAAs, noise.
class RoundTripLink {
 public:
  virtual ~RoundTripLink() = default;
  virtual int elements() const = 0;
  virtual CVector respond(const CVector& x, std::uint64_t symbol_index, Rng& rng) = 0;
};

// y = e^{j phi[k]} conj(A) conj(x) + n, n ~ CN(0, noise_variance I). With no
// ID the phase is zero.
class OperatorLink : public RoundTripLink {
 public:
  OperatorLink(CMatrix round_trip, double noise_variance, PnSequence id = {},
               std::uint64_t cycle_offset = 0);

  int elements() const override { return static_cast<int>(round_trip_.rows()); }
  CVector respond(const CVector& x, std::uint64_t symbol_index, Rng& rng) override;

 private:
  CMatrix round_trip_;
  double noise_variance_;
  PnSequence id_;
  std::uint64_t cycle_offset_;
};

struct Reflector {
  ChannelMatrix channel;
  double gain = 1.0;
  PnSequence id;
  std::uint64_t cycle_offset = 0;
};

// Signal-level model: every RAA receives sqrt(P_T) H x + eta, conjugates and
// modulates it, and the echoes superpose at the transceiver with its own
// noise: y = w + sum_p H_p^T r_p.
class BackscatterLink : public RoundTripLink {
 public:
  BackscatterLink(int elements, double tx_power, NoiseModel noise, std::vector<Reflector> reflectors,
                  bool raa_noise = true);

  int elements() const override { return elements_; }
  CVector respond(const CVector& x, std::uint64_t symbol_index, Rng& rng) override;

 private:
  int elements_;
  double tx_amplitude_;
  NoiseModel noise_;
  std::vector<Reflector> reflectors_;
  bool raa_noise_;
};

struct InterrogationRequest {
  ArrayGeometry array;
  double wavelength = 0.0;
  TrxConfig config;
  double noise_variance = 0.0;  // sigma_w^2 used to normalize gamma
  InitStrategy init = InitRandom{};
  std::vector<PnSequence> codebook;
  int id_symbols = 0;  // K exchanges with the frozen beamformer
  std::uint64_t first_symbol = 0;
};

struct InterrogationResult {
  bool detected = false;
  int detect_iteration = 0;
  CVector beamformer_at_detection;
  CVector final_beamformer;
  double aoa_estimate = 0.0;
  std::vector<double> snr_trace;  // gamma[k], linear, search then ID phase
  std::vector<Complex> demod_symbols;
  std::optional<IdMatch> matched_id;
  double max_basis_leakage = 0.0;
};

// One search: iterate until detection or max_iterations, then estimate the
// AoA and run the ID exchanges. With a non-empty basis every beamformer is
// kept orthogonal to it.
InterrogationResult run_interrogation(RoundTripLink& link, const InterrogationRequest& request,
                                      Rng& rng, const DeflationBasis* basis = nullptr);

// Repeated deflated searches until max_devices detections or a miss. When
// tracked beams are supplied, each search starts from the candidate with the
// largest component outside the current basis.
std::vector<InterrogationResult> interrogate_all(RoundTripLink& link,
                                                 const InterrogationRequest& request,
                                                 int max_devices,
                                                 std::span<const CVector> tracked_beams,
                                                 Rng& rng);

}  // namespace raaloc

#endif
