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

#ifndef RAALOC_LOCENGINE_HPP
#define RAALOC_LOCENGINE_HPP

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "raaloc/channel.hpp"
#include "raaloc/raa.hpp"
#include "raaloc/trx.hpp"

namespace raaloc {

struct Anchor {
  std::string name;
  ArrayGeometry array;

  bool operator==(const Anchor&) const = default;
};

enum class ChannelMode { free_space, multipath };

struct Scenario {
  RfParams rf;
  std::vector<Anchor> anchors;
  std::vector<RaaNode> raas;
  TrxConfig trx;
  double update_rate_hz = 10.0;
  ChannelMode channel = ChannelMode::free_space;
  MultipathParams multipath;
  int trials = 100;
  std::uint64_t master_seed = 1;
  bool raa_noise = true;
  int trace_trials = 1;  // trials whose gamma traces go to snr_traces.csv

  double step_interval() const { return 1.0 / update_rate_hz; }
  // Steps at t = i * tau covering the longest trajectory.
  int step_count() const;
  // Longest ID among the RAAs (the K exchanged after each detection).
  int id_length() const;
  std::vector<PnSequence> codebook() const;

  // Throws std::invalid_argument on broken invariants: fewer than two
  // anchors, no RAA, a packet K T longer than the update interval, or
  // invalid nested parameters.
  void validate() const;

  bool operator==(const Scenario&) const = default;
};

struct AnchorObservation {
  int anchor = 0;
  bool visible = false;       // inside the anchor's field of view
  double true_aoa = 0.0;      // local angle, rad
  double distance = 0.0;      // m
  InterrogationResult result;
};

struct StepRecord {
  int step = 0;
  double time_s = 0.0;
  Position truth;
  std::vector<AnchorObservation> observations;  // one per anchor
  std::optional<Position> estimate;
  std::optional<double> error;  // m
  int bearings_used = 0;
};

// Per-RAA step records of one Monte Carlo trial.
struct TrialResult {
  std::vector<std::vector<StepRecord>> per_raa;
};

// Counter-based seed derivation (splitmix64 chain).
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> keys);

// Least-squares intersection of bearing lines
// sin(t) x - cos(t) z = sin(t) a_x - cos(t) a_z with t the global bearing.
// Throws std::invalid_argument("underdetermined") below two bearings and
// std::domain_error("degenerate geometry") when all lines are parallel.
Position fuse_aoa_ls(std::span<const Position> anchors, std::span<const double> bearings);

struct SimulationOptions {
  bool keep_vectors = false;  // keep beamformers and demodulated symbols
};

// All RAAs of one trial, stepping along the trajectories.
TrialResult simulate_trial(const Scenario& scenario, std::uint64_t trial_seed,
                           const SimulationOptions& options = {});

std::vector<StepRecord> simulate_trajectory(const Scenario& scenario, int raa_index,
                                            std::uint64_t trial_seed,
                                            const SimulationOptions& options = {});

class Ecdf {
 public:
  explicit Ecdf(std::vector<double> samples);

  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& fractions() const { return fractions_; }
  std::size_t sample_count() const { return count_; }

  // Fraction of samples <= x.
  double at(double x) const;
  // Smallest sample value v with at(v) >= p, p in (0, 1].
  double quantile(double p) const;

 private:
  std::vector<double> values_;
  std::vector<double> fractions_;
  std::size_t count_ = 0;
};

// Throws std::invalid_argument for an empty sample set.
Ecdf ecdf(std::vector<double> samples);

struct MonteCarloResult {
  std::vector<TrialResult> trials;
  std::vector<std::vector<double>> errors;  // [raa] fused-position errors, m
  std::vector<int> outages;                 // [raa] steps without a fix
  // [anchor][raa] detection iteration of every detected interrogation.
  std::vector<std::vector<std::vector<int>>> iterations;
  // [anchor][raa] interrogations without detection.
  std::vector<std::vector<int>> misses;
  unsigned threads_used = 1;

  std::vector<double> all_errors() const;
};

// Worker count: min(hardware threads, RAALOC_THREADS if set, trials) when
// requested == 0.
unsigned resolve_threads(unsigned requested, int trials);

MonteCarloResult monte_carlo(const Scenario& scenario, unsigned threads = 0,
                             const SimulationOptions& options = {});

double median(std::vector<double> values);

}  // namespace raaloc

#endif
