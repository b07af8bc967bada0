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

#include "raaloc/locengine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

namespace raaloc {

namespace {

enum SeedTag : std::uint64_t { kTagCycle = 1, kTagLink = 2, kTagChannel = 3 };

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Local angle at the RAA towards the anchor. Arrivals from behind are
// mirrored into the front half-plane, where a planar aperture sees the same
// phase progression.
double raa_arrival(const Pose& raa, const Position& anchor) {
  const double dx = anchor.x - raa.position.x;
  const double dz = anchor.z - raa.position.z;
  double psi = wrap_angle(raa.boresight - std::atan2(dz, dx));
  if (psi > kPi / 2.0)
    psi = kPi - psi;
  else if (psi < -kPi / 2.0)
    psi = -kPi - psi;
  return psi;
}

void strip_vectors(InterrogationResult& r) {
  r.beamformer_at_detection.resize(0);
  r.final_beamformer.resize(0);
  r.demod_symbols.clear();
  r.demod_symbols.shrink_to_fit();
}

}  // namespace

int Scenario::step_count() const {
  double longest = 0.0;
  for (const auto& raa : raas)
    longest = std::max(longest, raa.trajectory.duration());
  return static_cast<int>(std::floor(longest * update_rate_hz + 1e-9)) + 1;
}

int Scenario::id_length() const {
  int k = 0;
  for (const auto& raa : raas)
    k = std::max(k, raa.id.length());
  return k;
}

std::vector<PnSequence> Scenario::codebook() const {
  std::vector<PnSequence> out;
  out.reserve(raas.size());
  for (const auto& raa : raas)
    out.push_back(raa.id);
  return out;
}

void Scenario::validate() const {
  rf.validate();
  trx.validate();
  if (!(update_rate_hz > 0.0))
    throw std::invalid_argument("update rate must be positive");
  if (anchors.size() < 2)
    throw std::invalid_argument("at least two anchors are needed for a 2D fix");
  if (raas.empty())
    throw std::invalid_argument("scenario has no RAA");
  if (trials < 1)
    throw std::invalid_argument("trials must be at least 1");
  if (trace_trials < 0)
    throw std::invalid_argument("trace_trials must be non-negative");
  if (multipath.clusters < 0 || multipath.angle_spread < 0.0 || multipath.angle_spread > kPi / 2.0)
    throw std::invalid_argument("multipath: clusters >= 0 and angle spread in [0, pi/2] required");
  for (const auto& a : anchors)
    a.array.validate();
  for (const auto& r : raas) {
    r.geometry.validate();
    if (r.id.length() < 1)
      throw std::invalid_argument("RAA " + r.name + " has an empty ID");
    if (!(r.gain > 0.0))
      throw std::invalid_argument("RAA " + r.name + " gain must be positive");
    if (r.trajectory.waypoints.empty())
      throw std::invalid_argument("RAA " + r.name + " has no trajectory");
    for (std::size_t i = 1; i < r.trajectory.waypoints.size(); ++i)
      if (r.trajectory.waypoints[i].time_s < r.trajectory.waypoints[i - 1].time_s)
        throw std::invalid_argument("RAA " + r.name + " waypoint times must not decrease");
  }
  const double packet = id_length() * rf.symbol_time_s;
  if (update_rate_hz * packet > 1.0 + 1e-12)
    throw std::invalid_argument("packet duration K T exceeds the update interval 1/R");
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t s = splitmix64(base);
  for (std::uint64_t k : keys)
    s = splitmix64(s ^ splitmix64(k + 0x632be59bd9b4e019ULL));
  return s;
}

Position fuse_aoa_ls(std::span<const Position> anchors, std::span<const double> bearings) {
  if (anchors.size() != bearings.size())
    throw std::invalid_argument("fuse_aoa_ls: one bearing per anchor required");
  if (bearings.size() < 2)
    throw std::invalid_argument("underdetermined");

  bool crossing = false;
  for (std::size_t i = 0; i < bearings.size() && !crossing; ++i)
    for (std::size_t j = i + 1; j < bearings.size(); ++j)
      if (std::abs(std::sin(bearings[i] - bearings[j])) > std::sin(1e-6)) {
        crossing = true;
        break;
      }
  if (!crossing)
    throw std::domain_error("degenerate geometry");

  const auto n = static_cast<Eigen::Index>(bearings.size());
  Eigen::MatrixX2d a(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = std::sin(bearings[static_cast<std::size_t>(i)]);
    const double c = std::cos(bearings[static_cast<std::size_t>(i)]);
    const auto& p = anchors[static_cast<std::size_t>(i)];
    a(i, 0) = s;
    a(i, 1) = -c;
    b(i) = s * p.x - c * p.z;
  }
  const Eigen::Vector2d sol = a.colPivHouseholderQr().solve(b);
  return {sol(0), sol(1)};
}

TrialResult simulate_trial(const Scenario& scenario, std::uint64_t trial_seed,
                           const SimulationOptions& options) {
  scenario.validate();
  const auto& rf = scenario.rf;
  const double lambda = rf.wavelength();
  const NoiseModel noise = noise_variances(rf);
  const int steps = scenario.step_count();
  const auto n_anchors = scenario.anchors.size();
  const auto n_raas = scenario.raas.size();
  const std::vector<PnSequence> codebook = scenario.codebook();
  const auto symbols_per_step =
      static_cast<std::uint64_t>(std::llround(scenario.step_interval() / rf.symbol_time_s));

  // Free-running ID cycles start at an unknown offset in every trial.
  std::vector<std::uint64_t> offsets(n_raas);
  for (std::size_t p = 0; p < n_raas; ++p) {
    Rng rng(derive_seed(trial_seed, {kTagCycle, p}));
    const auto k = static_cast<std::uint64_t>(scenario.raas[p].id.length());
    offsets[p] = (scenario.raas[p].cycle_offset + rng() % k) % k;
  }

  // tracked[a][p]: last converged beamformer of anchor a towards RAA p.
  std::vector<std::vector<CVector>> tracked(n_anchors, std::vector<CVector>(n_raas));

  TrialResult out;
  out.per_raa.assign(n_raas, {});
  for (auto& v : out.per_raa)
    v.reserve(static_cast<std::size_t>(steps));

  for (int i = 0; i < steps; ++i) {
    const double t = i * scenario.step_interval();
    std::vector<Position> truth(n_raas);
    for (std::size_t p = 0; p < n_raas; ++p)
      truth[p] = scenario.raas[p].trajectory.at(t);

    std::vector<StepRecord> records(n_raas);
    for (std::size_t p = 0; p < n_raas; ++p) {
      records[p].step = i;
      records[p].time_s = t;
      records[p].truth = truth[p];
      records[p].observations.resize(n_anchors);
    }

    for (std::size_t a = 0; a < n_anchors; ++a) {
      const Anchor& anchor = scenario.anchors[a];
      std::vector<Reflector> reflectors;
      std::vector<std::size_t> visible;
      for (std::size_t p = 0; p < n_raas; ++p) {
        auto& obs = records[p].observations[a];
        obs.anchor = static_cast<int>(a);
        double departure = 0.0;
        try {
          departure = bearing(anchor.array.pose, truth[p]);
        } catch (const std::exception&) {
          continue;  // behind the anchor or on top of it
        }
        obs.visible = true;
        obs.true_aoa = departure;
        obs.distance = distance(anchor.array.pose.position, truth[p]);

        const RaaNode& node = scenario.raas[p];
        Pose raa_pose = node.geometry.pose;
        raa_pose.position = truth[p];
        const double arrival = raa_arrival(raa_pose, anchor.array.pose.position);
        ArrayGeometry raa_geom = node.geometry;
        raa_geom.pose = raa_pose;

        std::optional<ChannelMatrix> h;
        if (scenario.channel == ChannelMode::multipath) {
          Rng crng(derive_seed(trial_seed, {kTagChannel, static_cast<std::uint64_t>(i), a, p}));
          const PathSet paths =
              surrogate_paths(rf, obs.distance, departure, arrival, scenario.multipath, crng);
          h.emplace(multipath_channel(rf, anchor.array, raa_geom, paths, obs.distance, departure,
                                      arrival));
        } else {
          h.emplace(los_channel(rf, anchor.array, raa_geom, obs.distance, departure, arrival));
        }
        reflectors.push_back({std::move(*h), node.gain, node.id, offsets[p]});
        visible.push_back(p);
      }
      if (visible.empty())
        continue;

      BackscatterLink link(anchor.array.element_count(), rf.tx_power_w, noise,
                           std::move(reflectors), scenario.raa_noise);
      InterrogationRequest req;
      req.array = anchor.array;
      req.wavelength = lambda;
      req.config = scenario.trx;
      req.noise_variance = noise.trx_variance;
      req.codebook = codebook;
      req.id_symbols = scenario.id_length();
      req.first_symbol = static_cast<std::uint64_t>(i) * symbols_per_step;

      std::vector<CVector> beams;
      if (scenario.trx.channel_tracking)
        for (std::size_t p : visible)
          if (tracked[a][p].size() > 0)
            beams.push_back(tracked[a][p]);

      Rng rng(derive_seed(trial_seed, {kTagLink, static_cast<std::uint64_t>(i), a}));
      std::vector<InterrogationResult> found =
          interrogate_all(link, req, static_cast<int>(visible.size()), beams, rng);

      // Results are keyed by the matched ID; a duplicate match keeps the
      // stronger correlation.
      std::vector<int> owner(n_raas, -1);
      int miss = -1;
      for (std::size_t r = 0; r < found.size(); ++r) {
        const auto& res = found[r];
        if (!res.detected || !res.matched_id) {
          miss = static_cast<int>(r);
          continue;
        }
        const auto idx = static_cast<std::size_t>(res.matched_id->index);
        if (idx >= n_raas)
          continue;
        const int prev = owner[idx];
        if (prev < 0 ||
            std::abs(res.matched_id->score) >
                std::abs(found[static_cast<std::size_t>(prev)].matched_id->score))
          owner[idx] = static_cast<int>(r);
      }

      for (std::size_t p : visible) {
        auto& obs = records[p].observations[a];
        if (owner[p] >= 0) {
          obs.result = found[static_cast<std::size_t>(owner[p])];
          if (scenario.trx.channel_tracking)
            tracked[a][p] = obs.result.final_beamformer;
        } else {
          if (miss >= 0) {
            obs.result = found[static_cast<std::size_t>(miss)];
            obs.result.detected = false;
          }
          tracked[a][p].resize(0);
        }
        if (!options.keep_vectors)
          strip_vectors(obs.result);
      }
    }

    for (std::size_t p = 0; p < n_raas; ++p) {
      auto& rec = records[p];
      std::vector<Position> where;
      std::vector<double> bearings;
      for (const auto& obs : rec.observations) {
        if (!obs.visible || !obs.result.detected)
          continue;
        const auto& pose = scenario.anchors[static_cast<std::size_t>(obs.anchor)].array.pose;
        where.push_back(pose.position);
        bearings.push_back(global_bearing(pose, obs.result.aoa_estimate));
      }
      rec.bearings_used = static_cast<int>(bearings.size());
      if (bearings.size() >= 2) {
        try {
          rec.estimate = fuse_aoa_ls(where, bearings);
          rec.error = distance(*rec.estimate, rec.truth);
        } catch (const std::domain_error&) {
          rec.estimate.reset();
        }
      }
      out.per_raa[p].push_back(std::move(rec));
    }
  }
  return out;
}

std::vector<StepRecord> simulate_trajectory(const Scenario& scenario, int raa_index,
                                            std::uint64_t trial_seed,
                                            const SimulationOptions& options) {
  if (raa_index < 0 || raa_index >= static_cast<int>(scenario.raas.size()))
    throw std::out_of_range("simulate_trajectory: RAA index out of range");
  TrialResult all = simulate_trial(scenario, trial_seed, options);
  return std::move(all.per_raa[static_cast<std::size_t>(raa_index)]);
}

Ecdf::Ecdf(std::vector<double> samples) {
  if (samples.empty())
    throw std::invalid_argument("ecdf: no samples");
  for (double s : samples)
    if (std::isnan(s))
      throw std::invalid_argument("ecdf: NaN sample");
  std::sort(samples.begin(), samples.end());
  count_ = samples.size();
  const double n = static_cast<double>(count_);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (i + 1 < samples.size() && samples[i + 1] == samples[i])
      continue;
    values_.push_back(samples[i]);
    fractions_.push_back(static_cast<double>(i + 1) / n);
  }
  fractions_.back() = 1.0;
}

double Ecdf::at(double x) const {
  const auto it = std::upper_bound(values_.begin(), values_.end(), x);
  if (it == values_.begin())
    return 0.0;
  return fractions_[static_cast<std::size_t>(it - values_.begin()) - 1];
}

double Ecdf::quantile(double p) const {
  if (!(p > 0.0) || p > 1.0)
    throw std::invalid_argument("quantile: p must lie in (0, 1]");
  // Compare on counts to stay clear of rounding in the stored fractions.
  const double need = std::ceil(p * static_cast<double>(count_) - 1e-9);
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (std::round(fractions_[i] * static_cast<double>(count_)) >= need)
      return values_[i];
  return values_.back();
}

Ecdf ecdf(std::vector<double> samples) { return Ecdf(std::move(samples)); }

std::vector<double> MonteCarloResult::all_errors() const {
  std::vector<double> out;
  for (const auto& e : errors)
    out.insert(out.end(), e.begin(), e.end());
  return out;
}

unsigned resolve_threads(unsigned requested, int trials) {
  unsigned n = requested;
  if (n == 0) {
    n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("RAALOC_THREADS")) {
      char* end = nullptr;
      const long cap = std::strtol(env, &end, 10);
      if (end != env && *end == '\0' && cap > 0)
        n = std::min(n, static_cast<unsigned>(cap));
    }
  }
  return std::max(1u, std::min(n, static_cast<unsigned>(std::max(trials, 1))));
}

MonteCarloResult monte_carlo(const Scenario& scenario, unsigned threads,
                             const SimulationOptions& options) {
  scenario.validate();
  const auto trials = static_cast<std::size_t>(scenario.trials);
  MonteCarloResult mc;
  mc.trials.resize(trials);
  mc.threads_used = resolve_threads(threads, scenario.trials);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= trials)
        return;
      try {
        mc.trials[t] = simulate_trial(scenario, derive_seed(scenario.master_seed, {t}), options);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure)
          failure = std::current_exception();
        next.store(trials);
      }
    }
  };
  if (mc.threads_used == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < mc.threads_used; ++w)
      pool.emplace_back(worker);
    for (auto& th : pool)
      th.join();
  }
  if (failure)
    std::rethrow_exception(failure);

  const auto n_anchors = scenario.anchors.size();
  const auto n_raas = scenario.raas.size();
  mc.errors.assign(n_raas, {});
  mc.outages.assign(n_raas, 0);
  mc.iterations.assign(n_anchors, std::vector<std::vector<int>>(n_raas));
  mc.misses.assign(n_anchors, std::vector<int>(n_raas, 0));
  for (const auto& trial : mc.trials) {
    for (std::size_t p = 0; p < n_raas; ++p) {
      for (const auto& rec : trial.per_raa[p]) {
        if (rec.error)
          mc.errors[p].push_back(*rec.error);
        else
          ++mc.outages[p];
        for (const auto& obs : rec.observations) {
          if (!obs.visible)
            continue;
          const auto a = static_cast<std::size_t>(obs.anchor);
          if (obs.result.detected)
            mc.iterations[a][p].push_back(obs.result.detect_iteration);
          else
            ++mc.misses[a][p];
        }
      }
    }
  }
  return mc;
}

double median(std::vector<double> values) {
  if (values.empty())
    throw std::invalid_argument("median: no samples");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1)
    return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace raaloc
