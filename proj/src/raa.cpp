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

#include "raaloc/raa.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace raaloc {

namespace {

constexpr int kMinRegister = 2;
constexpr int kMaxRegister = 24;

void check_register_length(int length) {
  if (length < kMinRegister || length > kMaxRegister)
    throw std::invalid_argument("LFSR register length must be in [2, 24]");
}

std::uint32_t tap_mask(const FeedbackTaps& taps, int length) {
  std::uint32_t mask = 0;
  for (int t : taps.taps) {
    if (t < 1 || t > length)
      throw std::invalid_argument("LFSR tap outside the register");
    mask |= 1u << (t - 1);
  }
  if (!(mask & (1u << (length - 1))))
    throw std::invalid_argument("LFSR taps must include the register length");
  return mask;
}

// Window bit (t-1) holds a[n-t].
std::uint32_t initial_window(std::uint32_t seed, int length) {
  std::uint32_t window = 0;
  for (int t = 1; t <= length; ++t) {
    const std::uint32_t chip = (seed >> (length - t)) & 1u;
    window |= chip << (t - 1);
  }
  return window;
}

std::uint32_t advance(std::uint32_t window, std::uint32_t mask, std::uint32_t full) {
  const std::uint32_t next = static_cast<std::uint32_t>(__builtin_parity(window & mask));
  return ((window << 1) | next) & full;
}

std::uint64_t cycle_length(std::uint32_t mask, int length) {
  const std::uint32_t full = (length == 32) ? ~0u : ((1u << length) - 1u);
  const std::uint32_t start = initial_window(1u, length);
  const std::uint64_t limit = (std::uint64_t{1} << length) - 1;
  std::uint32_t w = start;
  for (std::uint64_t n = 1; n <= limit; ++n) {
    w = advance(w, mask, full);
    if (w == start)
      return n;
  }
  return 0;
}

const std::map<int, std::vector<int>>& default_tap_table() {
  static const std::map<int, std::vector<int>> table = {
      {5, {5, 3}},     {6, {6, 5}},          {7, {7, 6}},
      {8, {8, 6, 5, 4}}, {9, {9, 5}},        {10, {10, 7}},
      {11, {11, 9}},   {12, {12, 6, 4, 1}},  {13, {13, 4, 3, 1}},
  };
  return table;
}

}  // namespace

std::vector<double> PnSequence::phases() const {
  std::vector<double> out(chips.size());
  std::transform(chips.begin(), chips.end(), out.begin(),
                 [](std::uint8_t c) { return c ? kPi : 0.0; });
  return out;
}

std::vector<int> PnSequence::antipodal() const {
  std::vector<int> out(chips.size());
  std::transform(chips.begin(), chips.end(), out.begin(),
                 [](std::uint8_t c) { return c ? -1 : 1; });
  return out;
}

int FeedbackTaps::register_length() const {
  if (taps.empty())
    return 0;
  return *std::max_element(taps.begin(), taps.end());
}

FeedbackTaps default_taps(int register_length) {
  const auto& table = default_tap_table();
  const auto it = table.find(register_length);
  if (it == table.end())
    throw std::invalid_argument("no default taps for register length " +
                                std::to_string(register_length) + " (supported: 5..13)");
  return FeedbackTaps{it->second};
}

const std::vector<FeedbackTaps>& primitive_taps(int register_length) {
  check_register_length(register_length);
  static std::mutex mutex;
  static std::map<int, std::vector<FeedbackTaps>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(register_length);
  if (it != cache.end())
    return it->second;

  std::vector<FeedbackTaps> found;
  const std::uint64_t period = (std::uint64_t{1} << register_length) - 1;
  const std::uint32_t subsets = 1u << (register_length - 1);
  for (std::uint32_t s = 0; s < subsets; ++s) {
    const std::uint32_t mask = s | (1u << (register_length - 1));
    if (cycle_length(mask, register_length) != period)
      continue;
    FeedbackTaps taps;
    for (int t = register_length; t >= 1; --t)
      if (mask & (1u << (t - 1)))
        taps.taps.push_back(t);
    found.push_back(std::move(taps));
  }
  return cache.emplace(register_length, std::move(found)).first->second;
}

std::uint64_t msequence_count(int register_length) {
  check_register_length(register_length);
  std::uint64_t n = (std::uint64_t{1} << register_length) - 1;
  std::uint64_t phi = n;
  std::uint64_t rest = n;
  for (std::uint64_t p = 2; p * p <= rest; ++p) {
    if (rest % p != 0)
      continue;
    while (rest % p == 0)
      rest /= p;
    phi -= phi / p;
  }
  if (rest > 1)
    phi -= phi / rest;
  return phi / static_cast<std::uint64_t>(register_length);
}

PnSequence generate_msequence(int register_length, const FeedbackTaps& taps,
                              std::uint32_t seed_state) {
  check_register_length(register_length);
  if (taps.register_length() != register_length)
    throw std::invalid_argument("taps do not match the register length");
  const std::uint32_t full = (1u << register_length) - 1u;
  seed_state &= full;
  if (seed_state == 0)
    throw std::invalid_argument("LFSR seed state must be nonzero");
  const std::uint32_t mask = tap_mask(taps, register_length);
  const std::uint64_t period = (std::uint64_t{1} << register_length) - 1;
  if (cycle_length(mask, register_length) != period)
    throw std::invalid_argument("taps are not primitive: period is not 2^L - 1");

  PnSequence seq;
  seq.chips.reserve(period);
  for (int i = 0; i < register_length; ++i)
    seq.chips.push_back(static_cast<std::uint8_t>((seed_state >> i) & 1u));
  std::uint32_t window = 0;
  for (int t = 1; t <= register_length; ++t)
    window |= static_cast<std::uint32_t>(seq.chips[register_length - t]) << (t - 1);
  while (seq.chips.size() < period) {
    window = advance(window, mask, full);
    seq.chips.push_back(static_cast<std::uint8_t>(window & 1u));
  }
  return seq;
}

PnSequence id_sequence(int register_length, int taps_index, int length) {
  const auto& all = primitive_taps(register_length);
  if (taps_index < 0 || taps_index >= static_cast<int>(all.size()))
    throw std::invalid_argument("ID taps index " + std::to_string(taps_index) +
                                " out of range for register length " +
                                std::to_string(register_length) + " (" +
                                std::to_string(all.size()) + " sequences)");
  PnSequence full = generate_msequence(register_length, all[taps_index]);
  if (length < 1 || length > full.length())
    throw std::invalid_argument("ID length must be in [1, 2^L - 1]");
  full.chips.resize(length);
  return full;
}

Position Trajectory::at(double time_s) const {
  if (waypoints.empty())
    throw std::invalid_argument("trajectory has no waypoints");
  if (time_s <= waypoints.front().time_s)
    return waypoints.front().position;
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    const auto& a = waypoints[i - 1];
    const auto& b = waypoints[i];
    if (time_s <= b.time_s) {
      const double span = b.time_s - a.time_s;
      const double f = span > 0.0 ? (time_s - a.time_s) / span : 1.0;
      return {a.position.x + f * (b.position.x - a.position.x),
              a.position.z + f * (b.position.z - a.position.z)};
    }
  }
  return waypoints.back().position;
}

double Trajectory::duration() const {
  if (waypoints.empty())
    return 0.0;
  return waypoints.back().time_s - waypoints.front().time_s;
}

CVector backscatter(const CVector& z, double gain, double phase) {
  return std::polar(gain, phase) * z.conjugate();
}

double id_phase(const PnSequence& id, std::uint64_t cycle_offset, std::uint64_t symbol_index) {
  if (id.chips.empty())
    return 0.0;
  const auto k = static_cast<std::uint64_t>(id.chips.size());
  return id.chips[(symbol_index % k + cycle_offset % k) % k] ? kPi : 0.0;
}

double id_phase(const RaaNode& node, std::uint64_t symbol_index) {
  return id_phase(node.id, node.cycle_offset, symbol_index);
}

}  // namespace raaloc
