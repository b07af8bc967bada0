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

#ifndef RAALOC_RAA_HPP
#define RAALOC_RAA_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "raaloc/geometry.hpp"

namespace raaloc {

// Binary chips b[k] in {0, 1} mapped antipodally to phases pi * b[k].
struct PnSequence {
  std::vector<std::uint8_t> chips;

  int length() const { return static_cast<int>(chips.size()); }
  std::vector<double> phases() const;
  // +1 for chip 0, -1 for chip 1.
  std::vector<int> antipodal() const;

  bool operator==(const PnSequence&) const = default;
};

// Feedback taps of a Fibonacci LFSR given as exponents of the feedback
// polynomial; the highest tap is the register length. Recurrence:
// a[n] = xor over t in taps of a[n - t].
struct FeedbackTaps {
  std::vector<int> taps;

  int register_length() const;
  bool operator==(const FeedbackTaps&) const = default;
};

// Default primitive taps for register lengths 5..13.
FeedbackTaps default_taps(int register_length);

// All feedback polynomials of the given degree that yield a maximal-length
// sequence, in a fixed enumeration order. Computed on first use and cached.
const std::vector<FeedbackTaps>& primitive_taps(int register_length);

// Number of distinct maximal-length sequences phi(2^L - 1) / L.
std::uint64_t msequence_count(int register_length);

// One period (2^L - 1 chips). seed_state holds the first L chips (bit i is
// chip i) and must be nonzero. Throws std::invalid_argument when the taps
// do not produce the full period.
PnSequence generate_msequence(int register_length, const FeedbackTaps& taps,
                              std::uint32_t seed_state = 1);

// First `length` chips of the maximal-length sequence produced by the
// taps_index-th primitive polynomial of the register length. Used for IDs
// whose packet is shorter than a full period.
PnSequence id_sequence(int register_length, int taps_index, int length);

struct Waypoint {
  double time_s = 0.0;
  Position position;

  bool operator==(const Waypoint&) const = default;
};

// Timestamped 2D track; positions between waypoints are linearly
// interpolated and clamped at both ends.
struct Trajectory {
  std::vector<Waypoint> waypoints;

  Position at(double time_s) const;
  double duration() const;

  bool operator==(const Trajectory&) const = default;
};

struct RaaNode {
  std::string name;
  ArrayGeometry geometry;
  double gain = 1.0;           // linear amplitude
  PnSequence id;               // cyclic ID, K = id.length()
  std::uint64_t cycle_offset = 0;
  Trajectory trajectory;

  bool operator==(const RaaNode&) const = default;
};

// r = g e^{j phase} conj(z).
CVector backscatter(const CVector& z, double gain, double phase);

// Phase of the free-running ID cycle at a global symbol index.
double id_phase(const PnSequence& id, std::uint64_t cycle_offset, std::uint64_t symbol_index);
double id_phase(const RaaNode& node, std::uint64_t symbol_index);

}  // namespace raaloc

#endif
