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

#ifndef RAALOC_BUNDLE_HPP
#define RAALOC_BUNDLE_HPP

#include <cstddef>
#include <filesystem>
#include <string>

#include "raaloc/locengine.hpp"

namespace raaloc::io {

struct ErrorSummary {
  std::size_t samples = 0;
  std::size_t outages = 0;
  double p50 = 0.0;  // m, NaN without samples
  double p90 = 0.0;
  double p99 = 0.0;
};

ErrorSummary summarize(const MonteCarloResult& result);

// Shortest round-trip decimal form, '.' separator regardless of locale.
std::string format_double(double value);

// Writes metadata.json, scenario.json and the CSV tables snr_traces,
// detections, aoa_estimates, positions and ecdf into dir (created if
// needed). Output depends only on the scenario and the result.
void write_bundle(const std::filesystem::path& dir, const Scenario& scenario,
                  const MonteCarloResult& result);

const char* library_version();

}  // namespace raaloc::io

#endif
