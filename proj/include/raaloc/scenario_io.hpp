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

#ifndef RAALOC_SCENARIO_IO_HPP
#define RAALOC_SCENARIO_IO_HPP

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "raaloc/locengine.hpp"

namespace raaloc::io {

// Schema or syntax problem. path() is a field path such as
// "raas[0].trajectory.speed_mps" or "line 3, column 7" for syntax errors.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string path, const std::string& message);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Parses the JSON scenario document. Unknown keys, wrong types and
// out-of-range fields are rejected; semantic checks (anchor count, packet
// length, ID capacity) are left to validate_scenario.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);

// Normal form: linear units, explicit chips and timed waypoints. Re-parses
// to an equal model.
std::string serialize_scenario(const Scenario& scenario);

// Compact serialization used for hashing.
std::string canonical_json(const Scenario& scenario);

// Lower-case hex SHA-256 of canonical_json.
std::string config_hash(const Scenario& scenario);

struct CheckLine {
  std::string name;
  bool passed = true;
  std::string message;
};

struct ValidationReport {
  std::vector<CheckLine> checks;

  bool passed() const;
  // One "PASS|FAIL name: message" line per check.
  std::string text() const;
};

ValidationReport validate_scenario(const Scenario& scenario);
// Schema errors become a failed "schema" line.
ValidationReport validate_scenario_text(std::string_view text);

// 1 / (K T)
double max_update_rate(int id_length, double symbol_time_s);

}  // namespace raaloc::io

#endif
