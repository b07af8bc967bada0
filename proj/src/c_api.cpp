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

#include "raaloc/raaloc.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "raaloc/analysis.hpp"
#include "raaloc/bundle.hpp"
#include "raaloc/locengine.hpp"
#include "raaloc/scenario_io.hpp"

struct raaloc_scenario {
  raaloc::Scenario model;
};

struct raaloc_run {
  raaloc::Scenario scenario;
  raaloc::MonteCarloResult result;
};

namespace {

thread_local std::string last_error;

raaloc_status fail(raaloc_status code, const std::string& message) {
  last_error = message;
  return code;
}

raaloc_status ok() {
  last_error.clear();
  return RAALOC_OK;
}

// Maps exceptions escaping the C++ core onto status codes.
template <typename F>
raaloc_status guarded(F&& f) {
  try {
    return f();
  } catch (const raaloc::io::ScenarioError& e) {
    return fail(RAALOC_ERR_PARSE, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(RAALOC_ERR_IO, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(RAALOC_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::domain_error& e) {
    return fail(RAALOC_ERR_NUMERIC, e.what());
  } catch (const std::bad_alloc&) {
    return fail(RAALOC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(RAALOC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(RAALOC_ERR_INTERNAL, "unknown error");
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out)
    throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

double db_or_floor(double x) {
  return x > 0.0 ? raaloc::linear_to_db(x) : -std::numeric_limits<double>::infinity();
}

}  // namespace

extern "C" {

const char* raaloc_version(void) { return raaloc::io::library_version(); }

const char* raaloc_last_error(void) { return last_error.c_str(); }

void raaloc_string_free(char* s) { std::free(s); }

raaloc_status raaloc_scenario_load(const char* path, raaloc_scenario** out) {
  if (!path || !out)
    return fail(RAALOC_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  if (!std::ifstream(path))
    return fail(RAALOC_ERR_IO, std::string("cannot read ") + path);
  return guarded([&] {
    auto model = raaloc::io::load_scenario(path);
    *out = new raaloc_scenario{std::move(model)};
    return ok();
  });
}

raaloc_status raaloc_scenario_parse(const char* json_text, raaloc_scenario** out) {
  if (!json_text || !out)
    return fail(RAALOC_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto model = raaloc::io::parse_scenario(json_text);
    *out = new raaloc_scenario{std::move(model)};
    return ok();
  });
}

void raaloc_scenario_free(raaloc_scenario* scenario) { delete scenario; }

raaloc_status raaloc_scenario_set_seed(raaloc_scenario* scenario, uint64_t seed) {
  if (!scenario)
    return fail(RAALOC_ERR_INVALID_ARGUMENT, "null scenario");
  scenario->model.master_seed = seed;
  return ok();
}

raaloc_status raaloc_scenario_set_trials(raaloc_scenario* scenario, int trials) {
  if (!scenario)
    return fail(RAALOC_ERR_INVALID_ARGUMENT, "null scenario");
  if (trials < 1)
    return fail(RAALOC_ERR_INVALID_ARGUMENT, "trials must be at least 1");
  scenario->model.trials = trials;
  return ok();
}

raaloc_status raaloc_scenario_set_channel(raaloc_scenario* scenario, const char* mode) {
  if (!scenario || !mode)
    return fail(RAALOC_ERR_INVALID_ARGUMENT, "null argument");
  const std::string m(mode);
  if (m == "free_space")
    scenario->model.channel = raaloc::ChannelMode::free_space;
  else if (m == "multipath")
    scenario->model.channel = raaloc::ChannelMode::multipath;
  else
    return fail(RAALOC_ERR_INVALID_ARGUMENT, "channel must be free_space or multipath");
  return ok();
}

raaloc_status raaloc_scenario_to_json(const raaloc_scenario* scenario, char** out) {
  if (!scenario || !out)
    return fail(RAALOC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = copy_string(raaloc::io::serialize_scenario(scenario->model));
    return ok();
  });
}

raaloc_status raaloc_scenario_config_hash(const raaloc_scenario* scenario, char** out) {
  if (!scenario || !out)
    return fail(RAALOC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = copy_string(raaloc::io::config_hash(scenario->model));
    return ok();
  });
}

raaloc_status raaloc_validate_file(const char* path, int* passed, char** report) {
  if (!path || !passed || !report)
    return fail(RAALOC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    raaloc::io::ValidationReport rep;
    try {
      rep = raaloc::io::validate_scenario(raaloc::io::load_scenario(path));
    } catch (const raaloc::io::ScenarioError& e) {
      rep.checks.push_back({"schema", false, e.what()});
    }
    *passed = rep.passed() ? 1 : 0;
    *report = copy_string(rep.text());
    return ok();
  });
}

raaloc_status raaloc_scenario_validate(const raaloc_scenario* scenario, int* passed,
                                       char** report) {
  if (!scenario || !passed || !report)
    return fail(RAALOC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto rep = raaloc::io::validate_scenario(scenario->model);
    *passed = rep.passed() ? 1 : 0;
    *report = copy_string(rep.text());
    return ok();
  });
}

raaloc_status raaloc_simulate(const raaloc_scenario* scenario, unsigned threads,
                              raaloc_run** out) {
  if (!scenario || !out)
    return fail(RAALOC_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const auto rep = raaloc::io::validate_scenario(scenario->model);
    if (!rep.passed())
      return fail(RAALOC_ERR_VALIDATION, rep.text());
    auto run = std::make_unique<raaloc_run>();
    run->scenario = scenario->model;
    run->result = raaloc::monte_carlo(run->scenario, threads);
    *out = run.release();
    return ok();
  });
}

void raaloc_run_free(raaloc_run* run) { delete run; }

raaloc_status raaloc_run_write_bundle(const raaloc_run* run, const char* directory) {
  if (!run || !directory)
    return fail(RAALOC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    try {
      raaloc::io::write_bundle(directory, run->scenario, run->result);
    } catch (const std::runtime_error& e) {
      return fail(RAALOC_ERR_IO, e.what());
    }
    return ok();
  });
}

raaloc_status raaloc_run_percentile(const raaloc_run* run, double percent, double* out) {
  if (!run || !out)
    return fail(RAALOC_ERR_INVALID_ARGUMENT, "null argument");
  if (!(percent > 0.0) || percent > 100.0)
    return fail(RAALOC_ERR_INVALID_ARGUMENT, "percentile must lie in (0, 100]");
  return guarded([&] {
    auto errors = run->result.all_errors();
    if (errors.empty())
      return fail(RAALOC_ERR_NUMERIC, "no position fixes");
    *out = raaloc::ecdf(std::move(errors)).quantile(percent / 100.0);
    return ok();
  });
}

raaloc_status raaloc_run_summary(const raaloc_run* run, raaloc_summary* out) {
  if (!run || !out)
    return fail(RAALOC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto s = raaloc::io::summarize(run->result);
    *out = {s.samples, s.outages, s.p50, s.p90, s.p99};
    return ok();
  });
}

raaloc_status raaloc_analyze_snr_trace(const double* max_snr_db, size_t count, int elements,
                                       int iterations, char** csv) {
  if (!max_snr_db || !csv || count == 0)
    return fail(RAALOC_ERR_INVALID_ARGUMENT, "need at least one maximum SNR");
  return guarded([&] {
    raaloc::analysis::SnrSpectrum spectrum;
    spectrum.elements = elements;
    for (size_t j = 0; j < count; ++j)
      spectrum.maxima.push_back(raaloc::db_to_linear(max_snr_db[j]));
    const auto init = raaloc::analysis::uniform_fractions(elements);
    const auto trace = raaloc::analysis::snr_recursion(spectrum, init, iterations);
    std::string out = "k";
    for (size_t j = 0; j < count; ++j)
      out += ",snr" + std::to_string(j + 1) + "_db";
    out += ",snr_dec_db\n";
    for (int k = 0; k < trace.iterations(); ++k) {
      out += std::to_string(k + 1);
      for (double v : trace.per_direction[static_cast<size_t>(k)])
        out += "," + raaloc::io::format_double(db_or_floor(v));
      out += "," + raaloc::io::format_double(db_or_floor(trace.decision[static_cast<size_t>(k)]));
      out += "\n";
    }
    *csv = copy_string(out);
    return ok();
  });
}

raaloc_status raaloc_analyze_equilibrium(double max_snr_db, int elements, double* out) {
  if (!out)
    return fail(RAALOC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = raaloc::analysis::equilibrium_snr(raaloc::db_to_linear(max_snr_db), elements);
    return ok();
  });
}

raaloc_status raaloc_analyze_speed_bound(double distance_m, double step_interval_s, int elements,
                                         double* out) {
  if (!out)
    return fail(RAALOC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = raaloc::analysis::max_tracking_speed(distance_m, elements, step_interval_s);
    return ok();
  });
}

raaloc_status raaloc_analyze_link_budget(const raaloc_scenario* scenario, int trx_elements,
                                         int raa_elements, double distance_m, double* max_snr,
                                         double* bootstrap_snr) {
  if (!scenario || !max_snr || !bootstrap_snr)
    return fail(RAALOC_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto b = raaloc::analysis::max_and_bootstrap_snr(scenario->model.rf, trx_elements,
                                                           raa_elements, distance_m);
    *max_snr = b.max_snr;
    *bootstrap_snr = b.bootstrap_snr;
    return ok();
  });
}

}  // extern "C"
