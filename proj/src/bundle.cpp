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

#include "raaloc/bundle.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "json.hpp"
#include "raaloc/scenario_io.hpp"

#ifndef RAALOC_VERSION_STRING
#define RAALOC_VERSION_STRING "0.0.0"
#endif

namespace raaloc::io {

namespace {

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, const char* header) : out_(path, std::ios::binary) {
    if (!out_)
      throw std::runtime_error("cannot write " + path.string());
    out_ << header << '\n';
  }

  CsvFile& cell(const std::string& s) {
    sep();
    out_ << s;
    return *this;
  }
  CsvFile& cell(double v) { return cell(format_double(v)); }
  CsvFile& cell(long long v) { return cell(std::to_string(v)); }
  CsvFile& cell(int v) { return cell(std::to_string(v)); }
  CsvFile& cell(std::size_t v) { return cell(std::to_string(v)); }
  CsvFile& empty() { return cell(std::string()); }
  void end() {
    out_ << '\n';
    first_ = true;
  }

 private:
  void sep() {
    if (!first_)
      out_ << ',';
    first_ = false;
  }

  std::ofstream out_;
  bool first_ = true;
};

double quantile_or_nan(const Ecdf* e, double p) {
  return e ? e->quantile(p) : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

const char* library_version() { return RAALOC_VERSION_STRING; }

std::string format_double(double value) {
  if (std::isnan(value))
    return "nan";
  if (std::isinf(value))
    return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

ErrorSummary summarize(const MonteCarloResult& result) {
  ErrorSummary s;
  std::vector<double> all = result.all_errors();
  for (int o : result.outages)
    s.outages += static_cast<std::size_t>(o);
  s.samples = all.size();
  std::optional<Ecdf> e;
  if (!all.empty())
    e.emplace(std::move(all));
  const Ecdf* ptr = e ? &*e : nullptr;
  s.p50 = quantile_or_nan(ptr, 0.5);
  s.p90 = quantile_or_nan(ptr, 0.9);
  s.p99 = quantile_or_nan(ptr, 0.99);
  return s;
}

void write_bundle(const std::filesystem::path& dir, const Scenario& scenario,
                  const MonteCarloResult& result) {
  std::filesystem::create_directories(dir);
  const auto& raas = scenario.raas;
  const auto& anchors = scenario.anchors;

  {
    CsvFile f(dir / "snr_traces.csv", "trial,raa,anchor,step,k,gamma,gamma_db");
    const std::size_t traced =
        std::min(result.trials.size(), static_cast<std::size_t>(scenario.trace_trials));
    for (std::size_t t = 0; t < traced; ++t)
      for (std::size_t p = 0; p < raas.size(); ++p)
        for (const auto& rec : result.trials[t].per_raa[p])
          for (const auto& obs : rec.observations)
            for (std::size_t k = 0; k < obs.result.snr_trace.size(); ++k) {
              const double g = obs.result.snr_trace[k];
              f.cell(t).cell(raas[p].name).cell(anchors[static_cast<std::size_t>(obs.anchor)].name);
              f.cell(rec.step).cell(k + 1).cell(g).cell(g > 0.0 ? linear_to_db(g) : -INFINITY);
              f.end();
            }
  }

  {
    CsvFile det(dir / "detections.csv",
                "trial,raa,anchor,step,visible,detected,detect_iteration,id_index,id_lag,id_score");
    CsvFile aoa(dir / "aoa_estimates.csv",
                "trial,raa,anchor,step,distance_m,true_aoa_rad,estimated_aoa_rad,error_rad");
    for (std::size_t t = 0; t < result.trials.size(); ++t)
      for (std::size_t p = 0; p < raas.size(); ++p)
        for (const auto& rec : result.trials[t].per_raa[p])
          for (const auto& obs : rec.observations) {
            const auto& name = anchors[static_cast<std::size_t>(obs.anchor)].name;
            const auto& r = obs.result;
            det.cell(t).cell(raas[p].name).cell(name).cell(rec.step);
            det.cell(obs.visible ? 1 : 0).cell(r.detected ? 1 : 0);
            if (r.detected)
              det.cell(r.detect_iteration);
            else
              det.empty();
            if (r.detected && r.matched_id)
              det.cell(r.matched_id->index).cell(r.matched_id->lag).cell(r.matched_id->score);
            else
              det.empty().empty().empty();
            det.end();
            if (r.detected) {
              aoa.cell(t).cell(raas[p].name).cell(name).cell(rec.step);
              aoa.cell(obs.distance).cell(obs.true_aoa).cell(r.aoa_estimate);
              aoa.cell(r.aoa_estimate - obs.true_aoa);
              aoa.end();
            }
          }
  }

  {
    CsvFile f(dir / "positions.csv",
              "trial,raa,step,time_s,true_x_m,true_z_m,est_x_m,est_z_m,error_m,bearings");
    for (std::size_t t = 0; t < result.trials.size(); ++t)
      for (std::size_t p = 0; p < raas.size(); ++p)
        for (const auto& rec : result.trials[t].per_raa[p]) {
          f.cell(t).cell(raas[p].name).cell(rec.step).cell(rec.time_s);
          f.cell(rec.truth.x).cell(rec.truth.z);
          if (rec.estimate)
            f.cell(rec.estimate->x).cell(rec.estimate->z).cell(*rec.error);
          else
            f.empty().empty().empty();
          f.cell(rec.bearings_used);
          f.end();
        }
  }

  {
    CsvFile f(dir / "ecdf.csv", "raa,error_m,fraction");
    auto emit = [&](const std::string& label, const std::vector<double>& samples) {
      if (samples.empty())
        return;
      const Ecdf e(samples);
      for (std::size_t i = 0; i < e.values().size(); ++i) {
        f.cell(label).cell(e.values()[i]).cell(e.fractions()[i]);
        f.end();
      }
    };
    for (std::size_t p = 0; p < raas.size() && p < result.errors.size(); ++p)
      emit(raas[p].name, result.errors[p]);
    if (raas.size() > 1)
      emit("all", result.all_errors());
  }

  {
    std::ofstream f(dir / "scenario.json", std::ios::binary);
    f << serialize_scenario(scenario);
  }

  {
    const ErrorSummary s = summarize(result);
    auto num = [](double v) -> nlohmann::ordered_json {
      if (std::isnan(v))
        return nullptr;
      return v;
    };
    nlohmann::ordered_json meta;
    meta["version"] = library_version();
    meta["config_hash"] = config_hash(scenario);
    meta["master_seed"] = scenario.master_seed;
    meta["trials"] = scenario.trials;
    meta["steps"] = scenario.step_count();
    meta["error_samples"] = s.samples;
    meta["outages"] = s.outages;
    meta["error_p50_m"] = num(s.p50);
    meta["error_p90_m"] = num(s.p90);
    meta["error_p99_m"] = num(s.p99);
    std::ofstream f(dir / "metadata.json", std::ios::binary);
    f << meta.dump(2) << '\n';
  }
}

}  // namespace raaloc::io
