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

#include <charconv>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "raaloc/raaloc.h"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::string num(double v) {
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Owns a string handed out by the library.
struct LibString {
  char* p = nullptr;
  ~LibString() { raaloc_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

int report(raaloc_status st) {
  std::cerr << "error: " << raaloc_last_error() << "\n";
  return st == RAALOC_ERR_PARSE || st == RAALOC_ERR_INVALID_ARGUMENT || st == RAALOC_ERR_VALIDATION
             ? kExitUsage
             : kExitFailure;
}

// "4..512", "4,8,16" or "100"
std::vector<int> parse_counts(const std::string& text) {
  std::vector<int> out;
  auto to_int = [&](const std::string& s) {
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
      throw CLI::ValidationError("--n", "expected an integer, a list or a range like 4..512");
    return v;
  };
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const int lo = to_int(text.substr(0, dots));
    const int hi = to_int(text.substr(dots + 2));
    if (lo > hi)
      throw CLI::ValidationError("--n", "empty range");
    for (int n = lo; n <= hi; ++n)
      out.push_back(n);
    return out;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    out.push_back(to_int(text.substr(start, comma - start)));
    if (comma == std::string::npos)
      break;
    start = comma + 1;
  }
  return out;
}

struct SimulateArgs {
  std::string scenario;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<std::string> channel;
  unsigned threads = 0;
};

int cmd_simulate(const SimulateArgs& a) {
  raaloc_scenario* sc = nullptr;
  if (auto st = raaloc_scenario_load(a.scenario.c_str(), &sc); st != RAALOC_OK)
    return report(st);
  std::unique_ptr<raaloc_scenario, decltype(&raaloc_scenario_free)> guard(sc, raaloc_scenario_free);
  if (a.seed)
    raaloc_scenario_set_seed(sc, *a.seed);
  if (a.trials)
    if (auto st = raaloc_scenario_set_trials(sc, *a.trials); st != RAALOC_OK)
      return report(st);
  if (a.channel)
    if (auto st = raaloc_scenario_set_channel(sc, a.channel->c_str()); st != RAALOC_OK)
      return report(st);

  LibString hash;
  raaloc_scenario_config_hash(sc, &hash.p);

  raaloc_run* run = nullptr;
  if (auto st = raaloc_simulate(sc, a.threads, &run); st != RAALOC_OK)
    return report(st);
  std::unique_ptr<raaloc_run, decltype(&raaloc_run_free)> run_guard(run, raaloc_run_free);
  if (auto st = raaloc_run_write_bundle(run, a.out.c_str()); st != RAALOC_OK)
    return report(st);

  raaloc_summary s{};
  raaloc_run_summary(run, &s);
  std::cout << "config_hash " << hash.str() << "\n";
  std::cout << "bundle " << a.out << "\n";
  std::cout << "error_m p50=" << num(s.p50_m) << " p90=" << num(s.p90_m) << " p99=" << num(s.p99_m)
            << " fixes=" << s.samples << " outages=" << s.outages << "\n";
  return 0;
}

int cmd_validate(const std::string& path) {
  int passed = 0;
  LibString text;
  if (auto st = raaloc_validate_file(path.c_str(), &passed, &text.p); st != RAALOC_OK)
    return report(st);
  std::cout << text.str();
  return passed ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Localization with retro-directive antenna arrays"};
  app.set_version_flag("--version", std::string(raaloc_version()));
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo run of a scenario file");
  simulate->add_option("--scenario", sim.scenario, "Scenario JSON")->required();
  simulate->add_option("--out", sim.out, "Output directory for the result bundle")->required();
  simulate->add_option("--seed", sim.seed, "Master seed override");
  simulate->add_option("--trials", sim.trials, "Trial count override")->check(CLI::PositiveNumber);
  simulate->add_option("--channel", sim.channel, "Channel override")
      ->check(CLI::IsMember({"free_space", "multipath"}));
  simulate->add_option("--threads", sim.threads, "Worker threads (0: automatic)");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Schema and capacity checks");
  validate->add_option("--scenario,scenario", validate_path, "Scenario JSON")->required();

  auto* analyze = app.add_subcommand("analyze", "Closed-form convergence analytics (CSV)");
  analyze->require_subcommand(1);

  std::vector<double> max_db;
  int trace_n = 0;
  int trace_k = 15;
  auto* snr_trace = analyze->add_subcommand("snr_trace", "SNR recursion per direction");
  snr_trace->add_option("--max-db", max_db, "Per-direction maximum SNR in dB")
      ->required()
      ->delimiter(',');
  snr_trace->add_option("--n", trace_n, "Transceiver elements")->required();
  snr_trace->add_option("--k", trace_k, "Iterations");

  double eq_db = 0.0;
  std::string eq_n;
  auto* equilibrium = analyze->add_subcommand("equilibrium", "Rank-one fixed point SNR");
  equilibrium->add_option("--s-db", eq_db, "Maximum SNR in dB")->required();
  equilibrium->add_option("--n", eq_n, "Elements: value, list or range")->required();

  double sb_d = 0.0;
  double sb_tau = 0.0;
  std::string sb_n;
  auto* speed = analyze->add_subcommand("speed_bound", "Largest speed for beam tracking");
  speed->add_option("--d", sb_d, "Distance in m")->required();
  speed->add_option("--tau", sb_tau, "Localization step interval in s")->required();
  speed->add_option("--n", sb_n, "Elements: value, list or range")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate)
      return cmd_simulate(sim);
    if (*validate)
      return cmd_validate(validate_path);
    if (*snr_trace) {
      LibString csv;
      if (auto st = raaloc_analyze_snr_trace(max_db.data(), max_db.size(), trace_n, trace_k,
                                             &csv.p);
          st != RAALOC_OK)
        return report(st);
      std::cout << csv.str();
      return 0;
    }
    if (*equilibrium) {
      std::string out = "s_db,n,equilibrium,equilibrium_db\n";
      for (int n : parse_counts(eq_n)) {
        double x = 0.0;
        if (auto st = raaloc_analyze_equilibrium(eq_db, n, &x); st != RAALOC_OK)
          return report(st);
        out += num(eq_db) + "," + std::to_string(n) + "," + num(x) + "," +
               num(10.0 * std::log10(x)) + "\n";
      }
      std::cout << out;
      return 0;
    }
    if (*speed) {
      std::string out = "n,v_max_mps\n";
      for (int n : parse_counts(sb_n)) {
        double v = 0.0;
        if (auto st = raaloc_analyze_speed_bound(sb_d, sb_tau, n, &v); st != RAALOC_OK)
          return report(st);
        out += std::to_string(n) + "," + num(v) + "\n";
      }
      std::cout << out;
      return 0;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  }
  return kExitUsage;
}
