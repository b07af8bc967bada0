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

#include "raaloc/scenario_io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "json.hpp"

namespace raaloc::io {

using Json = nlohmann::ordered_json;

ScenarioError::ScenarioError(std::string path, const std::string& message)
    : std::runtime_error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}

namespace {

// Reads one JSON object, remembering which keys were consumed so that the
// leftovers can be reported as unknown.
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object())
      throw ScenarioError(path_, "expected an object");
  }

  std::string at(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const Json* find(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end())
      return nullptr;
    used_.insert(key);
    return &*it;
  }

  const Json& require(const std::string& key) {
    const Json* v = find(key);
    if (!v)
      throw ScenarioError(at(key), "missing required field");
    return *v;
  }

  std::optional<double> number(const std::string& key) {
    const Json* v = find(key);
    if (!v)
      return std::nullopt;
    if (!v->is_number())
      throw ScenarioError(at(key), "expected a number");
    const double x = v->get<double>();
    if (!std::isfinite(x))
      throw ScenarioError(at(key), "must be finite");
    return x;
  }

  double positive(const std::string& key, double fallback) {
    const auto v = number(key);
    if (!v)
      return fallback;
    if (!(*v > 0.0))
      throw ScenarioError(at(key), "must be positive");
    return *v;
  }

  std::optional<std::int64_t> integer(const std::string& key) {
    const Json* v = find(key);
    if (!v)
      return std::nullopt;
    if (!v->is_number_integer())
      throw ScenarioError(at(key), "expected an integer");
    return v->get<std::int64_t>();
  }

  int count(const std::string& key, int fallback, int minimum) {
    const auto v = integer(key);
    if (!v)
      return fallback;
    if (*v < minimum || *v > 1'000'000'000)
      throw ScenarioError(at(key), "must be an integer >= " + std::to_string(minimum));
    return static_cast<int>(*v);
  }

  std::optional<bool> boolean(const std::string& key) {
    const Json* v = find(key);
    if (!v)
      return std::nullopt;
    if (!v->is_boolean())
      throw ScenarioError(at(key), "expected true or false");
    return v->get<bool>();
  }

  std::optional<std::string> string(const std::string& key) {
    const Json* v = find(key);
    if (!v)
      return std::nullopt;
    if (!v->is_string())
      throw ScenarioError(at(key), "expected a string");
    return v->get<std::string>();
  }

  // Exactly one of two spellings (linear / dB) may be given.
  std::optional<double> either(const std::string& linear, const std::string& db,
                               double (*convert)(double)) {
    if (has(linear) && has(db))
      throw ScenarioError(at(linear), "conflicts with " + db);
    if (has(db))
      return convert(*number(db));
    if (has(linear)) {
      const double v = *number(linear);
      if (!(v > 0.0))
        throw ScenarioError(at(linear), "must be positive");
      return v;
    }
    return std::nullopt;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key()))
        throw ScenarioError(at(it.key()), "unknown key");
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> used_;
};

double power_db(double db) { return db_to_linear(db); }
double amplitude_db(double db) { return std::pow(10.0, db / 20.0); }
double dbm_to_w(double dbm) { return db_to_linear(dbm - 30.0); }

Position read_point(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ScenarioError(path, "expected [x, z] in meters");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json write_point(const Position& p) { return Json::array({p.x, p.z}); }

RfParams read_rf(Reader r) {
  RfParams rf;
  rf.carrier_frequency_hz = r.positive("carrier_frequency_hz", rf.carrier_frequency_hz);
  rf.bandwidth_hz = r.positive("bandwidth_hz", rf.bandwidth_hz);
  rf.symbol_time_s = r.positive("symbol_time_s", rf.symbol_time_s);
  if (auto v = r.either("tx_power_w", "tx_power_dbm", dbm_to_w))
    rf.tx_power_w = *v;
  if (auto v = r.either("element_gain_trx", "element_gain_trx_dbi", power_db))
    rf.element_gain_trx = *v;
  if (auto v = r.either("element_gain_raa", "element_gain_raa_dbi", power_db))
    rf.element_gain_raa = *v;
  if (auto v = r.either("noise_figure_trx", "noise_figure_trx_db", power_db))
    rf.noise_figure_trx = *v;
  if (auto v = r.either("noise_figure_raa", "noise_figure_raa_db", power_db))
    rf.noise_figure_raa = *v;
  if (auto v = r.either("raa_gain", "raa_gain_db", amplitude_db))
    rf.raa_gain = *v;
  r.finish();
  return rf;
}

Json write_rf(const RfParams& rf) {
  Json j;
  j["carrier_frequency_hz"] = rf.carrier_frequency_hz;
  j["bandwidth_hz"] = rf.bandwidth_hz;
  j["symbol_time_s"] = rf.symbol_time_s;
  j["tx_power_w"] = rf.tx_power_w;
  j["element_gain_trx"] = rf.element_gain_trx;
  j["element_gain_raa"] = rf.element_gain_raa;
  j["noise_figure_trx"] = rf.noise_figure_trx;
  j["noise_figure_raa"] = rf.noise_figure_raa;
  j["raa_gain"] = rf.raa_gain;
  return j;
}

ArrayGeometry read_array(Reader r, double wavelength) {
  const auto layout = r.string("layout").value_or("planar");
  ArrayGeometry g;
  if (layout == "planar") {
    g.layout = PlanarLayout{r.count("nx", 1, 1), r.count("ny", 1, 1)};
  } else if (layout == "linear") {
    g.layout = LinearLayout{r.count("elements", 1, 1)};
  } else {
    throw ScenarioError(r.at("layout"), "expected \"planar\" or \"linear\"");
  }
  if (r.has("spacing_m") && r.has("spacing_wavelengths"))
    throw ScenarioError(r.at("spacing_m"), "conflicts with spacing_wavelengths");
  if (r.has("spacing_m"))
    g.spacing_m = r.positive("spacing_m", 0.0);
  else
    g.spacing_m = r.positive("spacing_wavelengths", 0.5) * wavelength;
  if (const Json* p = r.find("position_m"))
    g.pose.position = read_point(*p, r.at("position_m"));
  if (r.has("boresight_rad") && r.has("boresight_deg"))
    throw ScenarioError(r.at("boresight_rad"), "conflicts with boresight_deg");
  if (auto v = r.number("boresight_rad"))
    g.pose.boresight = *v;
  else if (auto d = r.number("boresight_deg"))
    g.pose.boresight = *d * kPi / 180.0;
  r.finish();
  return g;
}

Json write_array(const ArrayGeometry& g) {
  Json j;
  if (const auto* p = std::get_if<PlanarLayout>(&g.layout)) {
    j["layout"] = "planar";
    j["nx"] = p->nx;
    j["ny"] = p->ny;
  } else {
    j["layout"] = "linear";
    j["elements"] = std::get<LinearLayout>(g.layout).elements;
  }
  j["spacing_m"] = g.spacing_m;
  j["position_m"] = write_point(g.pose.position);
  j["boresight_rad"] = g.pose.boresight;
  return j;
}

PnSequence read_id(Reader r, std::map<int, int>& next_index) {
  if (r.has("chips")) {
    const auto chips = *r.string("chips");
    PnSequence id;
    for (char c : chips) {
      if (c != '0' && c != '1')
        throw ScenarioError(r.at("chips"), "chips must be a string of 0 and 1");
      id.chips.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    if (id.chips.empty())
      throw ScenarioError(r.at("chips"), "empty ID");
    r.finish();
    return id;
  }
  const int length_bits = r.count("register_length", 0, 2);
  if (length_bits == 0 || length_bits > 20)
    throw ScenarioError(r.at("register_length"), "need chips or a register length in [2, 20]");
  const int period = (1 << length_bits) - 1;
  const int k = r.count("length", period, 1);
  if (k > period)
    throw ScenarioError(r.at("length"), "longer than one period (" + std::to_string(period) + ")");
  const int available = static_cast<int>(primitive_taps(length_bits).size());
  int index = 0;
  if (auto v = r.integer("taps_index")) {
    if (*v < 0 || *v >= available)
      throw ScenarioError(r.at("taps_index"), "only " + std::to_string(available) +
                                                  " m-sequences exist for register length " +
                                                  std::to_string(length_bits));
    index = static_cast<int>(*v);
  } else {
    // Sequential assignment; wrapping past the codebook size produces a
    // duplicate that validation reports.
    index = next_index[length_bits]++ % available;
  }
  r.finish();
  return id_sequence(length_bits, index, k);
}

Trajectory read_trajectory(Reader r) {
  Trajectory t;
  if (const Json* w = r.find("waypoints")) {
    if (!w->is_array() || w->empty())
      throw ScenarioError(r.at("waypoints"), "expected a non-empty list");
    for (std::size_t i = 0; i < w->size(); ++i) {
      const std::string path = r.at("waypoints") + "[" + std::to_string(i) + "]";
      Reader wr((*w)[i], path);
      Waypoint wp;
      wp.time_s = wr.number("time_s").value_or(0.0);
      wp.position = read_point(wr.require("position_m"), wr.at("position_m"));
      wr.finish();
      if (!t.waypoints.empty() && wp.time_s < t.waypoints.back().time_s)
        throw ScenarioError(wr.at("time_s"), "waypoint times must not decrease");
      t.waypoints.push_back(wp);
    }
  } else if (const Json* w = r.find("waypoints_m")) {
    if (!w->is_array() || w->size() < 2)
      throw ScenarioError(r.at("waypoints_m"), "expected at least two [x, z] points");
    const double speed = r.positive("speed_mps", 0.0);
    if (speed == 0.0)
      throw ScenarioError(r.at("speed_mps"), "missing required field");
    double time = r.number("start_time_s").value_or(0.0);
    for (std::size_t i = 0; i < w->size(); ++i) {
      const Position p =
          read_point((*w)[i], r.at("waypoints_m") + "[" + std::to_string(i) + "]");
      if (!t.waypoints.empty())
        time += distance(t.waypoints.back().position, p) / speed;
      t.waypoints.push_back({time, p});
    }
  } else if (const Json* p = r.find("position_m")) {
    const Position at = read_point(*p, r.at("position_m"));
    const double duration = r.number("duration_s").value_or(0.0);
    if (duration < 0.0)
      throw ScenarioError(r.at("duration_s"), "must be non-negative");
    t.waypoints = {{0.0, at}, {duration, at}};
  } else {
    throw ScenarioError(r.at("waypoints"),
                        "need waypoints, waypoints_m with speed_mps, or position_m");
  }
  r.finish();
  return t;
}

Json write_trajectory(const Trajectory& t) {
  Json w = Json::array();
  for (const auto& wp : t.waypoints)
    w.push_back(Json{{"time_s", wp.time_s}, {"position_m", write_point(wp.position)}});
  return Json{{"waypoints", w}};
}

Json write_chips(const PnSequence& id) {
  std::string s;
  s.reserve(id.chips.size());
  for (auto c : id.chips)
    s.push_back(c ? '1' : '0');
  return Json{{"chips", s}};
}

template <typename F>
void each(Reader& parent, const std::string& key, F&& f) {
  const Json& list = parent.require(key);
  if (!list.is_array())
    throw ScenarioError(parent.at(key), "expected a list");
  for (std::size_t i = 0; i < list.size(); ++i)
    f(list[i], parent.at(key) + "[" + std::to_string(i) + "]");
}

Scenario from_json(const Json& doc) {
  Reader top(doc, "");
  for (const char* section : {"rf", "anchors", "raas", "trx", "channel", "simulation"})
    if (!top.has(section))
      throw ScenarioError(section, "missing required section");

  Scenario s;
  s.rf = read_rf(Reader(top.require("rf"), "rf"));
  const double lambda = s.rf.wavelength();

  each(top, "anchors", [&](const Json& j, const std::string& path) {
    Reader r(j, path);
    Anchor a;
    a.name = r.string("name").value_or("anchor" + std::to_string(s.anchors.size() + 1));
    a.array = read_array(Reader(r.require("array"), r.at("array")), lambda);
    r.finish();
    s.anchors.push_back(std::move(a));
  });

  std::map<int, int> next_index;
  each(top, "raas", [&](const Json& j, const std::string& path) {
    Reader r(j, path);
    RaaNode n;
    n.name = r.string("name").value_or("raa" + std::to_string(s.raas.size() + 1));
    n.geometry = read_array(Reader(r.require("array"), r.at("array")), lambda);
    n.gain = r.either("gain", "gain_db", amplitude_db).value_or(s.rf.raa_gain);
    n.id = read_id(Reader(r.require("id"), r.at("id")), next_index);
    if (auto v = r.integer("cycle_offset")) {
      if (*v < 0)
        throw ScenarioError(r.at("cycle_offset"), "must be non-negative");
      n.cycle_offset = static_cast<std::uint64_t>(*v);
    }
    n.trajectory = read_trajectory(Reader(r.require("trajectory"), r.at("trajectory")));
    r.finish();
    s.raas.push_back(std::move(n));
  });

  {
    Reader r(top.require("trx"), "trx");
    if (auto v = r.either("snr_threshold", "snr_threshold_db", power_db))
      s.trx.snr_threshold = *v;
    if (auto v = r.either("ratio_threshold", "ratio_threshold_db", power_db))
      s.trx.ratio_threshold = *v;
    s.trx.max_iterations = r.count("max_iterations", s.trx.max_iterations, 2);
    s.trx.aoa_oversampling = r.count("aoa_oversampling", s.trx.aoa_oversampling, 1);
    if (s.trx.aoa_oversampling > kMaxAoaOversampling)
      throw ScenarioError(r.at("aoa_oversampling"),
                          "must not exceed " + std::to_string(kMaxAoaOversampling));
    s.trx.channel_tracking = r.boolean("channel_tracking").value_or(false);
    r.finish();
  }
  {
    Reader r(top.require("channel"), "channel");
    const auto mode = r.string("mode").value_or("free_space");
    if (mode == "free_space")
      s.channel = ChannelMode::free_space;
    else if (mode == "multipath")
      s.channel = ChannelMode::multipath;
    else
      throw ScenarioError(r.at("mode"), "expected \"free_space\" or \"multipath\"");
    s.multipath.clusters = r.count("clusters", s.multipath.clusters, 0);
    if (auto v = r.number("angle_spread_rad")) {
      if (*v < 0.0 || *v > kPi / 2.0)
        throw ScenarioError(r.at("angle_spread_rad"), "must lie in [0, pi/2]");
      s.multipath.angle_spread = *v;
    }
    if (auto v = r.number("k_factor_db"))
      s.multipath.k_factor_db = *v;
    s.raa_noise = r.boolean("raa_noise").value_or(true);
    r.finish();
  }
  {
    Reader r(top.require("simulation"), "simulation");
    s.update_rate_hz = r.positive("update_rate_hz", s.update_rate_hz);
    s.trials = r.count("trials", s.trials, 1);
    if (const Json* v = r.find("master_seed")) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0))
        throw ScenarioError(r.at("master_seed"), "expected a non-negative integer");
      s.master_seed = v->get<std::uint64_t>();
    }
    s.trace_trials = r.count("trace_trials", s.trace_trials, 0);
    r.finish();
  }
  top.finish();
  return s;
}

Json to_json(const Scenario& s) {
  Json doc;
  doc["rf"] = write_rf(s.rf);
  doc["anchors"] = Json::array();
  for (const auto& a : s.anchors)
    doc["anchors"].push_back(Json{{"name", a.name}, {"array", write_array(a.array)}});
  doc["raas"] = Json::array();
  for (const auto& n : s.raas) {
    Json j;
    j["name"] = n.name;
    j["array"] = write_array(n.geometry);
    j["gain"] = n.gain;
    j["id"] = write_chips(n.id);
    j["cycle_offset"] = n.cycle_offset;
    j["trajectory"] = write_trajectory(n.trajectory);
    doc["raas"].push_back(std::move(j));
  }
  doc["trx"] = Json{{"snr_threshold", s.trx.snr_threshold},
                    {"ratio_threshold", s.trx.ratio_threshold},
                    {"max_iterations", s.trx.max_iterations},
                    {"aoa_oversampling", s.trx.aoa_oversampling},
                    {"channel_tracking", s.trx.channel_tracking}};
  doc["channel"] = Json{{"mode", s.channel == ChannelMode::multipath ? "multipath" : "free_space"},
                        {"clusters", s.multipath.clusters},
                        {"angle_spread_rad", s.multipath.angle_spread},
                        {"k_factor_db", s.multipath.k_factor_db},
                        {"raa_noise", s.raa_noise}};
  doc["simulation"] = Json{{"update_rate_hz", s.update_rate_hz},
                           {"trials", s.trials},
                           {"master_seed", s.master_seed},
                           {"trace_trials", s.trace_trials}};
  return doc;
}

std::vector<std::uint8_t> min_rotation(const std::vector<std::uint8_t>& v) {
  std::vector<std::uint8_t> best = v;
  std::vector<std::uint8_t> rot(v.size());
  for (std::size_t shift = 1; shift < v.size(); ++shift) {
    std::rotate_copy(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(shift), v.end(),
                     rot.begin());
    if (rot < best)
      best = rot;
  }
  return best;
}

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t limit = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ScenarioError("line " + std::to_string(line) + ", column " + std::to_string(column),
                        "syntax error");
  }
  try {
    return from_json(doc);
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    throw ScenarioError("", e.what());
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ScenarioError("", "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& scenario) { return to_json(scenario).dump(2) + "\n"; }

std::string canonical_json(const Scenario& scenario) { return to_json(scenario).dump(); }

std::string config_hash(const Scenario& scenario) {
  const std::string text = canonical_json(scenario);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int size = 0;
  if (EVP_Digest(text.data(), text.size(), digest.data(), &size, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < size; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

double max_update_rate(int id_length, double symbol_time_s) {
  if (id_length < 1 || !(symbol_time_s > 0.0))
    throw std::invalid_argument("max_update_rate: K and T must be positive");
  return 1.0 / (id_length * symbol_time_s);
}

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckLine& c) { return c.passed; });
}

std::string ValidationReport::text() const {
  std::string out;
  for (const auto& c : checks)
    out += (c.passed ? "PASS " : "FAIL ") + c.name + ": " + c.message + "\n";
  out += passed() ? "scenario valid\n" : "scenario invalid\n";
  return out;
}

ValidationReport validate_scenario(const Scenario& s) {
  ValidationReport rep;
  rep.checks.push_back({"schema", true, "ok"});

  rep.checks.push_back({"anchors", s.anchors.size() >= 2,
                        std::to_string(s.anchors.size()) + " anchor(s), at least 2 needed"});

  const int k = s.id_length();
  const double t = s.rf.symbol_time_s;
  const double packet = k * t;
  const double interval = 1.0 / s.update_rate_hz;
  rep.checks.push_back({"packet", s.update_rate_hz * packet <= 1.0 + 1e-12,
                        "packet K T = " + fixed(packet * 1e6, 1) + " us (K = " +
                            std::to_string(k) + "), update interval " +
                            fixed(interval * 1e6, 1) + " us"});

  // RAAs are grouped by the register length that can produce their ID.
  std::map<int, int> per_length;
  for (const auto& n : s.raas) {
    int bits = 1;
    while (((1 << bits) - 1) < n.id.length() && bits < 30)
      ++bits;
    ++per_length[bits];
  }
  bool capacity_ok = true;
  std::string capacity_msg;
  for (const auto& [bits, used] : per_length) {
    const std::uint64_t available = bits >= 2 && bits <= 20 ? msequence_count(bits) : 0;
    if (static_cast<std::uint64_t>(used) > available)
      capacity_ok = false;
    if (!capacity_msg.empty())
      capacity_msg += "; ";
    capacity_msg += std::to_string(used) + " RAA(s) on register length " + std::to_string(bits) +
                    ", " + std::to_string(available) + " m-sequences available";
  }
  if (!capacity_ok)
    capacity_msg += " (capacity exceeded)";
  rep.checks.push_back({"id_capacity", capacity_ok, capacity_msg});

  std::set<std::vector<std::uint8_t>> seen;
  int duplicates = 0;
  for (const auto& n : s.raas)
    if (!seen.insert(min_rotation(n.id.chips)).second)
      ++duplicates;
  rep.checks.push_back({"id_distinct", duplicates == 0,
                        duplicates == 0 ? "all IDs distinct up to cyclic shift"
                                        : std::to_string(duplicates) + " duplicate ID(s)"});

  try {
    s.validate();
    rep.checks.push_back({"model", true, "ok"});
  } catch (const std::exception& e) {
    rep.checks.push_back({"model", false, e.what()});
  }

  for (int full : {1023, 8191})
    rep.checks.push_back({"capacity_k" + std::to_string(full), true,
                          "K = " + std::to_string(full) + ", T = " + fixed(t * 1e9, 1) +
                              " ns: packet " + fixed(full * t * 1e6, 1) + " us, R up to " +
                              fixed(max_update_rate(full, t), 1) + " Hz"});
  return rep;
}

ValidationReport validate_scenario_text(std::string_view text) {
  try {
    return validate_scenario(parse_scenario(text));
  } catch (const ScenarioError& e) {
    ValidationReport rep;
    rep.checks.push_back({"schema", false, e.what()});
    return rep;
  }
}

}  // namespace raaloc::io
