/* Copyright (C) 2026 revdec authors
 * This program is Licensed under the Apache License, Version 2.0
 * (the "License"); you may not use this file except in compliance
 * with the License. You may obtain a copy of the License at
 *   http://www.apache.org/licenses/LICENSE-2.0
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License. See accompanying LICENSE file.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"
#include "revdec/common.hpp"
#include "revdec/profile.hpp"

namespace revdec {

// Everything a run needs, resolvable from a flat-key JSON file with CLI
// flags layered on top.
struct RunConfig {
  // profile spec
  std::string profile;
  double minor = 0.5;
  double slope = 1.0;
  int order = 3;
  std::vector<double> tail;
  std::vector<double> coeffs;
  double center = 1.0;
  double radius = std::numeric_limits<double>::infinity();
  double domain_lo = 0.7;
  double domain_hi = 1.3;

  // run parameters
  std::vector<double> deltas{1.0 / 64.0};
  std::vector<double> ps{4.0};
  double q = 2.0;
  std::vector<std::string> families{"constant"};
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  int threads = 0;
  std::size_t voxel_budget = std::size_t(1) << 24;
  int oversample = 2;
  double spacing_factor = 0.5;
  bool shared_grid = false;

  // subcommand-specific
  std::string preset = "torus";
  std::vector<int> tubes{8, 16, 32, 64, 128};
  std::string out_file;
  std::string manifest_path;
  int k = -1;
  int maxorder = 3;
};

namespace detail {

inline std::vector<double> number_list(const nlohmann::json& v,
                                       const std::string& key) {
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number())
        throw validation_error("config key '" + key +
                               "' must hold numbers");
      out.push_back(e.get<double>());
    }
  } else {
    throw validation_error("config key '" + key +
                           "' must be a number or number list");
  }
  return out;
}

inline std::vector<std::string> string_list(const nlohmann::json& v,
                                            const std::string& key) {
  std::vector<std::string> out;
  if (v.is_string()) {
    out.push_back(v.get<std::string>());
  } else if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_string())
        throw validation_error("config key '" + key +
                               "' must hold strings");
      out.push_back(e.get<std::string>());
    }
  } else {
    throw validation_error("config key '" + key +
                           "' must be a string or string list");
  }
  return out;
}

}  // namespace detail

inline void validate_config(const RunConfig& cfg) {
  for (double d : cfg.deltas)
    if (!(d > 0.0 && d < 1.0))
      throw validation_error("delta must lie in (0,1)");
  if (cfg.deltas.empty()) throw validation_error("delta list must be nonempty");
  if (cfg.ps.empty()) throw validation_error("p list must be nonempty");
  for (double p : cfg.ps)
    if (!(p >= 1.0)) throw validation_error("p must be at least 1");
  if (cfg.q != 2.0 && cfg.q != 4.0)
    throw validation_error("ell exponent q must be 2 or 4");
  if (cfg.families.empty())
    throw validation_error("family list must be nonempty");
  if (!(cfg.spacing_factor > 0.0 && cfg.spacing_factor <= 1.0))
    throw validation_error("spacing factor must lie in (0,1]");
  if (cfg.oversample < 2)
    throw validation_error("oversample must be at least 2");
  for (int N : cfg.tubes)
    if (N < 1) throw validation_error("tube count must be positive");
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw validation_error("config parse error in '" + path +
                           "': " + e.what());
  }
  if (!j.is_object())
    throw validation_error("config must be a JSON object of flat keys");
  if (!j.contains("profile"))
    throw validation_error("missing profile in config '" + path + "'");

  RunConfig cfg;
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "profile") cfg.profile = v.get<std::string>();
      else if (key == "minor") cfg.minor = v.get<double>();
      else if (key == "slope") cfg.slope = v.get<double>();
      else if (key == "order") cfg.order = v.get<int>();
      else if (key == "tail") cfg.tail = detail::number_list(v, key);
      else if (key == "coeffs") cfg.coeffs = detail::number_list(v, key);
      else if (key == "center") cfg.center = v.get<double>();
      else if (key == "radius") cfg.radius = v.get<double>();
      else if (key == "domain") {
        auto d = detail::number_list(v, key);
        if (d.size() != 2)
          throw validation_error("config key 'domain' needs two numbers");
        cfg.domain_lo = d[0];
        cfg.domain_hi = d[1];
      } else if (key == "delta") cfg.deltas = detail::number_list(v, key);
      else if (key == "p") cfg.ps = detail::number_list(v, key);
      else if (key == "q") cfg.q = v.get<double>();
      else if (key == "family") cfg.families = detail::string_list(v, key);
      else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (key == "out-dir") cfg.out_dir = v.get<std::string>();
      else if (key == "threads") cfg.threads = v.get<int>();
      else if (key == "voxel-budget") cfg.voxel_budget = v.get<std::size_t>();
      else if (key == "oversample") cfg.oversample = v.get<int>();
      else if (key == "spacing-factor") cfg.spacing_factor = v.get<double>();
      else if (key == "shared-grid") cfg.shared_grid = v.get<bool>();
      else if (key == "preset") cfg.preset = v.get<std::string>();
      else if (key == "N") {
        cfg.tubes.clear();
        for (double x : detail::number_list(v, key))
          cfg.tubes.push_back(static_cast<int>(x));
      } else if (key == "out") cfg.out_file = v.get<std::string>();
      else if (key == "manifest") cfg.manifest_path = v.get<std::string>();
      else if (key == "k") cfg.k = v.get<int>();
      else if (key == "maxorder") cfg.maxorder = v.get<int>();
      else throw validation_error("unknown config key '" + key + "'");
    } catch (const nlohmann::json::exception& e) {
      throw validation_error("config field '" + key + "' in '" + path +
                             "': " + e.what());
    }
  }
  validate_config(cfg);
  return cfg;
}

inline Profile profile_from_config(const RunConfig& cfg) {
  if (cfg.profile.empty())
    throw validation_error("missing profile: pass --profile or a config");
  Interval dom{cfg.domain_lo, cfg.domain_hi};
  if (cfg.profile == "torus") return Profile::torus(cfg.minor, dom);
  if (cfg.profile == "cone") return Profile::cone(cfg.slope, dom);
  if (cfg.profile == "quasi-torus")
    return Profile::quasi_torus(cfg.order, cfg.tail, dom);
  if (cfg.profile == "perturbed-cone")
    return Profile::perturbed_cone(cfg.order, cfg.tail, dom);
  if (cfg.profile == "power-series")
    return Profile::power_series(cfg.center, cfg.coeffs, cfg.radius, dom);
  throw validation_error("unknown profile kind '" + cfg.profile + "'");
}

// Fully-resolved echo written next to every run's outputs so a run can be
// reproduced from its artifacts alone.
inline nlohmann::json resolved_config_json(const RunConfig& cfg,
                                           const std::string& subcommand) {
  nlohmann::json j;
  j["subcommand"] = subcommand;
  j["profile"] = cfg.profile;
  j["minor"] = cfg.minor;
  j["slope"] = cfg.slope;
  j["order"] = cfg.order;
  j["tail"] = cfg.tail;
  j["coeffs"] = cfg.coeffs;
  j["center"] = cfg.center;
  if (std::isfinite(cfg.radius)) j["radius"] = cfg.radius;
  j["domain"] = {cfg.domain_lo, cfg.domain_hi};
  j["delta"] = cfg.deltas;
  j["p"] = cfg.ps;
  j["q"] = cfg.q;
  j["family"] = cfg.families;
  j["seed"] = cfg.seed;
  j["out-dir"] = cfg.out_dir;
  j["threads"] = cfg.threads;
  j["voxel-budget"] = cfg.voxel_budget;
  j["oversample"] = cfg.oversample;
  j["spacing-factor"] = cfg.spacing_factor;
  j["shared-grid"] = cfg.shared_grid;
  j["preset"] = cfg.preset;
  j["N"] = cfg.tubes;
  if (!cfg.out_file.empty()) j["out"] = cfg.out_file;
  if (!cfg.manifest_path.empty()) j["manifest"] = cfg.manifest_path;
  j["k"] = cfg.k;
  j["maxorder"] = cfg.maxorder;
  return j;
}

}  // namespace revdec
