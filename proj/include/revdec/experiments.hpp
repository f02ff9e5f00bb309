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

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "revdec/common.hpp"
#include "revdec/lattice.hpp"
#include "revdec/norms.hpp"
#include "revdec/partition.hpp"
#include "revdec/profile.hpp"
#include "revdec/signal.hpp"

namespace revdec {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
};

enum class SweepKey { InverseDelta, TubeCount };

// Log-log least squares of ratio against the chosen abscissa.
inline FitResult sweep_and_fit(const std::vector<ExperimentRecord>& recs,
                               SweepKey key) {
  if (recs.size() < 3)
    throw validation_error("need at least 3 records to fit");
  std::vector<double> xs, ys;
  for (const auto& r : recs) {
    double x = key == SweepKey::InverseDelta ? 1.0 / r.delta : r.x;
    if (!(x > 0.0) || !(r.ratio > 0.0))
      throw validation_error("fit requires positive abscissae and ratios");
    xs.push_back(std::log(x));
    ys.push_back(std::log(r.ratio));
  }
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j)
      if (xs[i] == xs[j])
        throw validation_error("sweep abscissae must be distinct");

  const std::size_t n = xs.size();
  double xbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    xbar += xs[i];
    ybar += ys[i];
  }
  xbar /= static_cast<double>(n);
  ybar /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - xbar) * (xs[i] - xbar);
    sxy += (xs[i] - xbar) * (ys[i] - ybar);
  }
  FitResult fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double res = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ssr += res * res;
  }
  fit.stderr_slope =
      n > 2 ? std::sqrt(ssr / static_cast<double>(n - 2) / sxx) : 0.0;
  return fit;
}

// Line baseline: the delta-tube over the unit segment split into N equal
// tubes, measured with the l2 aggregate.
inline ExperimentRecord prop5_experiment(int N, double delta, double p,
                                         Family family,
                                         std::uint64_t seed = 0,
                                         const NormOptions& opts = {}) {
  if (N < 1) throw validation_error("tube count must be positive");
  if (!(delta > 0.0 && delta < 1.0))
    throw validation_error("delta must lie in (0,1)");
  if (static_cast<double>(N) * delta > 1.0)
    throw validation_error("tube count times delta must not exceed 1");
  auto t0 = std::chrono::steady_clock::now();
  FrequencyLattice lat = segment_lattice(delta, 0.5 * delta, N);
  TestFunction f = synth_test_function(lat, family, seed);
  ExperimentRecord rec = decoupling_ratio(f, p, 2.0, opts);
  rec.surface = "segment";
  rec.case_label = "line";
  rec.x = static_cast<double>(N);
  rec.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return rec;
}

// A named surface with its shipped partition, ready to measure.
struct ExperimentPreset {
  std::string name;
  Profile profile;
  PartitionManifest manifest;
};

namespace detail {

inline std::string dominant_case(const PartitionManifest& man) {
  std::map<std::string, std::size_t> tally;
  for (const auto& b : man.boxes) ++tally[to_string(b.footprint.kind)];
  std::string best;
  std::size_t most = 0;
  for (const auto& [label, count] : tally)
    if (count > most) {
      most = count;
      best = label;
    }
  return best;
}

inline PartitionManifest filter_by_side(const PartitionManifest& man,
                                        int side) {
  PartitionManifest out;
  out.profile_id = man.profile_id + (side < 0 ? "-inner" : "-outer");
  out.delta = man.delta;
  for (const auto& b : man.boxes) {
    bool outer = b.footprint.radial.lo >= 1.0;
    if ((side < 0 && !outer) || (side > 0 && outer)) out.boxes.push_back(b);
  }
  out.counts["total"] = out.boxes.size();
  return out;
}

}  // namespace detail

// Shipped presets. torus and perturbed-cone carry the full multiscale
// partition; cone-plates the ruled-surface plates; cone-square the curved
// root-delta grid on the cone (conjectured box shape, not flat-certified);
// torus-inner / torus-outer restrict the torus partition by radial side.
inline ExperimentPreset make_preset(const std::string& name, double delta) {
  if (name == "torus" || name == "torus-inner" || name == "torus-outer") {
    Profile p = Profile::torus(0.5, {0.7, 1.3});
    PartitionManifest man = build_partition(p, delta);
    man.profile_id = "torus";
    if (name == "torus") return {name, p, man};
    return {name, p, detail::filter_by_side(man, name == "torus-inner" ? -1 : 1)};
  }
  if (name == "perturbed-cone") {
    Profile p = Profile::perturbed_cone(3, {}, {0.5, 1.5});
    PartitionManifest man = build_partition(p, delta);
    man.profile_id = "perturbed-cone";
    return {name, p, man};
  }
  if (name == "cone-plates") {
    Profile p = Profile::cone(1.0, {0.5, 2.0});
    PartitionManifest man;
    man.profile_id = "cone-plates";
    man.delta = delta;
    man.boxes = partition_cone_plates(delta, RuledVariant::Cone);
    man.counts["plates"] = man.boxes.size();
    man.counts["total"] = man.boxes.size();
    return {name, p, man};
  }
  if (name == "cone-square") {
    Profile p = Profile::cone(1.0, {0.5, 2.0});
    PartitionManifest man;
    man.profile_id = "cone-square";
    man.delta = delta;
    man.boxes = partition_nondegenerate(p, p.domain(), delta);
    man.counts["nondegenerate"] = man.boxes.size();
    man.counts["total"] = man.boxes.size();
    return {name, p, man};
  }
  throw validation_error("unknown experiment preset '" + name + "'");
}

// One measured point: discretize, synthesize, take the ratio.
inline ExperimentRecord run_experiment(const ExperimentPreset& preset,
                                       double p, double q, Family family,
                                       std::uint64_t seed,
                                       double spacing_factor = 0.5,
                                       const NormOptions& opts = {}) {
  if (!(spacing_factor > 0.0 && spacing_factor <= 1.0))
    throw validation_error("spacing factor must lie in (0,1]");
  auto t0 = std::chrono::steady_clock::now();
  double delta = preset.manifest.delta;
  FrequencyLattice lat = discretize_support(preset.manifest, preset.profile,
                                            delta, spacing_factor * delta);
  TestFunction f = synth_test_function(lat, family, seed);
  ExperimentRecord rec = decoupling_ratio(f, preset.manifest, p, q, opts);
  rec.surface = preset.name;
  rec.case_label = detail::dominant_case(preset.manifest);
  rec.x = 1.0 / delta;
  rec.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return rec;
}

// CSV emission. Every numeric field uses %.17g so reruns are byte-stable;
// seconds is wall time and the one column reruns may differ in.
inline std::string experiment_csv_header() {
  return "surface,case,delta,p,q,family,seed,num_boxes,norm_f,rhs,ratio,seconds";
}

namespace detail {

inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline std::string experiment_csv_row(const ExperimentRecord& r) {
  std::string row = r.surface + "," + r.case_label + ",";
  row += detail::fmt_g17(r.delta) + "," + detail::fmt_g17(r.p) + "," +
         detail::fmt_g17(r.q) + "," + to_string(r.family) + "," +
         std::to_string(r.seed) + "," + std::to_string(r.num_boxes) + "," +
         detail::fmt_g17(r.norm_f) + "," + detail::fmt_g17(r.rhs) + "," +
         detail::fmt_g17(r.ratio) + ",";
  char sec[32];
  std::snprintf(sec, sizeof(sec), "%.6f", r.seconds);
  row += sec;
  return row;
}

inline std::string prop5_csv_header() { return "N,delta,p,family,ratio"; }

inline std::string prop5_csv_row(const ExperimentRecord& r) {
  return std::to_string(static_cast<long long>(std::llround(r.x))) + "," +
         detail::fmt_g17(r.delta) + "," + detail::fmt_g17(r.p) + "," +
         to_string(r.family) + "," + detail::fmt_g17(r.ratio);
}

}  // namespace revdec
