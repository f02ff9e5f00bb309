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

#include <fftw3.h>

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "revdec/common.hpp"
#include "revdec/lattice.hpp"
#include "revdec/partition.hpp"
#include "revdec/signal.hpp"

namespace revdec {

struct NormOptions {
  int oversample = 2;
  std::size_t voxel_budget = std::size_t(1) << 24;
  // Reuse the whole-lattice grid for every box instead of each box's own
  // bounding subgrid (slower, for cross-checks).
  bool shared_grid = false;
  int threads = 0;
};

// Measured decoupling quotient plus everything needed to reproduce it.
struct ExperimentRecord {
  std::string surface;
  std::string case_label;
  double delta = 0.0;
  double p = 2.0;
  double q = 2.0;
  Family family = Family::Constant;
  std::uint64_t seed = 0;
  double x = 0.0;
  std::size_t num_boxes = 0;
  double norm_f = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double seconds = 0.0;
};

namespace detail {

// Plans are cached per grid shape; planning is serialized, new-array
// execution is thread-safe.
class PlanCache {
public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(const std::array<int, 3>& dims) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = plans_.find(dims);
    if (it != plans_.end()) return it->second;
    std::vector<int> sizes;
    std::size_t total = 1;
    for (int d : dims) {
      total *= static_cast<std::size_t>(d);
      if (d > 1) sizes.push_back(d);
    }
    fftw_plan plan = nullptr;
    if (!sizes.empty()) {
      fftw_complex* buf = fftw_alloc_complex(total);
      if (!buf) throw capability_error("DFT buffer allocation failed");
      plan = fftw_plan_dft(static_cast<int>(sizes.size()), sizes.data(), buf,
                           buf, FFTW_BACKWARD, FFTW_ESTIMATE);
      fftw_free(buf);
      if (!plan) throw capability_error("DFT planning failed");
    }
    plans_.emplace(dims, plan);
    return plan;
  }

private:
  PlanCache() = default;
  std::mutex mu_;
  std::map<std::array<int, 3>, fftw_plan> plans_;
};

struct GridShape {
  std::array<int, 3> base{0, 0, 0};
  std::array<int, 3> dims{1, 1, 1};
  std::size_t voxels = 1;
};

// M_d = oversample * integer frequency extent; a direction the subset does
// not vary in contributes only a global phase and collapses to size 1.
inline GridShape grid_shape(const FrequencyLattice& lat,
                            const std::vector<std::uint32_t>& subset,
                            int oversample) {
  GridShape g;
  std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
  for (std::size_t s = 0; s < subset.size(); ++s) {
    const auto& m = lat.points[subset[s]].m;
    for (int d = 0; d < 3; ++d) {
      if (s == 0 || m[d] < lo[d]) lo[d] = m[d];
      if (s == 0 || m[d] > hi[d]) hi[d] = m[d];
    }
  }
  for (int d = 0; d < 3; ++d) {
    int extent = hi[d] - lo[d] + 1;
    g.base[d] = lo[d];
    g.dims[d] = extent == 1 ? 1 : oversample * extent;
    g.voxels *= static_cast<std::size_t>(g.dims[d]);
  }
  return g;
}

// Periodized L^p average of the subset-restricted function: scatter the
// coefficients on the DFT grid, evaluate, take (mean |f|^p)^{1/p}.
inline double subset_norm(const FrequencyLattice& lat,
                          const std::vector<std::complex<double>>& coeffs,
                          const std::vector<std::uint32_t>& subset, double p,
                          const GridShape& g) {
  if (subset.empty()) return 0.0;
  fftw_complex* buf = fftw_alloc_complex(g.voxels);
  if (!buf) throw capability_error("DFT buffer allocation failed");
  for (std::size_t i = 0; i < g.voxels; ++i) buf[i][0] = buf[i][1] = 0.0;
  const std::size_t s1 = static_cast<std::size_t>(g.dims[1]) *
                         static_cast<std::size_t>(g.dims[2]);
  const std::size_t s2 = static_cast<std::size_t>(g.dims[2]);
  for (std::uint32_t idx : subset) {
    const auto& m = lat.points[idx].m;
    std::size_t off = 0;
    std::size_t stride[3] = {s1, s2, 1};
    for (int d = 0; d < 3; ++d) {
      int rel = (m[d] - g.base[d]) % g.dims[d];
      off += static_cast<std::size_t>(rel) * stride[d];
    }
    buf[off][0] += coeffs[idx].real();
    buf[off][1] += coeffs[idx].imag();
  }
  fftw_plan plan = PlanCache::instance().get(g.dims);
  if (plan) fftw_execute_dft(plan, buf, buf);
  long double acc = 0.0L;
  const long double ph = 0.5L * static_cast<long double>(p);
  const bool p2 = p == 2.0, p4 = p == 4.0, p6 = p == 6.0;
  for (std::size_t i = 0; i < g.voxels; ++i) {
    long double sq = static_cast<long double>(buf[i][0]) * buf[i][0] +
                     static_cast<long double>(buf[i][1]) * buf[i][1];
    if (p2)
      acc += sq;
    else if (p4)
      acc += sq * sq;
    else if (p6)
      acc += sq * sq * sq;
    else
      acc += powl(sq, ph);
  }
  fftw_free(buf);
  long double mean = acc / static_cast<long double>(g.voxels);
  return std::pow(static_cast<double>(mean), 1.0 / p);
}

inline std::vector<std::uint32_t> all_indices(const FrequencyLattice& lat) {
  std::vector<std::uint32_t> idx(lat.points.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    idx[i] = static_cast<std::uint32_t>(i);
  return idx;
}

inline void check_budget(std::size_t voxels, const NormOptions& opts) {
  if (voxels > opts.voxel_budget)
    throw capability_error(
        "DFT grid of " + std::to_string(voxels) +
        " voxels exceeds the budget of " + std::to_string(opts.voxel_budget) +
        "; increase delta, coarsen spacing, or use the 2-D section mode");
}

}  // namespace detail

inline double lp_norm(const TestFunction& f, double p, int oversample = 2,
                      const NormOptions& opts = {}) {
  if (!(p >= 1.0)) throw validation_error("p must be at least 1");
  if (oversample < 2) throw validation_error("oversample must be at least 2");
  if (!f.lattice || f.coeffs.size() != f.lattice->points.size())
    throw validation_error("test function does not match its lattice");
  auto idx = detail::all_indices(*f.lattice);
  auto g = detail::grid_shape(*f.lattice, idx, oversample);
  detail::check_budget(g.voxels, opts);
  return detail::subset_norm(*f.lattice, f.coeffs, idx, p, g);
}

// Core ratio: ||f||_p over the q-aggregate of per-box norms; q=4 carries the
// |P|^{1/4} normalization with |P| = total partition size.
inline ExperimentRecord decoupling_ratio(const TestFunction& f, double p,
                                         double q,
                                         const NormOptions& opts = {}) {
  if (!(p >= 1.0)) throw validation_error("p must be at least 1");
  if (q != 2.0 && q != 4.0)
    throw validation_error("ell exponent q must be 2 or 4");
  if (!f.lattice || f.coeffs.size() != f.lattice->points.size())
    throw validation_error("test function does not match its lattice");
  const FrequencyLattice& lat = *f.lattice;
  if (lat.num_boxes == 0)
    throw validation_error("lattice carries no box assignment");

  auto full = detail::all_indices(lat);
  auto gfull = detail::grid_shape(lat, full, opts.oversample);
  detail::check_budget(gfull.voxels, opts);

  std::vector<std::vector<std::uint32_t>> by_box(lat.num_boxes);
  for (std::size_t i = 0; i < lat.points.size(); ++i) {
    int b = lat.points[i].box;
    if (b < 0 || static_cast<std::size_t>(b) >= lat.num_boxes)
      throw validation_error("lattice point with out-of-range box index");
    by_box[static_cast<std::size_t>(b)].push_back(
        static_cast<std::uint32_t>(i));
  }

  ExperimentRecord rec;
  rec.delta = lat.delta;
  rec.p = p;
  rec.q = q;
  rec.family = f.family;
  rec.seed = f.seed;
  rec.num_boxes = lat.num_boxes;
  rec.norm_f = detail::subset_norm(lat, f.coeffs, full, p, gfull);

  std::vector<double> box_norm(lat.num_boxes, 0.0);
  int threads = opts.threads > 0 ? opts.threads : default_thread_count();
  parallel_for(lat.num_boxes, threads, [&](std::size_t b) {
    if (by_box[b].empty()) return;
    detail::GridShape g =
        opts.shared_grid ? gfull
                         : detail::grid_shape(lat, by_box[b], opts.oversample);
    detail::check_budget(g.voxels, opts);
    box_norm[b] = detail::subset_norm(lat, f.coeffs, by_box[b], p, g);
  });

  long double agg = 0.0L;
  for (double s : box_norm) {
    long double v = s;
    agg += q == 2.0 ? v * v : v * v * v * v;
  }
  double rhs = q == 2.0 ? std::sqrt(static_cast<double>(agg))
                        : std::pow(static_cast<double>(agg), 0.25) *
                              std::pow(static_cast<double>(lat.num_boxes), 0.25);
  if (!(rhs > 0.0))
    throw validation_error("degenerate test function: zero norm");
  rec.rhs = rhs;
  rec.ratio = rec.norm_f / rhs;
  return rec;
}

inline ExperimentRecord decoupling_ratio(const TestFunction& f,
                                         const PartitionManifest& man,
                                         double p, double q,
                                         const NormOptions& opts = {}) {
  if (f.lattice && f.lattice->num_boxes != man.boxes.size())
    throw validation_error("lattice box count does not match the manifest");
  ExperimentRecord rec = decoupling_ratio(f, p, q, opts);
  rec.surface = man.profile_id;
  return rec;
}

}  // namespace revdec
