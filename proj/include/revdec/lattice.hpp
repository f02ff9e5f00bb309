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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "revdec/common.hpp"
#include "revdec/partition.hpp"
#include "revdec/profile.hpp"

namespace revdec {

// One frequency node: position = spacing * m; t is the signed distance to
// the surface in units of delta (drives the smooth-indicator profile).
struct LatticePoint {
  std::array<int, 3> m{0, 0, 0};
  double t = 0.0;
  int box = -1;
};

struct FrequencyLattice {
  int dim = 3;
  double spacing = 0.0;
  double delta = 0.0;
  std::size_t num_boxes = 0;
  std::vector<LatticePoint> points;

  Vec3 position(const LatticePoint& pt) const {
    return {spacing * pt.m[0], spacing * pt.m[1], spacing * pt.m[2]};
  }
};

// Exact distance from the half-plane point (r0, z0) to the profile curve,
// minimized by damped Newton with domain clamping.
struct CurveFoot {
  double r = 0.0;
  double dist = 0.0;
  double sign = 1.0;
};

inline CurveFoot nearest_curve_point(const Profile& p, double r0, double z0) {
  Interval dom = p.domain();
  double r = std::clamp(r0, dom.lo, dom.hi);
  for (int it = 0; it < 8; ++it) {
    Jet j = p.jet(r, 2);
    double e = j.d[0] - z0;
    double g = (r - r0) + e * j.d[1];
    double h = 1.0 + j.d[1] * j.d[1] + e * j.d[2];
    if (h <= 0.0) break;
    double step = g / h;
    double next = std::clamp(r - step, dom.lo, dom.hi);
    if (std::abs(next - r) < 1e-14) {
      r = next;
      break;
    }
    r = next;
  }
  double e = p.value(r) - z0;
  CurveFoot foot;
  foot.r = r;
  foot.dist = std::hypot(r - r0, e);
  foot.sign = e > 0.0 ? -1.0 : 1.0;
  return foot;
}

namespace detail {

struct AngularSlot {
  double lo;
  int idx;
};

struct RadialBand {
  double lo, hi;
  std::vector<AngularSlot> slots;
};

// Footprints form radial bands, each tiled by angular arcs starting at 0;
// lookup is two binary searches.
struct BandIndex {
  std::vector<RadialBand> bands;

  static BandIndex build(const PartitionManifest& man) {
    BandIndex ix;
    for (std::size_t i = 0; i < man.boxes.size(); ++i) {
      const auto& fp = man.boxes[i].footprint;
      auto it = std::find_if(ix.bands.begin(), ix.bands.end(),
                             [&](const RadialBand& b) {
                               return b.lo == fp.radial.lo;
                             });
      if (it == ix.bands.end()) {
        ix.bands.push_back({fp.radial.lo, fp.radial.hi, {}});
        it = std::prev(ix.bands.end());
      } else if (it->hi != fp.radial.hi) {
        throw validation_error("manifest radial bands are inconsistent");
      }
      it->slots.push_back({fp.angular.lo, static_cast<int>(i)});
    }
    std::sort(ix.bands.begin(), ix.bands.end(),
              [](const RadialBand& a, const RadialBand& b) {
                return a.lo < b.lo;
              });
    for (auto& b : ix.bands)
      std::sort(b.slots.begin(), b.slots.end(),
                [](const AngularSlot& a, const AngularSlot& c) {
                  return a.lo < c.lo;
                });
    return ix;
  }

  int find(double r, double alpha) const {
    auto bit = std::upper_bound(bands.begin(), bands.end(), r,
                                [](double v, const RadialBand& b) {
                                  return v < b.lo;
                                });
    if (bit == bands.begin()) return -1;
    --bit;
    if (!(r >= bit->lo && r < bit->hi)) return -1;
    auto sit = std::upper_bound(bit->slots.begin(), bit->slots.end(), alpha,
                                [](double v, const AngularSlot& s) {
                                  return v < s.lo;
                                });
    if (sit == bit->slots.begin()) return -1;
    return std::prev(sit)->idx;
  }
};

}  // namespace detail

// Spacing-grid discretization of the delta-neighborhood of the surface:
// a point belongs iff its exact distance to the surface is <= delta and its
// cylindrical shadow lands in a manifest footprint (which then owns it).
inline FrequencyLattice discretize_support(const PartitionManifest& man,
                                           const Profile& p, double delta,
                                           double spacing) {
  if (!(spacing > 0.0) || spacing > delta)
    throw validation_error("lattice spacing must lie in (0, delta]");

  auto index = detail::BandIndex::build(man);
  Interval dom = p.domain();
  double zmin = p.value(dom.lo), zmax = zmin;
  const int scan = 1024;
  for (int i = 0; i <= scan; ++i) {
    double v = p.value(dom.lo + i * dom.length() / scan);
    zmin = std::min(zmin, v);
    zmax = std::max(zmax, v);
  }
  double lmax = 0.0;
  for (int i = 0; i <= 256; ++i) {
    double g1 = p.jet(dom.lo + i * dom.length() / 256, 1).d[1];
    lmax = std::max(lmax, std::abs(g1));
  }
  // dist <= delta forces |z - gamma(clamp(rxy))| <= delta * (1 + 2 lmax);
  // inflate the sampled slope bound before using it as a reject filter.
  const double zband = delta * (1.0 + 2.2 * lmax + 0.1);

  const double h = spacing;
  const double rmax = dom.hi + delta;
  const double rmin = std::max(0.0, dom.lo - delta);
  const int i12 = static_cast<int>(std::ceil(rmax / h));
  const int z0 = static_cast<int>(std::floor((zmin - delta) / h));
  const int z1 = static_cast<int>(std::ceil((zmax + delta) / h));

  FrequencyLattice lat;
  lat.dim = 3;
  lat.spacing = h;
  lat.delta = delta;
  lat.num_boxes = man.boxes.size();

  for (int i1 = -i12; i1 <= i12; ++i1) {
    double x = h * i1;
    for (int i2 = -i12; i2 <= i12; ++i2) {
      double y = h * i2;
      double rxy = std::hypot(x, y);
      if (rxy < rmin || rxy > rmax) continue;
      double alpha = std::atan2(y, x);
      if (alpha < 0.0) alpha += kTwoPi;
      int box = index.find(rxy, alpha);
      if (box < 0) continue;
      double gr = p.value(std::clamp(rxy, dom.lo, dom.hi));
      for (int i3 = z0; i3 <= z1; ++i3) {
        double z = h * i3;
        if (std::abs(z - gr) > zband) continue;
        CurveFoot foot = nearest_curve_point(p, rxy, z);
        if (foot.dist > delta) continue;
        LatticePoint pt;
        pt.m = {i1, i2, i3};
        pt.t = foot.sign * foot.dist / delta;
        pt.box = box;
        lat.points.push_back(pt);
      }
    }
  }
  if (lat.points.empty())
    throw validation_error(
        "resolution too coarse: no lattice points fall in the neighborhood");
  return lat;
}

// 2-D desk-scale lattice for the unit segment [0,1] x {0}: the neighborhood
// is the tube |y| <= delta over the segment, split into `tubes` equal
// half-open pieces along x.
inline FrequencyLattice segment_lattice(double delta, double spacing,
                                        int tubes) {
  if (!(spacing > 0.0) || spacing > delta)
    throw validation_error("lattice spacing must lie in (0, delta]");
  if (tubes < 1) throw validation_error("tube count must be positive");

  const double h = spacing;
  const int nx = static_cast<int>(std::llround(1.0 / h));
  const int ny = static_cast<int>(std::floor(delta / h + 1e-9));

  FrequencyLattice lat;
  lat.dim = 2;
  lat.spacing = h;
  lat.delta = delta;
  lat.num_boxes = static_cast<std::size_t>(tubes);
  for (int i = 0; i <= nx; ++i) {
    double x = h * i;
    int box = std::min(tubes - 1,
                       static_cast<int>(std::floor(x * tubes)));
    for (int j = -ny; j <= ny; ++j) {
      LatticePoint pt;
      pt.m = {i, j, 0};
      pt.t = (h * j) / delta;
      pt.box = box;
      lat.points.push_back(pt);
    }
  }
  return lat;
}

// Dimensional reduction for large grids: the (xi2, xi3) half-plane section
// of the neighborhood (one angular Fourier mode), boxed by radial band.
inline FrequencyLattice section_lattice(const PartitionManifest& man,
                                        const Profile& p, double delta,
                                        double spacing) {
  if (!(spacing > 0.0) || spacing > delta)
    throw validation_error("lattice spacing must lie in (0, delta]");
  auto index = detail::BandIndex::build(man);
  Interval dom = p.domain();
  double zmin = p.value(dom.lo), zmax = zmin;
  for (int i = 0; i <= 1024; ++i) {
    double v = p.value(dom.lo + i * dom.length() / 1024);
    zmin = std::min(zmin, v);
    zmax = std::max(zmax, v);
  }

  const double h = spacing;
  FrequencyLattice lat;
  lat.dim = 2;
  lat.spacing = h;
  lat.delta = delta;

  std::vector<int> band_of;
  const int r0 = static_cast<int>(std::floor((dom.lo - delta) / h));
  const int r1 = static_cast<int>(std::ceil((dom.hi + delta) / h));
  const int z0 = static_cast<int>(std::floor((zmin - delta) / h));
  const int z1 = static_cast<int>(std::ceil((zmax + delta) / h));
  std::vector<int> seen_bands;
  for (int i2 = r0; i2 <= r1; ++i2) {
    double r = h * i2;
    if (r <= 0.0) continue;
    auto bit = std::upper_bound(
        index.bands.begin(), index.bands.end(), r,
        [](double v, const detail::RadialBand& b) { return v < b.lo; });
    if (bit == index.bands.begin()) continue;
    --bit;
    if (!(r >= bit->lo && r < bit->hi)) continue;
    int band = static_cast<int>(bit - index.bands.begin());
    if (std::find(seen_bands.begin(), seen_bands.end(), band) ==
        seen_bands.end())
      seen_bands.push_back(band);
    int box = static_cast<int>(
        std::find(seen_bands.begin(), seen_bands.end(), band) -
        seen_bands.begin());
    for (int i3 = z0; i3 <= z1; ++i3) {
      CurveFoot foot = nearest_curve_point(p, r, h * i3);
      if (foot.dist > delta) continue;
      LatticePoint pt;
      pt.m = {0, i2, i3};
      pt.t = foot.sign * foot.dist / delta;
      pt.box = box;
      lat.points.push_back(pt);
    }
  }
  lat.num_boxes = seen_bands.size();
  if (lat.points.empty())
    throw validation_error(
        "resolution too coarse: no lattice points fall in the neighborhood");
  return lat;
}

}  // namespace revdec
