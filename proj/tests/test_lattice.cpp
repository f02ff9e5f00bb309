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
#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "revdec/lattice.hpp"
#include "revdec/partition.hpp"
#include "revdec/profile.hpp"

using Catch::Matchers::ContainsSubstring;
using namespace revdec;

namespace {

// Dense scan plus local refinement; slow reference for the Newton foot.
double brute_force_distance(const Profile& p, double r0, double z0) {
  Interval dom = p.domain();
  double best = std::numeric_limits<double>::infinity();
  double bestr = dom.lo;
  const int n = 20000;
  for (int i = 0; i <= n; ++i) {
    double r = dom.lo + i * dom.length() / n;
    double d = std::hypot(r - r0, p.value(r) - z0);
    if (d < best) {
      best = d;
      bestr = r;
    }
  }
  double lo = std::max(dom.lo, bestr - dom.length() / n);
  double hi = std::min(dom.hi, bestr + dom.length() / n);
  for (int i = 0; i <= 400; ++i) {
    double r = lo + i * (hi - lo) / 400;
    best = std::min(best, std::hypot(r - r0, p.value(r) - z0));
  }
  return best;
}

}  // namespace

TEST_CASE("segment lattice reproduces the 65 x 5 count") {
  const double delta = 1.0 / 32.0;
  FrequencyLattice lat = segment_lattice(delta, delta / 2.0, 16);
  REQUIRE(lat.dim == 2);
  REQUIRE(lat.points.size() == 325);
  REQUIRE(lat.num_boxes == 16);

  std::set<std::pair<int, int>> seen;
  for (const auto& pt : lat.points) {
    seen.insert({pt.m[0], pt.m[1]});
    REQUIRE(pt.m[0] >= 0);
    REQUIRE(pt.m[0] <= 64);
    REQUIRE(std::abs(pt.m[1]) <= 2);
    REQUIRE(pt.m[2] == 0);
    REQUIRE(std::abs(pt.t) <= 1.0);
    REQUIRE(pt.box >= 0);
    REQUIRE(pt.box < 16);
  }
  REQUIRE(seen.size() == 325);
}

TEST_CASE("segment tubes are equal half-open pieces") {
  const double delta = 1.0 / 32.0;
  const int N = 8;
  FrequencyLattice lat = segment_lattice(delta, delta / 2.0, N);
  for (const auto& pt : lat.points) {
    double x = lat.spacing * pt.m[0];
    int expect = std::min(N - 1, static_cast<int>(std::floor(x * N)));
    REQUIRE(pt.box == expect);
  }
  // 65 x-columns over 8 tubes: tubes 0..6 hold 8 columns, the closed right
  // endpoint joins the last tube.
  std::vector<int> per_tube(N, 0);
  for (const auto& pt : lat.points)
    if (pt.m[1] == 0) ++per_tube[static_cast<std::size_t>(pt.box)];
  for (int b = 0; b + 1 < N; ++b) REQUIRE(per_tube[b] == 8);
  REQUIRE(per_tube[N - 1] == 9);
}

TEST_CASE("lattice spacing above delta is rejected") {
  REQUIRE_THROWS_AS(segment_lattice(1.0 / 32.0, 1.0 / 16.0, 4),
                    validation_error);
  Profile p = Profile::torus(0.5, {0.6, 1.4});
  PartitionManifest man = build_partition(p, 1.0 / 64.0);
  REQUIRE_THROWS_WITH(discretize_support(man, p, 1.0 / 64.0, 1.0 / 32.0),
                      ContainsSubstring("spacing"));
}

TEST_CASE("surface lattice membership is a true distance test") {
  Profile p = Profile::torus(0.5, {0.6, 1.4});
  const double delta = 1.0 / 64.0;
  PartitionManifest man = build_partition(p, delta);
  FrequencyLattice lat = discretize_support(man, p, delta, delta / 2.0);

  REQUIRE(lat.dim == 3);
  REQUIRE(lat.num_boxes == man.boxes.size());
  REQUIRE(lat.points.size() > 1000);

  // Newton distances agree with a dense scan, and every member is within
  // delta of the surface.
  Rng rng(404);
  std::vector<std::size_t> picks;
  for (int i = 0; i < 40; ++i)
    picks.push_back(rng.index(lat.points.size()));
  for (std::size_t idx : picks) {
    const auto& pt = lat.points[idx];
    Vec3 pos = lat.position(pt);
    double rxy = std::hypot(pos.x, pos.y);
    double ref = brute_force_distance(p, rxy, pos.z);
    double newton = std::abs(pt.t) * delta;
    REQUIRE_THAT(newton, Catch::Matchers::WithinAbs(ref, 1e-10));
    REQUIRE(newton <= delta * (1.0 + 1e-12));
  }
}

TEST_CASE("every lattice point lies in exactly the box that owns it") {
  Profile p = Profile::torus(0.5, {0.6, 1.4});
  const double delta = 1.0 / 64.0;
  PartitionManifest man = build_partition(p, delta);
  FrequencyLattice lat = discretize_support(man, p, delta, delta / 2.0);

  auto shadow = [&](const LatticePoint& pt) {
    Vec3 pos = lat.position(pt);
    double rxy = std::hypot(pos.x, pos.y);
    double alpha = std::atan2(pos.y, pos.x);
    if (alpha < 0.0) alpha += kTwoPi;
    return std::pair<double, double>{rxy, alpha};
  };

  std::size_t owner_misses = 0;
  for (const auto& pt : lat.points) {
    auto [rxy, alpha] = shadow(pt);
    const auto& fp = man.boxes[static_cast<std::size_t>(pt.box)].footprint;
    bool in_r = rxy >= fp.radial.lo && rxy < fp.radial.hi;
    bool in_a = alpha >= fp.angular.lo && alpha < fp.angular.hi;
    if (!(in_r && in_a)) ++owner_misses;
  }
  REQUIRE(owner_misses == 0);

  // Uniqueness across all footprints, spot-checked.
  Rng rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    const auto& pt = lat.points[rng.index(lat.points.size())];
    auto [rxy, alpha] = shadow(pt);
    std::size_t hits = 0;
    std::size_t owner = 0;
    for (std::size_t b = 0; b < man.boxes.size(); ++b) {
      const auto& fp = man.boxes[b].footprint;
      if (rxy >= fp.radial.lo && rxy < fp.radial.hi &&
          alpha >= fp.angular.lo && alpha < fp.angular.hi) {
        ++hits;
        owner = b;
      }
    }
    REQUIRE(hits == 1);
    REQUIRE(static_cast<std::size_t>(pt.box) == owner);
  }
}

TEST_CASE("lattice point order is deterministic") {
  Profile p = Profile::torus(0.5, {0.6, 1.4});
  const double delta = 1.0 / 32.0;
  PartitionManifest man = build_partition(p, delta);
  FrequencyLattice a = discretize_support(man, p, delta, delta / 2.0);
  FrequencyLattice b = discretize_support(man, p, delta, delta / 2.0);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    REQUIRE(a.points[i].m == b.points[i].m);
    REQUIRE(a.points[i].box == b.points[i].box);
    REQUIRE(a.points[i].t == b.points[i].t);
  }
}

TEST_CASE("an unreachable footprint yields the coarse-resolution error") {
  Profile p = Profile::torus(0.5, {0.6, 1.4});
  const double delta = 1.0 / 64.0;
  PartitionManifest man;
  man.profile_id = p.id();
  man.delta = delta;
  // A radial band so thin no grid shadow radius sqrt(i1^2+i2^2)*spacing
  // can land inside it.
  PartitionBox box;
  box.footprint.angular = {0.0, kTwoPi};
  box.footprint.radial = {0.6, 0.6 + 1e-11};
  box.footprint.kind = PieceCase::Nondegenerate;
  man.boxes.push_back(box);
  man.counts["total"] = 1;
  REQUIRE_THROWS_WITH(discretize_support(man, p, delta, delta),
                      ContainsSubstring("resolution too coarse"));
}

TEST_CASE("section lattice reduces to radial bands") {
  Profile p = Profile::torus(0.5, {0.6, 1.4});
  const double delta = 1.0 / 64.0;
  PartitionManifest man = build_partition(p, delta);
  FrequencyLattice lat = section_lattice(man, p, delta, delta / 2.0);

  REQUIRE(lat.dim == 2);
  REQUIRE(lat.num_boxes >= 4);
  REQUIRE(lat.num_boxes < man.boxes.size());
  for (const auto& pt : lat.points) {
    REQUIRE(pt.m[0] == 0);
    REQUIRE(std::abs(pt.t) <= 1.0);
    REQUIRE(pt.box >= 0);
    REQUIRE(static_cast<std::size_t>(pt.box) < lat.num_boxes);
    double r = lat.spacing * pt.m[1];
    double dist = brute_force_distance(p, r, lat.spacing * pt.m[2]);
    REQUIRE(dist <= delta * (1.0 + 1e-9));
  }
}
