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
#include <limits>
#include <vector>

#include "revdec/partition.hpp"

using namespace revdec;
using Catch::Approx;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Profile torus_profile() { return Profile::torus(0.5, {0.6, 1.4}); }

ZeroPoint canonical_qt_zero(int n) {
  ZeroPoint z;
  z.r = 1.0;
  z.n = n;
  z.kind = ProfileKind::QuasiTorus;
  z.delta = 0.25;
  z.a0 = 1.0;
  z.a1 = 0.0;
  z.cn = 1.0;
  return z;
}

ZeroPoint canonical_pc_zero(int n) {
  ZeroPoint z = canonical_qt_zero(n);
  z.kind = ProfileKind::PerturbedCone;
  z.a1 = 1.0;
  return z;
}

bool footprints_overlap(const CapFootprint& a, const CapFootprint& b) {
  bool ang = a.angular.lo < b.angular.hi && b.angular.lo < a.angular.hi;
  bool rad = a.radial.lo < b.radial.hi && b.radial.lo < a.radial.hi;
  return ang && rad;
}

}  // namespace

TEST_CASE("dyadic annuli double in scale and mirror across the zero") {
  auto ann = dyadic_annuli(2, std::ldexp(1.0, -12), 0.25);
  REQUIRE(ann.size() == 10);

  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(ann[i].side == -1);
    CHECK(ann[i].k == static_cast<int>(i));
    CHECK(ann[i + 5].side == +1);
  }

  const Annulus& r0 = ann[5];
  CHECK(r0.s == std::ldexp(1.0, -6));
  CHECK(r0.u.lo == 1.0);
  CHECK(r0.u.hi == 1.0 + std::ldexp(1.0, -6));
  CHECK_FALSE(r0.clipped);

  const Annulus& r3 = ann[8];
  CHECK(r3.s == std::ldexp(1.0, -3));
  CHECK(r3.u.lo == 1.0 + std::ldexp(1.0, -4));
  CHECK(r3.u.hi == 1.0 + std::ldexp(1.0, -3));

  const Annulus& l3 = ann[3];
  CHECK(l3.u.lo == 1.0 - std::ldexp(1.0, -3));
  CHECK(l3.u.hi == 1.0 - std::ldexp(1.0, -4));

  const Annulus& r4 = ann[9];
  CHECK(r4.u.hi == 1.25);
  CHECK_FALSE(r4.clipped);

  auto ann3 = dyadic_annuli(3, std::ldexp(1.0, -12), 0.25);
  REQUIRE(ann3.size() == 6);
  CHECK(ann3[3].s == Approx(std::ldexp(1.0, -4)).epsilon(1e-14));
  CHECK(ann3.back().k == 2);
}

TEST_CASE("coarse depth collapses to a single truncated annulus") {
  std::vector<std::string> log;
  auto ann = dyadic_annuli(2, std::ldexp(1.0, -4), 0.2, &log);
  REQUIRE(ann.size() == 2);
  CHECK(ann[1].side == +1);
  CHECK(ann[1].clipped);
  CHECK(ann[1].u.lo == 1.0);
  CHECK(ann[1].u.hi == 1.2);
  REQUIRE(log.size() == 1);
  CHECK(log[0].find("truncated") != std::string::npos);

  CHECK_THROWS_AS(dyadic_annuli(1, 0.01, 0.2), validation_error);
  CHECK_THROWS_AS(dyadic_annuli(2, 1.5, 0.2), validation_error);
}

TEST_CASE("first-stage caps tile each annulus at the stage width") {
  ZeroPoint z = canonical_qt_zero(2);

  Annulus a0{0, +1, std::ldexp(1.0, -6),
             {1.0, 1.0 + std::ldexp(1.0, -6)}, false};
  auto caps = first_stage_caps(z, a0);
  REQUIRE(caps.size() == 51);  // ceil(2 pi / 2^-3)
  CHECK(caps.front().angular.lo == 0.0);
  CHECK(caps.back().angular.hi == kTwoPi);
  for (std::size_t j = 0; j + 1 < caps.size(); ++j)
    CHECK(caps[j].angular.hi == caps[j + 1].angular.lo);
  for (const auto& c : caps) {
    CHECK(c.angular.length() <= std::ldexp(1.0, -3) + 1e-15);
    CHECK(c.radial.lo == 1.0);
    CHECK(c.radial.hi == 1.0 + std::ldexp(1.0, -6));
    CHECK(c.kind == PieceCase::QuasiTorus);
    CHECK(c.n == 2);
    CHECK(c.k == 0);
    CHECK(c.side == +1);
  }

  Annulus a3{3, -1, std::ldexp(1.0, -3),
             {1.0 - std::ldexp(1.0, -3), 1.0 - std::ldexp(1.0, -4)}, false};
  CHECK(first_stage_caps(z, a3).size() == 18);  // ceil(2 pi / 2^-1.5)

  ZeroPoint zp = canonical_pc_zero(3);
  Annulus a2{2, +1, 0.25, {1.125, 1.25}, false};
  CHECK(first_stage_caps(zp, a2).size() == 51);  // width s^{3/2} = 2^-3
}

TEST_CASE("rescale maps send canonical patches to unit position") {
  const double s = std::ldexp(1.0, -4);

  CapFootprint cap;
  cap.angular = {0.5 * kPi - 0.05, 0.5 * kPi + 0.05};
  cap.radial = {1.0, 1.0 + s};
  cap.side = +1;

  SECTION("quasi-torus, cap on the reference meridian") {
    ZeroPoint z = canonical_qt_zero(2);
    AffineMap m = rescale_map(z, cap, s);
    Vec3 eta = m.apply({0.0, 1.0 + s, 1.0 + s * s});
    CHECK(eta.x == Approx(0.0).margin(1e-12));
    CHECK(eta.y == Approx(1.0).margin(1e-12));
    CHECK(eta.z == Approx(1.0).margin(1e-12));
    CHECK(std::isfinite(m.condition()));
  }

  SECTION("quasi-torus, rotated cap") {
    ZeroPoint z = canonical_qt_zero(2);
    CapFootprint rot = cap;
    rot.angular = {-0.05, 0.05};
    Vec3 eta = rescale_map(z, rot, s).apply({1.0 + s, 0.0, 1.0 + s * s});
    CHECK(eta.x == Approx(0.0).margin(1e-12));
    CHECK(eta.y == Approx(1.0).margin(1e-12));
    CHECK(eta.z == Approx(1.0).margin(1e-12));
  }

  SECTION("quasi-torus, mirrored side with odd order") {
    ZeroPoint z = canonical_qt_zero(3);
    CapFootprint left = cap;
    left.side = -1;
    left.radial = {1.0 - s, 1.0 - 0.5 * s};
    Vec3 eta =
        rescale_map(z, left, s).apply({0.0, 1.0 - s, 1.0 - s * s * s});
    CHECK(eta.y == Approx(1.0).margin(1e-12));
    CHECK(eta.z == Approx(1.0).margin(1e-12));
  }

  SECTION("perturbed cone folds onto the half-diagonal") {
    ZeroPoint z = canonical_pc_zero(3);
    Vec3 eta = rescale_map(z, cap, s).apply({0.0, 1.1, 1.1});
    CHECK(eta.x == Approx(0.0).margin(1e-12));
    CHECK(eta.y == Approx(0.1 / s).margin(1e-10));
    CHECK(eta.z == Approx(0.0).margin(1e-10));
  }

  SECTION("only degenerate cases carry rescale maps") {
    ZeroPoint z = canonical_qt_zero(2);
    z.kind = ProfileKind::Cone;
    CHECK_THROWS_AS(rescale_map(z, cap, s), validation_error);
  }
}

TEST_CASE("rescale map keeps the slab inside a bounded vertical tube") {
  Profile p = torus_profile();
  const double delta = std::ldexp(1.0, -8);
  auto zeros = find_curvature_zeros(p);
  REQUIRE(zeros.size() == 1);
  auto dec = decompose_interval(p, zeros);
  const ZeroPoint& z = dec.degenerate[0].zero;
  REQUIRE(z.kind == ProfileKind::QuasiTorus);
  REQUIRE(z.n == 2);
  CHECK(z.a0 == Approx(0.5).epsilon(1e-12));
  CHECK(z.cn == Approx(-1.0).epsilon(1e-9));

  auto annuli = dyadic_annuli(z.n, delta, z.delta);
  auto it = std::find_if(annuli.begin(), annuli.end(), [](const Annulus& a) {
    return a.side == +1 && a.k == 1;
  });
  REQUIRE(it != annuli.end());
  auto caps = first_stage_caps(z, *it);
  const CapFootprint& cap = caps[7];
  AffineMap m = rescale_map(z, cap, it->s);

  const double budget = 4.0 * delta / ipow(it->s, z.n);
  Rng rng(42);
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    double alpha = cap.angular.lo + rng.uniform() * cap.angular.length();
    double r = cap.radial.lo + rng.uniform() * cap.radial.length();
    double phi = kTwoPi * rng.uniform();
    double cz = 2.0 * rng.uniform() - 1.0;
    double sz = std::sqrt(std::max(0.0, 1.0 - cz * cz));
    Vec3 dir{sz * std::cos(phi), sz * std::sin(phi), cz};
    Vec3 q = surface_point(p, alpha, r) + dir * (delta * rng.uniform());
    double rq = std::hypot(q.x, q.y);
    Vec3 above{q.x, q.y, p.value(rq)};
    double dist = std::abs(m.apply(q).z - m.apply(above).z);
    worst = std::max(worst, dist);
    REQUIRE(dist <= budget);
  }
  CHECK(worst > 0.0);
}

TEST_CASE("rescaled patches carry unit-size curvature") {
  const double delta = std::ldexp(1.0, -12);

  Profile pt = torus_profile();
  auto zt = decompose_interval(pt, find_curvature_zeros(pt)).degenerate[0].zero;
  auto annt = dyadic_annuli(zt.n, delta, zt.delta);
  for (const auto& a : annt) {
    if (a.side != +1 || (a.k != 1 && a.k != 3)) continue;
    auto cap = first_stage_caps(zt, a)[3];
    auto range = rescaled_patch_curvature_range(pt, rescale_map(zt, cap, a.s), cap);
    CHECK(range.lo >= 0.1);
    CHECK(range.hi <= 10.0);
  }

  Profile pc = Profile::perturbed_cone(3, {}, {0.6, 1.4});
  auto zc = decompose_interval(pc, find_curvature_zeros(pc)).degenerate[0].zero;
  REQUIRE(zc.kind == ProfileKind::PerturbedCone);
  auto annc = dyadic_annuli(zc.n, delta, zc.delta);
  for (const auto& a : annc) {
    if (a.side != -1 || a.k != 1) continue;
    auto cap = first_stage_caps(zc, a)[11];
    auto range = rescaled_patch_curvature_range(pc, rescale_map(zc, cap, a.s), cap);
    CHECK(range.lo >= 0.1);
    CHECK(range.hi <= 10.0);
  }
}

TEST_CASE("fitted frames bound their patches tightly") {
  Profile p = torus_profile();
  const double delta = std::ldexp(1.0, -6);

  CapFootprint cap;
  cap.angular = {0.3, 0.3 + 0.35};
  cap.radial = {1.0, 1.0 + 0.125};
  BoxFrame f = fit_cap_frame(p, cap, delta);

  CHECK(f.max_axis_skew() <= 1e-12);
  CHECK(f.half[2] == delta);
  CHECK(f.half[0] >= f.half[1]);
  CHECK(f.half[1] >= f.half[2]);

  double worst = 0.0;
  for (int i = 0; i < 64; ++i) {
    double r = cap.radial.lo + i * cap.radial.length() / 63;
    for (int j = 0; j < 64; ++j) {
      double alpha = cap.angular.lo + j * cap.angular.length() / 63;
      worst = std::max(worst, f.needed_inflation(surface_point(p, alpha, r)));
    }
  }
  CHECK(worst <= 1.0 + 1e-9);
}

TEST_CASE("second stage refines caps by the relative scale") {
  const double delta = std::ldexp(1.0, -12);

  SECTION("perturbed cone splits 4 radial by 8 angular at k=2") {
    Profile p = Profile::perturbed_cone(3, {}, {0.5, 1.5});
    auto z = decompose_interval(p, find_curvature_zeros(p)).degenerate[0].zero;
    CHECK(z.delta == Approx(0.25));
    auto ann = dyadic_annuli(z.n, delta, z.delta);
    auto it = std::find_if(ann.begin(), ann.end(), [](const Annulus& a) {
      return a.side == +1 && a.k == 2;
    });
    REQUIRE(it != ann.end());
    CHECK(it->u.lo == 1.125);
    CHECK(it->u.hi == Approx(1.25));

    auto caps = first_stage_caps(z, *it);
    auto boxes = second_stage_refine(p, z, caps[0], it->s, delta);
    REQUIRE(boxes.size() == 32);

    // 4 radial rows, then 8 angular columns within each
    const double row_len = caps[0].radial.length() / 4;
    CHECK(boxes[0].footprint.radial.length() == Approx(row_len).epsilon(1e-14));
    CHECK(boxes[0].footprint.radial.lo == caps[0].radial.lo);
    CHECK(boxes.back().footprint.radial.hi == caps[0].radial.hi);
    CHECK(boxes[0].footprint.angular.lo == caps[0].angular.lo);
    CHECK(boxes[7].footprint.angular.hi == caps[0].angular.hi);
    for (int j = 0; j + 1 < 8; ++j)
      CHECK(boxes[j].footprint.angular.hi == boxes[j + 1].footprint.angular.lo);
    CHECK(boxes[0].footprint.angular.length() <=
          std::ldexp(1.0, -6) + 1e-15);
    for (const auto& b : boxes)
      CHECK(flatness_check(b.frame, p, b.footprint, delta).pass);
  }

  SECTION("matching scales leave the cap unrefined") {
    Profile p = torus_profile();
    const double d8 = std::ldexp(1.0, -8);
    auto z = decompose_interval(p, find_curvature_zeros(p)).degenerate[0].zero;
    Annulus a0{0, +1, std::ldexp(1.0, -4),
               {1.0, 1.0 + std::ldexp(1.0, -4)}, false};
    auto caps = first_stage_caps(z, a0);
    auto boxes = second_stage_refine(p, z, caps[0], a0.s, d8);
    REQUIRE(boxes.size() == 1);
    CHECK(boxes[0].footprint.angular.lo == caps[0].angular.lo);
    CHECK(flatness_check(boxes[0].frame, p, boxes[0].footprint, d8).pass);
  }

  SECTION("sagitta safeguard splits steep caps and logs it") {
    Profile p = Profile::quasi_torus(3, {}, {0.6, 1.4});
    auto z = decompose_interval(p, find_curvature_zeros(p)).degenerate[0].zero;
    REQUIRE(z.n == 3);
    auto ann = dyadic_annuli(z.n, delta, z.delta);
    auto it = std::find_if(ann.begin(), ann.end(), [](const Annulus& a) {
      return a.side == +1 && a.k == 0;
    });
    std::vector<std::string> log;
    auto caps = first_stage_caps(z, *it);
    auto boxes = second_stage_refine(p, z, caps[0], it->s, delta, &log);
    REQUIRE(boxes.size() == 2);
    REQUIRE(log.size() == 1);
    CHECK(log[0].find("safeguard") != std::string::npos);
    for (const auto& b : boxes)
      CHECK(flatness_check(b.frame, p, b.footprint, delta).pass);
  }
}

TEST_CASE("nondegenerate grids tile a curved piece at the root scale") {
  Profile p = Profile::power_series(1.0, {1.0, 2.0, 1.0}, kInf, {0.5, 2.0});
  const double delta = std::ldexp(1.0, -6);
  Interval J{0.5, 2.0};
  auto boxes = partition_nondegenerate(p, J, delta);
  REQUIRE_FALSE(boxes.empty());

  double area = 0.0;
  int rows = 0;
  for (const auto& b : boxes) {
    area += b.footprint.angular.length() * b.footprint.radial.length();
    rows = std::max(rows, b.footprint.i1 + 1);
    CHECK(flatness_check(b.frame, p, b.footprint, delta).pass);
  }
  CHECK(area == Approx(kTwoPi * J.length()).epsilon(1e-9));

  // row edges chain across the piece
  CHECK(boxes.front().footprint.radial.lo == J.lo);
  CHECK(boxes.back().footprint.radial.hi == J.hi);

  // count tracks surface area / delta within the lattice-constant window
  double rbar = J.mid();
  double predicted = kTwoPi * rbar * J.length() / delta;
  double ratio = static_cast<double>(boxes.size()) / predicted;
  CHECK(ratio >= 0.25);
  CHECK(ratio <= 4.0);
  CHECK(rows >= 10);
}

TEST_CASE("ruled pieces become full-length plates") {
  auto coarse = partition_cone_plates(0.25, RuledVariant::Cone);
  REQUIRE(coarse.size() == 13);  // ceil(2 pi / 0.5)
  Profile cone = Profile::cone(1.0, {0.5, 2.0});
  for (const auto& b : coarse) {
    CHECK(b.footprint.radial.lo == 0.5);
    CHECK(b.footprint.radial.hi == 2.0);
    CHECK(b.footprint.kind == PieceCase::Plate);
    auto rep = flatness_check(b.frame, cone, b.footprint, 0.25);
    CHECK(rep.pass);
    CHECK(rep.deviation <= 0.25 / 4.0);
  }

  const double d8 = std::ldexp(1.0, -8);
  auto fine = partition_cone_plates(d8, RuledVariant::Cone);
  CHECK(fine.size() == 101);  // ceil(2 pi * 16)
  for (std::size_t j = 0; j < fine.size(); j += 10)
    CHECK(flatness_check(fine[j].frame, cone, fine[j].footprint, d8).pass);

  auto flat = partition_cone_plates(d8, RuledVariant::Cylinder);
  Profile cyl = Profile::power_series(1.0, {1.0}, kInf, {0.5, 2.0});
  CHECK(flat.size() == 101);
  for (std::size_t j = 0; j < flat.size(); j += 10) {
    auto rep = flatness_check(flat[j].frame, cyl, flat[j].footprint, d8);
    CHECK(rep.pass);
    CHECK(rep.deviation <= 1e-12);
    CHECK(std::abs(flat[j].frame.axis[2].z) == Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("assembled manifest tiles the surface without overlap") {
  Profile p = torus_profile();
  const double delta = std::ldexp(1.0, -6);
  auto man = build_partition(p, delta);

  CHECK(man.profile_id == p.id());
  CHECK(man.delta == delta);
  CHECK(man.counts.at("total") == man.boxes.size());
  REQUIRE(man.counts.count("nondegenerate") == 1);
  REQUIRE(man.counts.count("zero0/right/k1/boxes") == 1);

  // nondegenerate grids precede the annulus construction
  std::size_t flat_prefix = 0;
  while (flat_prefix < man.boxes.size() &&
         man.boxes[flat_prefix].footprint.kind == PieceCase::Nondegenerate)
    ++flat_prefix;
  CHECK(flat_prefix == man.counts.at("nondegenerate"));
  for (std::size_t i = flat_prefix; i < man.boxes.size(); ++i)
    CHECK(man.boxes[i].footprint.kind == PieceCase::QuasiTorus);

  double area = 0.0;
  for (const auto& b : man.boxes) {
    const auto& fp = b.footprint;
    area += fp.angular.length() * fp.radial.length();
    CHECK(fp.radial.lo >= p.domain().lo);
    CHECK(fp.radial.hi <= p.domain().hi + 1e-15);
    CHECK(fp.angular.lo >= 0.0);
    CHECK(fp.angular.hi <= kTwoPi);
    CHECK(fp.radial.valid());
    CHECK(fp.angular.valid());
  }
  CHECK(area == Approx(kTwoPi * p.domain().length()).epsilon(1e-9));

  for (std::size_t i = 0; i < man.boxes.size(); ++i)
    for (std::size_t j = i + 1; j < man.boxes.size(); ++j)
      REQUIRE_FALSE(
          footprints_overlap(man.boxes[i].footprint, man.boxes[j].footprint));

  for (const auto& b : man.boxes) {
    auto rep = flatness_check(b.frame, p, b.footprint, delta);
    CHECK(rep.pass);
    CHECK(rep.containment <= 4.0);
  }
}

TEST_CASE("oversized footprints fail the flatness certificate") {
  Profile p = torus_profile();
  const double delta = std::ldexp(1.0, -8);
  auto man = build_partition(p, delta);

  auto it = std::find_if(man.boxes.begin(), man.boxes.end(),
                         [](const PartitionBox& b) {
                           return b.footprint.kind == PieceCase::QuasiTorus &&
                                  b.footprint.k == 1;
                         });
  REQUIRE(it != man.boxes.end());
  CHECK(flatness_check(it->frame, p, it->footprint, delta).pass);

  CapFootprint big = it->footprint;
  double am = big.angular.mid(), al = big.angular.length();
  double rm = big.radial.mid(), rl = big.radial.length();
  big.angular = {am - 2.0 * al, am + 2.0 * al};
  big.radial = {std::max(p.domain().lo, rm - 2.0 * rl),
                std::min(p.domain().hi, rm + 2.0 * rl)};
  BoxFrame wide = fit_cap_frame(p, big, delta);
  CHECK_FALSE(flatness_check(wide, p, big, delta).pass);
}

TEST_CASE("per-annulus box counts track the dimension prediction") {
  struct Case {
    Profile p;
    double delta;
  };
  std::vector<Case> cases;
  cases.push_back({torus_profile(), std::ldexp(1.0, -8)});
  cases.push_back(
      {Profile::perturbed_cone(3, {}, {0.6, 1.4}), std::ldexp(1.0, -10)});

  for (const auto& c : cases) {
    auto zeros = find_curvature_zeros(c.p);
    auto dec = decompose_interval(c.p, zeros);
    const ZeroPoint& z = dec.degenerate[0].zero;
    auto man = build_partition(c.p, c.delta);
    for (const auto& a : dyadic_annuli(z.n, c.delta, z.delta)) {
      auto key = std::string("zero0/") + (a.side < 0 ? "left" : "right") +
                 "/k" + std::to_string(a.k) + "/boxes";
      double actual = static_cast<double>(man.counts.at(key));
      double predicted = predicted_annulus_boxes(z, a, c.delta);
      CHECK(actual >= predicted / 4.0);
      CHECK(actual <= predicted * 4.0);
    }
  }
}
