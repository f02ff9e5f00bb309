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

#include <cmath>

#include "revdec/curvature.hpp"
#include "revdec/profile.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace revdec;

namespace {
const Interval kTorusDom{0.65, 1.35};

GraphJet2 paraboloid_jet(double x, double y) {
  // g = x^2 + y^2
  return GraphJet2{x, y, x * x + y * y, 2 * x, 2 * y, 2.0, 0.0, 2.0};
}
}  // namespace

TEST_CASE("shape operator of the round paraboloid at the origin") {
  Mat2 s = shape_operator(paraboloid_jet(0.0, 0.0));
  CHECK(s.a == 2.0);
  CHECK(s.b == 0.0);
  CHECK(s.c == 0.0);
  CHECK(s.d == 2.0);
  CHECK_THAT(gaussian_curvature_graph(paraboloid_jet(0.0, 0.0)),
             WithinRel(4.0, 1e-15));
}

TEST_CASE("shape operator of the round paraboloid off-center") {
  // At (1,0): w = 1 + 4, matrix = 5^{-3/2} [[2, 0], [0, 10]].
  Mat2 s = shape_operator(paraboloid_jet(1.0, 0.0));
  const double f = std::pow(5.0, -1.5);
  CHECK_THAT(s.a, WithinRel(2.0 * f, 1e-14));
  CHECK_THAT(s.b, WithinAbs(0.0, 1e-15));
  CHECK_THAT(s.c, WithinAbs(0.0, 1e-15));
  CHECK_THAT(s.d, WithinRel(10.0 * f, 1e-14));
  CHECK_THAT(s.det(), WithinRel(0.16, 1e-13));
  CHECK_THAT(gaussian_curvature_graph(paraboloid_jet(1.0, 0.0)),
             WithinRel(0.16, 1e-13));
}

TEST_CASE("saddle graph has negative curvature") {
  GraphJet2 j{0.0, 0.0, 0.0, 0.0, 0.0, 2.0, 0.0, -2.0};
  CHECK_THAT(gaussian_curvature_graph(j), WithinRel(-4.0, 1e-15));
}

TEST_CASE("torus curvature vanishes exactly on the top circle") {
  Profile p = Profile::torus(0.5, kTorusDom);
  CHECK_THAT(gaussian_curvature_profile(p, 1.0), WithinAbs(0.0, 1e-12));
  auto [rad, ang] = principal_curvature_magnitudes(p, 1.0);
  CHECK_THAT(rad, WithinRel(2.0, 1e-10));
  CHECK_THAT(ang, WithinAbs(0.0, 1e-12));
}

TEST_CASE("torus curvature matches the angular oracle off the top") {
  // Parametrize the minor circle by theta: r = R + rho cos(theta).
  // Gauss curvature of a torus: K = cos(theta) / (rho (R + rho cos(theta))).
  Profile p = Profile::torus(0.5, kTorusDom);
  const double R = 1.0, rho = 0.5;
  for (double theta : {0.9, 1.2, 2.0}) {
    double r = R + rho * std::cos(theta);
    double expect = std::cos(theta) / (rho * (R + rho * std::cos(theta)));
    CHECK_THAT(gaussian_curvature_profile(p, r), WithinRel(expect, 1e-10));
  }
  CHECK_THAT(gaussian_curvature_profile(p, 1.25), WithinRel(0.8, 1e-10));
}

TEST_CASE("cone has zero gaussian curvature but nonzero angular bending") {
  Profile p = Profile::cone(1.0, {1.0, 2.0});
  CHECK_THAT(gaussian_curvature_profile(p, 1.5), WithinAbs(0.0, 1e-15));
  auto [rad1, ang1] = principal_curvature_magnitudes(p, 1.0);
  CHECK_THAT(rad1, WithinAbs(0.0, 1e-15));
  CHECK_THAT(ang1, WithinRel(1.0 / std::sqrt(2.0), 1e-14));
  auto [rad2, ang2] = principal_curvature_magnitudes(p, 2.0);
  CHECK_THAT(ang2, WithinRel(0.5 / std::sqrt(2.0), 1e-14));
}

TEST_CASE("profile and graph curvature formulas agree on the surface") {
  Profile p = Profile::torus(0.5, kTorusDom);
  for (int i = 0; i < 100; ++i) {
    double t = i / 99.0;
    double r = 0.7 + 0.6 * t;
    double phi = 6.0 * t;
    double x = r * std::cos(phi), y = r * std::sin(phi);
    GraphJet2 j = revolution_graph_jet(p, x, y);
    double kg = gaussian_curvature_graph(j);
    double kp = gaussian_curvature_profile(p, r);
    CHECK(std::abs(kg - kp) <= 1e-8 * std::max(1.0, std::abs(kp)));
  }
}

TEST_CASE("principal magnitudes match shape operator eigenvalues") {
  Profile p = Profile::torus(0.5, kTorusDom);
  for (double r : {0.8, 1.0, 1.2}) {
    GraphJet2 j = revolution_graph_jet(p, 0.0, r);
    auto [e1, e2] = shape_operator(j).eigenvalues();
    auto [rad, ang] = principal_curvature_magnitudes(p, r);
    double lo = std::min(std::abs(e1), std::abs(e2));
    double hi = std::max(std::abs(e1), std::abs(e2));
    double plo = std::min(rad, ang), phi_ = std::max(rad, ang);
    CHECK(std::abs(lo - plo) <= 1e-6 * std::max(1.0, plo));
    CHECK(std::abs(hi - phi_) <= 1e-6 * std::max(1.0, phi_));
  }
}

TEST_CASE("determinant of the shape operator equals gaussian curvature") {
  Profile p = Profile::torus(0.5, kTorusDom);
  for (double r : {0.7, 0.95, 1.3}) {
    GraphJet2 j = revolution_graph_jet(p, r * 0.6, r * 0.8);
    CHECK_THAT(shape_operator(j).det(),
               WithinAbs(gaussian_curvature_graph(j), 1e-10));
  }
}

TEST_CASE("product of principal magnitudes reproduces |K|") {
  Profile p = Profile::torus(0.5, kTorusDom);
  for (double r : {0.75, 1.1, 1.3}) {
    auto [rad, ang] = principal_curvature_magnitudes(p, r);
    double k = std::abs(gaussian_curvature_profile(p, r));
    CHECK_THAT(rad * ang, WithinRel(k, 1e-8));
  }
}

TEST_CASE("curvature magnitudes stay comparable across a dyadic annulus") {
  // Near a flat circle the two bending magnitudes scale with the distance
  // to it, so their ratio across one dyadic annulus stays bounded.
  Profile p = Profile::quasi_torus(2, {}, {0.5, 2.0});
  for (int k = 1; k <= 4; ++k) {
    double s = std::pow(2.0, -k);
    double lo_r = 1.0 + 0.5 * s, hi_r = 1.0 + s;
    auto [rad_lo, ang_lo] = principal_curvature_magnitudes(p, lo_r);
    auto [rad_hi, ang_hi] = principal_curvature_magnitudes(p, hi_r);
    CHECK(rad_hi / rad_lo < 8.0);
    CHECK(rad_lo / rad_hi < 8.0);
    CHECK(ang_hi / ang_lo < 8.0);
    CHECK(ang_lo / ang_hi < 8.0);
  }
}

TEST_CASE("uniform curvature sweep covers the domain inclusively") {
  Profile p = Profile::torus(0.5, kTorusDom);
  auto samples = curvature_profile_samples(p, 11);
  REQUIRE(samples.size() == 11);
  CHECK_THAT(samples.front().r, WithinRel(0.65, 1e-15));
  CHECK_THAT(samples.back().r, WithinRel(1.35, 1e-15));
  for (const auto& s : samples) {
    CHECK_THAT(s.lambda_rad * s.lambda_ang, WithinAbs(std::abs(s.K), 1e-8));
  }
}
