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
#include <utility>
#include <vector>

#include "revdec/geometry.hpp"
#include "revdec/profile.hpp"

namespace revdec {

// Second-order data of a graph xi3 = g(xi1, xi2) at one point.
struct GraphJet2 {
  double xi1 = 0.0, xi2 = 0.0;
  double g = 0.0;
  double g1 = 0.0, g2 = 0.0;
  double g11 = 0.0, g12 = 0.0, g22 = 0.0;
};

// Shape operator of the graph:
//   (1 + g1^2 + g2^2)^(-3/2) *
//   [ g11 (1+g2^2) - g1 g2 g12,  g12 (1+g2^2) - g1 g2 g22 ]
//   [ g12 (1+g1^2) - g1 g2 g11,  g22 (1+g1^2) - g1 g2 g12 ]
inline Mat2 shape_operator(const GraphJet2& j) {
  double w = 1.0 + j.g1 * j.g1 + j.g2 * j.g2;
  double f = std::pow(w, -1.5);
  Mat2 s;
  s.a = f * (j.g11 * (1.0 + j.g2 * j.g2) - j.g1 * j.g2 * j.g12);
  s.b = f * (j.g12 * (1.0 + j.g2 * j.g2) - j.g1 * j.g2 * j.g22);
  s.c = f * (j.g12 * (1.0 + j.g1 * j.g1) - j.g1 * j.g2 * j.g11);
  s.d = f * (j.g22 * (1.0 + j.g1 * j.g1) - j.g1 * j.g2 * j.g12);
  return s;
}

// K = (g11 g22 - g12^2) / (1 + g1^2 + g2^2)^2.
inline double gaussian_curvature_graph(const GraphJet2& j) {
  double w = 1.0 + j.g1 * j.g1 + j.g2 * j.g2;
  return (j.g11 * j.g22 - j.g12 * j.g12) / (w * w);
}

// K(r) = gamma'(r) gamma''(r) / (r (1 + gamma'(r)^2)^2).
inline double gaussian_curvature_profile(const Profile& p, double r) {
  Jet j = p.jet(r, 2);
  double w = 1.0 + j.d[1] * j.d[1];
  return j.d[1] * j.d[2] / (r * w * w);
}

// Principal curvature magnitudes of the surface of revolution:
// radial |gamma''| / (1+gamma'^2)^(3/2), angular |gamma'| / (r (1+gamma'^2)^(1/2)).
inline std::pair<double, double> principal_curvature_magnitudes(const Profile& p, double r) {
  Jet j = p.jet(r, 2);
  double w = 1.0 + j.d[1] * j.d[1];
  double rad = std::abs(j.d[2]) / std::pow(w, 1.5);
  double ang = std::abs(j.d[1]) / (r * std::sqrt(w));
  return {rad, ang};
}

// Chain-rule partials of g(xi1, xi2) = gamma(sqrt(xi1^2 + xi2^2)), computed
// from the exact jet (no differencing).
inline GraphJet2 revolution_graph_jet(const Profile& p, double xi1, double xi2) {
  double r = std::hypot(xi1, xi2);
  if (r <= 0.0) throw validation_error("graph jet of a revolution surface needs r > 0");
  Jet j = p.jet(r, 2);
  double g1r = j.d[1] / r;
  GraphJet2 out;
  out.xi1 = xi1;
  out.xi2 = xi2;
  out.g = j.d[0];
  out.g1 = g1r * xi1;
  out.g2 = g1r * xi2;
  double r2 = r * r, r3 = r2 * r;
  double q = j.d[2] / r2 - j.d[1] / r3;
  out.g11 = q * xi1 * xi1 + j.d[1] / r;
  out.g22 = q * xi2 * xi2 + j.d[1] / r;
  out.g12 = q * xi1 * xi2;
  return out;
}

struct CurvatureSample {
  double r = 0.0;
  double K = 0.0;
  double lambda_rad = 0.0;
  double lambda_ang = 0.0;
};

inline CurvatureSample curvature_sample(const Profile& p, double r) {
  auto [rad, ang] = principal_curvature_magnitudes(p, r);
  return {r, gaussian_curvature_profile(p, r), rad, ang};
}

// Uniform sweep over the domain, endpoints included.
inline std::vector<CurvatureSample> curvature_profile_samples(const Profile& p, int count) {
  if (count < 2) throw validation_error("curvature sweep needs at least two samples");
  std::vector<CurvatureSample> out;
  out.reserve(static_cast<std::size_t>(count));
  Interval d = p.domain();
  for (int i = 0; i < count; ++i) {
    double r = d.lo + (d.hi - d.lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    out.push_back(curvature_sample(p, r));
  }
  return out;
}

}  // namespace revdec
