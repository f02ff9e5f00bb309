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
#include <complex>
#include <string>
#include <vector>

#include "revdec/common.hpp"
#include "revdec/lattice.hpp"

namespace revdec {

enum class Family { Constant, RandomPhase, SmoothIndicator };

inline std::string to_string(Family f) {
  switch (f) {
    case Family::Constant: return "constant";
    case Family::RandomPhase: return "random-phase";
    case Family::SmoothIndicator: return "smooth-indicator";
  }
  return "?";
}

inline Family family_from_string(const std::string& s) {
  if (s == "constant") return Family::Constant;
  if (s == "random-phase") return Family::RandomPhase;
  if (s == "smooth-indicator") return Family::SmoothIndicator;
  throw validation_error("unknown coefficient family '" + s + "'");
}

namespace detail {

// C-infinity cutoff: 1 on |t| <= 1/2, 0 at |t| = 1, glued by the standard
// exp(-1/u) partition bump in between.
inline double smooth_profile(double t) {
  double a = std::abs(t);
  if (a <= 0.5) return 1.0;
  if (a >= 1.0) return 0.0;
  auto bump = [](double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; };
  double x = 2.0 * a - 1.0;
  double num = bump(1.0 - x);
  return num / (num + bump(x));
}

}  // namespace detail

// Lattice-supported trigonometric polynomial, one coefficient per point.
struct TestFunction {
  const FrequencyLattice* lattice = nullptr;
  std::vector<std::complex<double>> coeffs;
  Family family = Family::Constant;
  std::uint64_t seed = 0;
};

// Coefficients in lattice-point order; random phases are unimodular and
// reproducible from the seed.
inline TestFunction synth_test_function(const FrequencyLattice& lat,
                                        Family family,
                                        std::uint64_t seed = 0) {
  if (lat.points.empty())
    throw validation_error("cannot synthesize on an empty lattice");
  TestFunction f;
  f.lattice = &lat;
  f.family = family;
  f.seed = seed;
  f.coeffs.resize(lat.points.size());
  Rng rng(seed);
  for (std::size_t i = 0; i < lat.points.size(); ++i) {
    switch (family) {
      case Family::Constant:
        f.coeffs[i] = 1.0;
        break;
      case Family::RandomPhase: {
        double phase = kTwoPi * rng.uniform();
        f.coeffs[i] = std::complex<double>(std::cos(phase), std::sin(phase));
        break;
      }
      case Family::SmoothIndicator:
        f.coeffs[i] = detail::smooth_profile(lat.points[i].t);
        break;
    }
  }
  return f;
}

}  // namespace revdec
