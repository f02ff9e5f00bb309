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
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "revdec/common.hpp"
#include "revdec/profile.hpp"

namespace revdec {

// A zero of the curvature degeneracy indicator h = g'(r) g''(r), together
// with its local model: kind, vanishing order n, and the leading data
// a0 = g(r), a1 = g'(r), cn = g^(n)(r)/n! used by the rescaling maps.
struct ZeroPoint {
  double r = 0.0;
  int n = 0;
  ProfileKind kind = ProfileKind::QuasiTorus;
  double delta = 0.0;
  double a0 = 0.0;
  double a1 = 0.0;
  double cn = 0.0;
};

struct DegeneratePiece {
  ZeroPoint zero;
  Interval piece{0.0, 0.0};
};

struct NondegeneratePiece {
  Interval piece{0.0, 0.0};
  double min_abs_h = 0.0;
};

// Ordered split of the profile domain into degenerate intervals around each
// zero and the nondegenerate remainder. Pieces are half-open on the right
// except the last; consecutive bounds are shared bitwise, so the pieces tile
// the domain exactly.
struct IntervalDecomposition {
  Interval domain{0.0, 0.0};
  std::vector<DegeneratePiece> degenerate;
  std::vector<NondegeneratePiece> nondegenerate;

  std::vector<Interval> ordered_pieces() const {
    std::vector<Interval> all;
    all.reserve(degenerate.size() + nondegenerate.size());
    for (const auto& d : degenerate) all.push_back(d.piece);
    for (const auto& j : nondegenerate) all.push_back(j.piece);
    std::sort(all.begin(), all.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    return all;
  }
};

inline double curvature_degeneracy(const Profile& p, double r) {
  Jet j = p.jet(r, 2);
  return j.d[1] * j.d[2];
}

inline double curvature_degeneracy_slope(const Profile& p, double r) {
  Jet j = p.jet(r, 3);
  return j.d[2] * j.d[2] + j.d[1] * j.d[3];
}

inline double min_abs_degeneracy(const Profile& p, Interval piece,
                                 int samples = 512) {
  double mn = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    double r = piece.lo + (i + 0.5) * piece.length() / samples;
    mn = std::min(mn, std::abs(curvature_degeneracy(p, r)));
  }
  return mn;
}

namespace detail {

template <class F>
double bisect(F&& f, double a, double b, double fa, double fb, double tol) {
  (void)fb;
  while (b - a > tol) {
    double m = 0.5 * (a + b);
    double fm = f(m);
    if (fm == 0.0) return m;
    if (std::signbit(fm) == std::signbit(fa)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

inline bool jet_flat_beyond_first(const Jet& j, double thresh) {
  for (std::size_t m = 2; m < j.d.size(); ++m)
    if (std::abs(j.d[m]) > thresh) return false;
  return true;
}

}  // namespace detail

// Classifies a zero of h = g'g'' by the derivative-vanishing pattern of the
// exact jet. A derivative counts as vanishing when its magnitude is at most
// 1e-8 (closed-form jets are exact to ~1e-15, so this separates structural
// zeros from rounding); the pattern is re-checked against the scale of the
// case-defining derivative.
inline ZeroPoint classify_zero(const Profile& p, double r) {
  const int top = p.max_order();
  const Jet j = p.jet(r, top);
  ZeroPoint z;
  z.r = r;
  z.a0 = j.d[0];
  z.a1 = j.d[1];
  const double plain = 1e-8;

  int n = 0;
  for (int m = 2; m <= top; ++m) {
    if (std::abs(j.d[m]) > plain) {
      n = m;
      break;
    }
  }

  if (n == 0) {
    const Interval dom = p.domain();
    const double probe = std::min(0.05, 0.25 * dom.length());
    bool affine = true;
    for (double rp : {std::max(dom.lo, r - probe), std::min(dom.hi, r + probe)})
      affine = affine && detail::jet_flat_beyond_first(p.jet(rp, top), plain);
    if (!affine)
      throw capability_error(
          "unclassifiable degeneracy: profile is flat to the maximum jet "
          "order at the zero but not affine nearby");
    z.kind = ProfileKind::Cone;
    z.n = 1;
    z.cn = 0.0;
    return z;
  }

  const double vanish = 1e-8 * std::max(1.0, std::abs(j.d[n]));
  if (std::abs(j.d[1]) > plain) {
    if (n == 2)
      throw validation_error(
          "classify_zero: the curvature indicator does not vanish here");
    for (int m = 2; m < n; ++m)
      if (std::abs(j.d[m]) > vanish)
        throw capability_error(
            "unclassifiable degeneracy: derivative pattern fits no case");
    z.kind = ProfileKind::PerturbedCone;
  } else {
    for (int m = 1; m < n; ++m)
      if (std::abs(j.d[m]) > vanish)
        throw capability_error(
            "unclassifiable degeneracy: derivative pattern fits no case");
    z.kind = ProfileKind::QuasiTorus;
  }
  z.n = n;
  z.cn = j.d[static_cast<std::size_t>(n)] / detail::factorial(n);
  return z;
}

// Locates all zeros of h = g'g'' on the domain: sign changes of h by dense
// sampling plus bisection, and tangential (even-order) zeros sought at sign
// changes of h' = g''^2 + g'g''' where h itself is negligible.
inline std::vector<ZeroPoint> find_curvature_zeros(const Profile& p,
                                                   double tol = 1e-10,
                                                   int samples = 4096) {
  if (!(tol > 0.0)) throw validation_error("root tolerance must be positive");
  if (samples < 16) throw validation_error("need at least 16 scan samples");
  const Interval dom = p.domain();
  const int top = p.max_order();

  bool affine = true;
  for (int q = 0; q <= 4 && affine; ++q) {
    double r = dom.lo + q * dom.length() / 4.0;
    affine = detail::jet_flat_beyond_first(p.jet(r, top), 1e-10);
  }
  if (affine) {
    Jet j = p.jet(dom.mid(), 1);
    ZeroPoint z;
    z.r = dom.mid();
    z.n = 1;
    z.kind = ProfileKind::Cone;
    z.a0 = j.d[0];
    z.a1 = j.d[1];
    return {z};
  }

  std::vector<double> xs(static_cast<std::size_t>(samples));
  std::vector<double> h(xs.size()), hp(xs.size());
  for (int i = 0; i < samples; ++i) {
    double r = dom.lo + i * dom.length() / (samples - 1);
    Jet j = p.jet(r, 3);
    xs[static_cast<std::size_t>(i)] = r;
    h[static_cast<std::size_t>(i)] = j.d[1] * j.d[2];
    hp[static_cast<std::size_t>(i)] = j.d[2] * j.d[2] + j.d[1] * j.d[3];
  }
  double hmax = 0.0;
  for (double v : h) hmax = std::max(hmax, std::abs(v));

  int run = 0, maxrun = 0;
  const double flat_thresh = 1e-12 * std::max(1.0, hmax);
  for (double v : h) {
    run = std::abs(v) <= flat_thresh ? run + 1 : 0;
    maxrun = std::max(maxrun, run);
  }
  if (maxrun >= samples / 8)
    throw capability_error(
        "unclassifiable degeneracy: the curvature indicator vanishes on a "
        "subinterval of a non-affine profile");

  auto hfun = [&](double r) { return curvature_degeneracy(p, r); };
  auto hpfun = [&](double r) { return curvature_degeneracy_slope(p, r); };

  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (h[i] == 0.0) {
      roots.push_back(xs[i]);
      continue;
    }
    if (h[i + 1] != 0.0 && std::signbit(h[i]) != std::signbit(h[i + 1]))
      roots.push_back(detail::bisect(hfun, xs[i], xs[i + 1], h[i], h[i + 1], tol));
  }
  if (h.back() == 0.0) roots.push_back(xs.back());

  const double touch = 1e-8 * std::max(1.0, hmax);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    double rstar;
    if (hp[i] == 0.0) {
      rstar = xs[i];
    } else if (hp[i + 1] != 0.0 &&
               std::signbit(hp[i]) != std::signbit(hp[i + 1])) {
      rstar = detail::bisect(hpfun, xs[i], xs[i + 1], hp[i], hp[i + 1], tol);
    } else {
      continue;
    }
    if (std::abs(hfun(rstar)) <= touch) roots.push_back(rstar);
  }

  std::sort(roots.begin(), roots.end());
  std::vector<double> merged;
  for (double r : roots) {
    if (!merged.empty() && r - merged.back() < 2.0 * tol)
      merged.back() = 0.5 * (merged.back() + r);
    else
      merged.push_back(r);
  }

  std::vector<ZeroPoint> out;
  out.reserve(merged.size());
  for (double r : merged) out.push_back(classify_zero(p, r));
  return out;
}

// Largest admissible half-widths before expansion validation: the user cap
// and half the distance to the nearest neighbor zero or domain edge.
inline std::vector<double> max_half_widths(const std::vector<ZeroPoint>& zeros,
                                           Interval domain, double cap) {
  std::vector<double> out(zeros.size());
  for (std::size_t i = 0; i < zeros.size(); ++i) {
    double d = cap;
    d = std::min(d, 0.5 * (zeros[i].r - domain.lo));
    d = std::min(d, 0.5 * (domain.hi - zeros[i].r));
    if (i > 0) d = std::min(d, 0.5 * (zeros[i].r - zeros[i - 1].r));
    if (i + 1 < zeros.size())
      d = std::min(d, 0.5 * (zeros[i + 1].r - zeros[i].r));
    out[i] = d;
  }
  return out;
}

// Checks that on (r_i - delta, r_i + delta) the profile deviates from its
// leading local model by at most eta times the first neglected order, in the
// canonical normalization that downstream rescaling maps apply. The grid is
// shifted by half a step so the zero itself is never sampled.
inline bool validate_expansion_radius(const Profile& p, const ZeroPoint& z,
                                      double delta, double eta = 0.5) {
  if (!(delta > 0.0)) throw validation_error("half-width must be positive");
  if (!(eta > 0.0 && eta < 1.0))
    throw validation_error("domination factor must lie in (0,1)");
  if (z.kind == ProfileKind::Cone) return true;

  const int grid = 256;
  const Interval dom = p.domain();
  for (int i = 0; i < grid; ++i) {
    double u = -delta + (i + 0.5) * (2.0 * delta / grid);
    double r = z.r + u;
    if (!dom.contains(r)) continue;
    double g = p.value(r);
    double rem;
    if (z.kind == ProfileKind::QuasiTorus) {
      rem = (g - z.a0) / z.cn - ipow(u, z.n);
    } else {
      rem = (g - z.a0) / z.a1 - u - (z.cn / z.a1) * ipow(u, z.n);
    }
    if (std::abs(rem) > eta * std::pow(std::abs(u), z.n + 1)) return false;
  }
  return true;
}

// Splits the domain into I_i = (r_i - D_i, r_i + D_i) around each zero and
// the nondegenerate rest. D_i is the largest half-width passing
// validate_expansion_radius below the geometric caps, found by halving.
inline IntervalDecomposition decompose_interval(const Profile& p,
                                                std::vector<ZeroPoint> zeros,
                                                double user_cap = 0.25,
                                                double eta = 0.5) {
  const Interval dom = p.domain();
  std::sort(zeros.begin(), zeros.end(),
            [](const ZeroPoint& a, const ZeroPoint& b) { return a.r < b.r; });
  for (const auto& z : zeros)
    if (!dom.contains(z.r))
      throw validation_error("zero lies outside the profile domain");

  IntervalDecomposition out;
  out.domain = dom;

  if (!zeros.empty() && zeros.front().kind == ProfileKind::Cone) {
    if (zeros.size() > 1)
      throw validation_error(
          "an affine profile cannot carry additional zeros");
    zeros[0].delta = 0.5 * dom.length();
    out.degenerate.push_back({zeros[0], dom});
    return out;
  }

  auto caps = max_half_widths(zeros, dom, user_cap);
  double cursor = dom.lo;
  for (std::size_t i = 0; i < zeros.size(); ++i) {
    double d = caps[i];
    if (!(d > 0.0))
      throw validation_error("zero half-width collapsed to nothing");
    const double floor_width = std::min(d, 1e-6);
    while (!validate_expansion_radius(p, zeros[i], d, eta)) {
      d *= 0.5;
      if (d < floor_width)
        throw validation_error(
            "expansion validation failed down to the minimum half-width "
            "near r = " + std::to_string(zeros[i].r));
    }
    zeros[i].delta = d;
    double ilo = zeros[i].r - d;
    double ihi = zeros[i].r + d;
    if (ilo < cursor)
      throw validation_error("degenerate intervals overlap");
    if (ilo > cursor)
      out.nondegenerate.push_back(
          {{cursor, ilo}, min_abs_degeneracy(p, {cursor, ilo})});
    out.degenerate.push_back({zeros[i], {ilo, ihi}});
    cursor = ihi;
  }
  if (dom.hi > cursor)
    out.nondegenerate.push_back(
        {{cursor, dom.hi}, min_abs_degeneracy(p, {cursor, dom.hi})});

  for (const auto& j : out.nondegenerate)
    if (!(j.min_abs_h > 0.0))
      throw validation_error(
          "nondegenerate piece could not be certified: the curvature "
          "indicator vanishes inside it");
  return out;
}

}  // namespace revdec
