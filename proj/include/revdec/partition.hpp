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
#include <cstdio>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "revdec/common.hpp"
#include "revdec/curvature.hpp"
#include "revdec/geometry.hpp"
#include "revdec/profile.hpp"
#include "revdec/structure.hpp"

namespace revdec {

enum class PieceCase { Nondegenerate, Plate, QuasiTorus, PerturbedCone };

inline const char* to_string(PieceCase c) {
  switch (c) {
    case PieceCase::Nondegenerate: return "nondegenerate";
    case PieceCase::Plate: return "plate";
    case PieceCase::QuasiTorus: return "quasi-torus";
    case PieceCase::PerturbedCone: return "perturbed-cone";
  }
  return "?";
}

// One dyadic annulus around a degeneracy circle, in canonical radial
// coordinates centered at 1. side -1 mirrors below the zero; the interval
// is already mirrored, so r = r_i + (u - 1) places it in the world.
struct Annulus {
  int k = 0;
  int side = +1;
  double s = 0.0;
  Interval u{0.0, 0.0};
  bool clipped = false;
};

// Half-open angular x radial footprint of one cap, plus stage metadata.
struct CapFootprint {
  Interval angular{0.0, 0.0};
  Interval radial{0.0, 0.0};
  PieceCase kind = PieceCase::Nondegenerate;
  int n = 0;
  int k = -1;
  int side = 0;
  int i1 = 0;
  int i2 = 0;
};

struct PartitionBox {
  CapFootprint footprint;
  BoxFrame frame;
};

struct FlatnessReport {
  bool pass = false;
  double deviation = 0.0;
  double containment = 0.0;
};

struct PartitionManifest {
  std::string profile_id;
  double delta = 0.0;
  std::vector<PartitionBox> boxes;
  std::map<std::string, std::size_t> counts;
  std::vector<std::string> log;
};

inline Vec3 surface_point(const Profile& p, double alpha, double r) {
  return {r * std::cos(alpha), r * std::sin(alpha), p.value(r)};
}

namespace detail {

// Subdivision edges with exact endpoints; interior points are the same
// expression for both neighbors, so shared bounds are shared bitwise.
inline std::vector<double> split_edges(double lo, double hi, int n) {
  std::vector<double> e(static_cast<std::size_t>(n) + 1);
  e.front() = lo;
  e.back() = hi;
  double len = hi - lo;
  for (int q = 1; q < n; ++q)
    e[static_cast<std::size_t>(q)] = lo + (len * q) / n;
  return e;
}

inline int checked_round(double x) {
  return static_cast<int>(std::llround(x));
}

}  // namespace detail

// Dyadic annuli U_k at scales s_k = 2^k delta^{1/n} filling (1-D, 1+D) on
// both sides of the zero; the last annulus is clipped to D. When
// delta^{1/n} >= D the whole reach is a single truncated U_0 (flagged).
inline std::vector<Annulus> dyadic_annuli(int n, double delta, double Delta,
                                          std::vector<std::string>* log = nullptr) {
  if (n < 2) throw validation_error("dyadic scales need order n >= 2");
  if (!(delta > 0.0 && delta < 1.0))
    throw validation_error("delta must lie in (0,1)");
  if (!(Delta > 0.0)) throw validation_error("half-width must be positive");

  const double d = std::pow(delta, 1.0 / n);
  struct Piece {
    int k;
    double s, lo, hi;
    bool clipped;
  };
  std::vector<Piece> right;
  if (d >= Delta) {
    right.push_back({0, d, 0.0, Delta, true});
    if (log)
      log->push_back("single annulus U_0 truncated to half-width " +
                     std::to_string(Delta));
  } else {
    right.push_back({0, d, 0.0, d, false});
    int K = static_cast<int>(std::ceil(std::log2(Delta / d) - 1e-9));
    for (int k = 1; k <= K; ++k) {
      double s = std::ldexp(d, k);
      bool clip = s > Delta;
      right.push_back({k, s, 0.5 * s, clip ? Delta : s, clip});
    }
  }

  std::vector<Annulus> out;
  out.reserve(2 * right.size());
  for (int side : {-1, +1}) {
    for (const auto& pc : right) {
      Annulus a;
      a.k = pc.k;
      a.side = side;
      a.s = pc.s;
      a.clipped = pc.clipped;
      if (side > 0)
        a.u = {1.0 + pc.lo, 1.0 + pc.hi};
      else
        a.u = {1.0 - pc.hi, 1.0 - pc.lo};
      out.push_back(a);
    }
  }
  return out;
}

// Tangent-aligned frame over the cap's surface patch. Extents along the
// tangent and normal axes are computed from the exact cylindrical form of
// the patch (a 1-D radial sweep times the two cosine extremes), and the
// center is shifted to balance the normal deviation two-sided. The thin
// halfwidth is delta: the frame stands for the delta-slab of the patch.
inline BoxFrame fit_cap_frame(const Profile& p, const CapFootprint& cap,
                              double delta, int rsamples = 33) {
  const double abar = cap.angular.mid();
  const double half_arc = 0.5 * cap.angular.length();
  const Jet jc = p.jet(cap.radial.mid(), 1);
  const double g1 = jc.d[1];
  const double w = std::sqrt(1.0 + g1 * g1);
  const double ca = std::cos(abar), sa = std::sin(abar);

  const Vec3 t_ang{-sa, ca, 0.0};
  const Vec3 t_rad{ca / w, sa / w, g1 / w};
  const Vec3 nrm{-g1 * ca / w, -g1 * sa / w, 1.0 / w};

  const double cmin = std::cos(std::min(half_arc, kPi));
  double rad_lo = 0.0, rad_hi = 0.0, nrm_lo = 0.0, nrm_hi = 0.0;
  bool first = true;
  for (int i = 0; i < rsamples; ++i) {
    double r = cap.radial.lo + i * cap.radial.length() / (rsamples - 1);
    double g = p.value(r);
    for (double c : {1.0, cmin}) {
      // dot(P, t_rad) and dot(P, nrm) for P = (r cos a, r sin a, g(r)),
      // written in terms of c = cos(a - abar).
      double dr = (r * c + g * g1) / w;
      double dn = (-g1 * r * c + g) / w;
      if (first) {
        rad_lo = rad_hi = dr;
        nrm_lo = nrm_hi = dn;
        first = false;
      } else {
        rad_lo = std::min(rad_lo, dr);
        rad_hi = std::max(rad_hi, dr);
        nrm_lo = std::min(nrm_lo, dn);
        nrm_hi = std::max(nrm_hi, dn);
      }
    }
  }

  const double h_ang =
      cap.radial.hi * std::sin(std::min(half_arc, 0.5 * kPi));
  const double h_rad = 0.5 * (rad_hi - rad_lo);

  BoxFrame f;
  f.center = t_rad * (0.5 * (rad_lo + rad_hi)) + nrm * (0.5 * (nrm_lo + nrm_hi));
  f.axis[0] = t_ang;
  f.axis[1] = t_rad;
  f.axis[2] = nrm;
  f.half[0] = std::max(h_ang, delta * 1e-6);
  f.half[1] = std::max(h_rad, delta * 1e-6);
  f.half[2] = delta;
  if (f.half[1] > f.half[0]) {
    std::swap(f.half[0], f.half[1]);
    std::swap(f.axis[0], f.axis[1]);
  }
  return f;
}

// Samples the surface patch over the footprint and reports the maximal
// distance to the frame's central plane plus the inflation needed for the
// delta-neighborhood of the patch to fit inside C times the frame.
inline FlatnessReport flatness_check(const BoxFrame& frame, const Profile& p,
                                     const CapFootprint& cap, double delta,
                                     double C = 1000.0, int samples = 32) {
  FlatnessReport rep;
  double worst_infl = 0.0, worst_dev = 0.0;
  for (int i = 0; i < samples; ++i) {
    double r = cap.radial.lo + i * cap.radial.length() / (samples - 1);
    double g = p.value(r);
    for (int j = 0; j < samples; ++j) {
      double alpha = cap.angular.lo + j * cap.angular.length() / (samples - 1);
      Vec3 q{r * std::cos(alpha), r * std::sin(alpha), g};
      Vec3 rel = q - frame.center;
      worst_dev = std::max(worst_dev, std::abs(rel.dot(frame.axis[2])));
      for (int ax = 0; ax < 3; ++ax) {
        double need =
            (std::abs(rel.dot(frame.axis[ax])) + delta) / frame.half[ax];
        worst_infl = std::max(worst_infl, need);
      }
    }
  }
  rep.deviation = worst_dev;
  rep.containment = worst_infl;
  rep.pass = worst_dev <= delta && worst_infl <= C;
  return rep;
}

// Theorem-style grid on a nondegenerate piece: radial rows of arclength
// about sqrt(delta) and angular sectors of the same world width.
inline std::vector<PartitionBox> partition_nondegenerate(const Profile& p,
                                                         Interval J,
                                                         double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw validation_error("delta must lie in (0,1)");
  const double root = std::sqrt(delta);
  double arclen = 0.0;
  const int quad = 512;
  for (int i = 0; i < quad; ++i) {
    double r = J.lo + (i + 0.5) * J.length() / quad;
    double g1 = p.jet(r, 1).d[1];
    arclen += std::sqrt(1.0 + g1 * g1) * J.length() / quad;
  }
  int nrad = std::max(1, detail::checked_round(arclen / root));
  auto redges = detail::split_edges(J.lo, J.hi, nrad);

  std::vector<PartitionBox> out;
  for (int i = 0; i < nrad; ++i) {
    Interval row{redges[static_cast<std::size_t>(i)],
                 redges[static_cast<std::size_t>(i) + 1]};
    double rbar = row.mid();
    int nang = std::max(1, detail::checked_round(kTwoPi * rbar / root));
    auto aedges = detail::split_edges(0.0, kTwoPi, nang);
    for (int j = 0; j < nang; ++j) {
      CapFootprint cap;
      cap.angular = {aedges[static_cast<std::size_t>(j)],
                     aedges[static_cast<std::size_t>(j) + 1]};
      cap.radial = row;
      cap.kind = PieceCase::Nondegenerate;
      cap.n = 0;
      cap.k = -1;
      cap.side = 0;
      cap.i1 = i;
      cap.i2 = j;
      out.push_back({cap, fit_cap_frame(p, cap, delta)});
    }
  }
  return out;
}

// Ruled plates: angular sectors of width about sqrt(delta) spanning the
// full radial extent of an affine piece.
inline std::vector<PartitionBox> plates_for_affine(const Profile& p,
                                                   Interval piece,
                                                   double delta) {
  int nang = std::max(1, static_cast<int>(std::ceil(kTwoPi / std::sqrt(delta))));
  auto aedges = detail::split_edges(0.0, kTwoPi, nang);
  std::vector<PartitionBox> out;
  out.reserve(static_cast<std::size_t>(nang));
  for (int j = 0; j < nang; ++j) {
    CapFootprint cap;
    cap.angular = {aedges[static_cast<std::size_t>(j)],
                   aedges[static_cast<std::size_t>(j) + 1]};
    cap.radial = piece;
    cap.kind = PieceCase::Plate;
    cap.n = 1;
    cap.k = -1;
    cap.side = 0;
    cap.i1 = j;
    cap.i2 = 0;
    out.push_back({cap, fit_cap_frame(p, cap, delta)});
  }
  return out;
}

enum class RuledVariant { Cone, Cylinder };

inline std::vector<PartitionBox> partition_cone_plates(double delta,
                                                       RuledVariant v) {
  Profile p = v == RuledVariant::Cone
                  ? Profile::cone(1.0, {0.5, 2.0})
                  : Profile::power_series(
                        1.0, {1.0}, std::numeric_limits<double>::infinity(),
                        {0.5, 2.0});
  return plates_for_affine(p, p.domain(), delta);
}

// First-stage caps tiling one annulus: angular width s^{1/2} (quasi-torus)
// or s^{n/2} (perturbed cone) in radians, radial extent the full annulus.
inline std::vector<CapFootprint> first_stage_caps(const ZeroPoint& z,
                                                  const Annulus& a) {
  double w1 = z.kind == ProfileKind::QuasiTorus
                  ? std::sqrt(a.s)
                  : std::pow(a.s, 0.5 * z.n);
  int nang = std::max(1, static_cast<int>(std::ceil(kTwoPi / w1)));
  auto aedges = detail::split_edges(0.0, kTwoPi, nang);

  Interval radial{z.r + (a.u.lo - 1.0), z.r + (a.u.hi - 1.0)};
  std::vector<CapFootprint> out;
  out.reserve(static_cast<std::size_t>(nang));
  for (int j = 0; j < nang; ++j) {
    CapFootprint cap;
    cap.angular = {aedges[static_cast<std::size_t>(j)],
                   aedges[static_cast<std::size_t>(j) + 1]};
    cap.radial = radial;
    cap.kind = z.kind == ProfileKind::QuasiTorus ? PieceCase::QuasiTorus
                                                 : PieceCase::PerturbedCone;
    cap.n = z.n;
    cap.k = a.k;
    cap.side = a.side;
    cap.i1 = j;
    cap.i2 = 0;
    out.push_back(cap);
  }
  return out;
}

// Affine change of variables sending the cap's patch to a unit-size set:
// rotate the cap center meridian onto the xi2 axis, renormalize the
// vertical axis so the local model is the canonical one (1 + u^n above the
// flat circle; the slope-one cone plus c u^n for the perturbed cone, after
// a quarter-turn in the (xi2, xi3) plane), then rescale anisotropically by
// the dyadic scale s. The side sign folds the mirrored annuli onto the
// canonical right half.
inline AffineMap rescale_map(const ZeroPoint& z, const CapFootprint& cap,
                             double s) {
  if (z.kind != ProfileKind::QuasiTorus && z.kind != ProfileKind::PerturbedCone)
    throw validation_error("rescale maps exist only for degenerate cases");
  const double sigma = cap.side < 0 ? -1.0 : 1.0;
  const double sig_n = (z.n % 2 != 0 && sigma < 0.0) ? -1.0 : 1.0;
  const double sn = ipow(s, z.n);

  AffineMap rot{Mat3::rotation_z(0.5 * kPi - cap.angular.mid()), {0, 0, 0}};

  if (z.kind == ProfileKind::QuasiTorus) {
    AffineMap vert{Mat3::diag(1.0, 1.0, 1.0 / z.cn),
                   {0.0, 0.0, 1.0 - z.a0 / z.cn}};
    AffineMap scale{Mat3::diag(1.0 / std::sqrt(s), sigma / s, sig_n / sn),
                    {0.0, -sigma * z.r / s, -sig_n / sn}};
    return scale.compose(vert.compose(rot));
  }

  AffineMap vert{Mat3::diag(1.0, 1.0, 1.0 / z.a1),
                 {0.0, 0.0, z.r - z.a0 / z.a1}};
  Mat3 quarter = Mat3::diag(1.0, 0.5, 0.5);
  quarter.m[1][2] = 0.5;
  quarter.m[2][1] = -0.5;
  AffineMap shear{quarter, {0, 0, 0}};
  AffineMap scale{Mat3::diag(1.0 / std::pow(s, 0.5 * z.n), sigma / s, sig_n / sn),
                  {0.0, -sigma * z.r / s, 0.0}};
  return scale.compose(shear.compose(vert.compose(rot)));
}

struct CurvatureRange {
  double lo = 0.0;
  double hi = 0.0;
};

// Range of principal curvature magnitudes of the mapped patch
// (alpha, r) -> M(surface point), from finite-difference fundamental forms
// on an interior sample grid.
inline CurvatureRange rescaled_patch_curvature_range(const Profile& p,
                                                     const AffineMap& M,
                                                     const CapFootprint& cap,
                                                     int samples = 9) {
  auto F = [&](double a, double r) { return M.apply(surface_point(p, a, r)); };
  const double ha = cap.angular.length() / 256.0;
  const double hr = cap.radial.length() / 256.0;
  CurvatureRange out{std::numeric_limits<double>::infinity(), 0.0};
  for (int i = 0; i < samples; ++i) {
    double a = cap.angular.lo + (i + 0.5) * cap.angular.length() / samples;
    for (int j = 0; j < samples; ++j) {
      double r = cap.radial.lo + (j + 0.5) * cap.radial.length() / samples;
      Vec3 xu = (F(a + ha, r) - F(a - ha, r)) * (0.5 / ha);
      Vec3 xv = (F(a, r + hr) - F(a, r - hr)) * (0.5 / hr);
      Vec3 x0 = F(a, r);
      Vec3 xuu = (F(a + ha, r) + F(a - ha, r) - x0 - x0) * (1.0 / (ha * ha));
      Vec3 xvv = (F(a, r + hr) + F(a, r - hr) - x0 - x0) * (1.0 / (hr * hr));
      Vec3 xuv = (F(a + ha, r + hr) - F(a + ha, r - hr) - F(a - ha, r + hr) +
                  F(a - ha, r - hr)) *
                 (0.25 / (ha * hr));
      Vec3 nrm = xu.cross(xv).normalized();
      double E = xu.dot(xu), Fm = xu.dot(xv), G = xv.dot(xv);
      double L = xuu.dot(nrm), Mm = xuv.dot(nrm), N = xvv.dot(nrm);
      // shape operator [I]^{-1}[II] in the (u,v) basis
      double inv = E * G - Fm * Fm;
      Mat2 shape{(G * L - Fm * Mm) / inv, (G * Mm - Fm * N) / inv,
                 (E * Mm - Fm * L) / inv, (E * N - Fm * Mm) / inv};
      for (double ev : shape.eigenvalues()) {
        out.lo = std::min(out.lo, std::abs(ev));
        out.hi = std::max(out.hi, std::abs(ev));
      }
    }
  }
  return out;
}

namespace detail {

// Worst-corner sagitta estimate (one-sided) for an m1 x m2 subdivision of
// the cap, from principal curvature bounds sampled on its radial interval.
inline std::pair<double, double> sagitta_terms(const Profile& p,
                                               const CapFootprint& cap,
                                               int m_rad, int m_ang) {
  double kap_rad = 0.0, kap_ang = 0.0, wmax = 1.0;
  const int probes = 9;
  for (int i = 0; i < probes; ++i) {
    double r = cap.radial.lo + i * cap.radial.length() / (probes - 1);
    auto [lr, la] = principal_curvature_magnitudes(p, r);
    kap_rad = std::max(kap_rad, lr);
    kap_ang = std::max(kap_ang, la);
    double g1 = p.jet(r, 1).d[1];
    wmax = std::max(wmax, std::sqrt(1.0 + g1 * g1));
  }
  double a = 0.5 * cap.radial.length() * wmax / m_rad;
  double b = 0.5 * cap.radial.hi * cap.angular.length() / m_ang;
  return {0.5 * kap_rad * a * a, 0.5 * kap_ang * b * b};
}

// Extra tangential split applied when the sagitta estimate would exceed
// the flatness budget; identical for every cap of one annulus, so the
// per-cap subbox count stays uniform in k.
inline std::pair<int, int> extra_split(const Profile& p,
                                       const CapFootprint& cap, int m_rad,
                                       int m_ang, double delta) {
  auto [dev_r, dev_a] = sagitta_terms(p, cap, m_rad, m_ang);
  if (dev_r + dev_a <= delta) return {1, 1};
  int er = std::max(1, static_cast<int>(std::ceil(std::sqrt(dev_r / (0.5 * delta)))));
  int ea = std::max(1, static_cast<int>(std::ceil(std::sqrt(dev_a / (0.5 * delta)))));
  return {er, ea};
}

}  // namespace detail

// Refines one first-stage cap into the second-stage grid pulled back from
// the rescaled picture: relative scale rho = (delta/s^n)^{1/2} in both
// tangential directions. When delta >= s^n the cap is already at final
// scale and is emitted unrefined (up to the flatness safeguard split).
inline std::vector<PartitionBox> second_stage_refine(
    const Profile& p, const ZeroPoint& z, const CapFootprint& cap, double s,
    double delta, std::vector<std::string>* log = nullptr) {
  const double sn = ipow(s, z.n);
  int nrad = 1, nang = 1;
  if (delta < sn) {
    double rho = std::sqrt(delta / sn);
    nang = std::max(1, detail::checked_round(1.0 / rho));
    nrad = std::max(1, detail::checked_round(cap.radial.length() / (s * rho)));
  }
  auto [er, ea] = detail::extra_split(p, cap, nrad, nang, delta);
  if ((er > 1 || ea > 1) && log && cap.i1 == 0) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "flatness safeguard split %dx%d at k=%d side=%+d", er, ea,
                  cap.k, cap.side);
    log->push_back(buf);
  }
  nrad *= er;
  nang *= ea;

  auto redges = detail::split_edges(cap.radial.lo, cap.radial.hi, nrad);
  auto aedges = detail::split_edges(cap.angular.lo, cap.angular.hi, nang);
  std::vector<PartitionBox> out;
  out.reserve(static_cast<std::size_t>(nrad) * static_cast<std::size_t>(nang));
  for (int i = 0; i < nrad; ++i) {
    for (int j = 0; j < nang; ++j) {
      CapFootprint sub = cap;
      sub.radial = {redges[static_cast<std::size_t>(i)],
                    redges[static_cast<std::size_t>(i) + 1]};
      sub.angular = {aedges[static_cast<std::size_t>(j)],
                     aedges[static_cast<std::size_t>(j) + 1]};
      sub.i2 = i * nang + j;
      out.push_back({sub, fit_cap_frame(p, sub, delta)});
    }
  }
  return out;
}

// Closed-form per-annulus count prediction from the dimension formulas:
// (2 pi / w1) first-stage caps, each refined (|U|/(s rho)) x (1/rho) times.
inline double predicted_annulus_boxes(const ZeroPoint& z, const Annulus& a,
                                      double delta) {
  double w1 = z.kind == ProfileKind::QuasiTorus ? std::sqrt(a.s)
                                                : std::pow(a.s, 0.5 * z.n);
  double first = kTwoPi / w1;
  double sn = ipow(a.s, z.n);
  if (delta >= sn) return first;
  double rho = std::sqrt(delta / sn);
  double per_cap = std::max(1.0, a.u.length() / (a.s * rho)) *
                   std::max(1.0, 1.0 / rho);
  return first * per_cap;
}

namespace detail {

inline std::string stage_key(std::size_t zero_idx, int side, int k,
                             const char* what) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "zero%zu/%s/k%d/%s", zero_idx,
                side < 0 ? "left" : "right", k, what);
  return buf;
}

}  // namespace detail

// Assembles the full multiscale partition: nondegenerate grids on the J
// pieces, ruled plates for an affine profile, and the two-stage dyadic
// construction around every quasi-torus or perturbed-cone circle.
inline PartitionManifest build_partition(const Profile& p, double delta,
                                         double user_cap = 0.25,
                                         double eta = 0.5) {
  if (!(delta > 0.0 && delta < 1.0))
    throw validation_error("delta must lie in (0,1)");
  auto zeros = find_curvature_zeros(p);
  auto dec = decompose_interval(p, zeros, user_cap, eta);

  PartitionManifest man;
  man.profile_id = p.id();
  man.delta = delta;

  for (const auto& jp : dec.nondegenerate) {
    auto boxes = partition_nondegenerate(p, jp.piece, delta);
    man.counts["nondegenerate"] += boxes.size();
    for (auto& b : boxes) man.boxes.push_back(std::move(b));
  }

  for (std::size_t zi = 0; zi < dec.degenerate.size(); ++zi) {
    const ZeroPoint& z = dec.degenerate[zi].zero;
    if (z.kind == ProfileKind::Cone) {
      auto boxes = plates_for_affine(p, dec.degenerate[zi].piece, delta);
      man.counts["plates"] += boxes.size();
      for (auto& b : boxes) man.boxes.push_back(std::move(b));
      continue;
    }
    auto annuli = dyadic_annuli(z.n, delta, z.delta, &man.log);
    for (const auto& a : annuli) {
      auto caps = first_stage_caps(z, a);
      man.counts[detail::stage_key(zi, a.side, a.k, "caps")] = caps.size();
      std::size_t boxes_here = 0;
      for (const auto& cap : caps) {
        auto boxes = second_stage_refine(p, z, cap, a.s, delta, &man.log);
        boxes_here += boxes.size();
        for (auto& b : boxes) man.boxes.push_back(std::move(b));
      }
      man.counts[detail::stage_key(zi, a.side, a.k, "boxes")] = boxes_here;
    }
  }

  man.counts["total"] = man.boxes.size();
  return man;
}

}  // namespace revdec
