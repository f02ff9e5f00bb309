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
#include <limits>
#include <string>
#include <vector>

#include "revdec/common.hpp"
#include "revdec/geometry.hpp"
#include "revdec/profile.hpp"
#include "revdec/structure.hpp"

namespace revdec {

// Sheared graph analysis near a sloped curvature zero. After the vertical
// normalization xihat3 = (xi3 - a0)/a1 + r_i the surface is the rotation of
// height rho + hhat(rho) with hhat vanishing to order n at r_i; the shear
// xi2' = (xi2 + xi3)/2, xi3' = (xi3 - xi2)/2 turns it into a graph
// xi3' = psi(xi1', xi2') over the slant plane, exactly xi1'^2/(4 xi2') for
// the pure cone.

namespace detail {

inline double normalized_perturbation(const Profile& p, const ZeroPoint& z,
                                      double rho) {
  return (p.value(rho) - z.a0) / z.a1 + z.r - rho;
}

}  // namespace detail

// Solves xi2' + psi = rho + hhat(rho), rho = sqrt(xi1'^2 + (xi2' - psi)^2)
// for psi. Each sweep freezes c = hhat(rho) and solves the offset-cone
// equation in closed form; the update contracts with rate ~ |hhat'|/2.
inline double implicit_sheared_height(const Profile& p, const ZeroPoint& z,
                                      double xi1, double xi2s) {
  if (z.a1 == 0.0)
    throw validation_error(
        "sheared-height analysis requires a sloped profile at the zero");
  if (!(xi2s > 0.0))
    throw validation_error("sheared coordinate must be positive");
  double psi = xi1 * xi1 / (4.0 * xi2s);
  int settled = 0;
  for (int it = 0; it < 100; ++it) {
    double rho = std::hypot(xi1, xi2s - psi);
    double c = detail::normalized_perturbation(p, z, rho);
    double next = (xi1 * xi1 + 2.0 * c * xi2s - c * c) / (4.0 * xi2s - 2.0 * c);
    double step = std::abs(next - psi);
    psi = next;
    if (step <= 1e-12) {
      if (++settled >= 3) return psi;
    } else {
      settled = 0;
    }
  }
  throw capability_error(
      "fixed-point iteration for the sheared height did not converge");
}

inline double sheared_height_deviation(const Profile& p, const ZeroPoint& z,
                                       double xi1, double xi2s) {
  return implicit_sheared_height(p, z, xi1, xi2s) -
         xi1 * xi1 / (4.0 * xi2s);
}

// psi in the unit coordinates of scale s_k = 2^k delta^{1/n}:
// psi_k(eta) = psi(s^{n/2} eta1, r_i + s eta2) / s^n.
inline double rescaled_sheared_height(const Profile& p, const ZeroPoint& z,
                                      int k, double delta, double eta1,
                                      double eta2) {
  if (z.n < 1) throw validation_error("zero must carry a vanishing order");
  double s = std::ldexp(std::pow(delta, 1.0 / z.n), k);
  double xi1 = std::pow(s, 0.5 * z.n) * eta1;
  double xi2s = z.r + s * eta2;
  return implicit_sheared_height(p, z, xi1, xi2s) / ipow(s, z.n);
}

struct DerivativeEntry {
  int p = 0;
  int q = 0;
  double phi_max = 0.0;
  double psik_max = 0.0;
  double bound_ratio = 0.0;
};

struct DerivativeTable {
  int n = 0;
  int k = 0;
  double s = 0.0;
  std::vector<DerivativeEntry> entries;

  const DerivativeEntry& at(int p, int q) const {
    for (const auto& e : entries)
      if (e.p == p && e.q == q) return e;
    throw validation_error("derivative order not tabulated");
  }
};

namespace detail {

// Central stencils on a uniform grid, exact through the listed order.
inline const std::vector<double>& stencil(int order) {
  static const std::vector<double> s0{1.0};
  static const std::vector<double> s1{-0.5, 0.0, 0.5};
  static const std::vector<double> s2{1.0, -2.0, 1.0};
  static const std::vector<double> s3{-0.5, 1.0, 0.0, -1.0, 0.5};
  switch (order) {
    case 0: return s0;
    case 1: return s1;
    case 2: return s2;
    case 3: return s3;
  }
  throw validation_error("finite-difference order must be at most 3");
}

// Max |D1^p D2^q f| over the interior of a tabulated grid, steps h1, h2.
inline double grid_derivative_max(const std::vector<std::vector<double>>& f,
                                  int p, int q, double h1, double h2) {
  const auto& w1 = stencil(p);
  const auto& w2 = stencil(q);
  const int r1 = static_cast<int>(w1.size()) / 2;
  const int r2 = static_cast<int>(w2.size()) / 2;
  const int n1 = static_cast<int>(f.size());
  const int n2 = static_cast<int>(f[0].size());
  double best = 0.0;
  for (int i = r1; i < n1 - r1; ++i) {
    for (int j = r2; j < n2 - r2; ++j) {
      double acc = 0.0;
      for (int a = 0; a < static_cast<int>(w1.size()); ++a) {
        if (w1[a] == 0.0) continue;
        double row = 0.0;
        for (int b = 0; b < static_cast<int>(w2.size()); ++b) {
          if (w2[b] == 0.0) continue;
          row += w2[b] * f[i + a - r1][j + b - r2];
        }
        acc += w1[a] * row;
      }
      best = std::max(best, std::abs(acc / (ipow(h1, p) * ipow(h2, q))));
    }
  }
  return best;
}

}  // namespace detail

// Tabulates finite-difference maxima of the cone deviation phi on the scale-k
// window |xi1'| <= s^{n/2}, xi2' in [r_i + s/2, r_i + s], and of the unit
// rescaling psi_k on [-1,1] x [1/2,1]; bound_ratio compares max|D phi| with
// min(s^{n-p-q}, 1).
inline DerivativeTable lemma_derivative_check(const Profile& p,
                                              const ZeroPoint& z, int k,
                                              double delta, int maxorder = 3) {
  if (z.kind == ProfileKind::QuasiTorus)
    throw validation_error(
        "sheared-height analysis requires a sloped profile at the zero");
  if (maxorder < 0 || maxorder > 3)
    throw validation_error("finite-difference order must be at most 3");
  if (!(delta > 0.0 && delta < 1.0))
    throw validation_error("delta must lie in (0,1)");

  const int n = std::max(z.n, 1);
  const double s = std::ldexp(std::pow(delta, 1.0 / n), k);
  const int grid = 41;
  const double xi1w = std::pow(s, 0.5 * n);
  const double h1 = 2.0 * xi1w / (grid - 1);
  const double h2 = 0.5 * s / (grid - 1);
  const double e1 = 2.0 / (grid - 1);
  const double e2 = 0.5 / (grid - 1);

  std::vector<std::vector<double>> phi(grid, std::vector<double>(grid));
  std::vector<std::vector<double>> psik(grid, std::vector<double>(grid));
  const double sn = ipow(s, n);
  for (int i = 0; i < grid; ++i) {
    double xi1 = -xi1w + i * h1;
    double eta1 = -1.0 + i * e1;
    for (int j = 0; j < grid; ++j) {
      double xi2s = z.r + 0.5 * s + j * h2;
      double eta2 = 0.5 + j * e2;
      phi[i][j] = sheared_height_deviation(p, z, xi1, xi2s);
      psik[i][j] =
          implicit_sheared_height(p, z, std::pow(s, 0.5 * n) * eta1,
                                  z.r + s * eta2) /
          sn;
    }
  }

  DerivativeTable table;
  table.n = n;
  table.k = k;
  table.s = s;
  for (int dp = 0; dp <= maxorder; ++dp) {
    for (int dq = 0; dp + dq <= maxorder; ++dq) {
      DerivativeEntry e;
      e.p = dp;
      e.q = dq;
      e.phi_max = detail::grid_derivative_max(phi, dp, dq, h1, h2);
      e.psik_max = detail::grid_derivative_max(psik, dp, dq, e1, e2);
      e.bound_ratio = e.phi_max / std::min(ipow(s, n - dp - dq), 1.0);
      table.entries.push_back(e);
    }
  }
  return table;
}

struct HessianReport {
  double s = 0.0;
  double max_rel_err = 0.0;
  double min_abs_eig = 0.0;
  double max_abs_eig = 0.0;
};

namespace detail {

// 2x2 finite-difference Hessian of a callable, steps h1, h2.
template <typename F>
inline Mat2 fd_hessian(F&& f, double x, double y, double h1, double h2) {
  Mat2 H;
  H.a = (f(x + h1, y) - 2.0 * f(x, y) + f(x - h1, y)) / (h1 * h1);
  H.d = (f(x, y + h2) - 2.0 * f(x, y) + f(x, y - h2)) / (h2 * h2);
  double mixed = (f(x + h1, y + h2) - f(x + h1, y - h2) -
                  f(x - h1, y + h2) + f(x - h1, y - h2)) /
                 (4.0 * h1 * h2);
  H.b = mixed;
  H.c = mixed;
  return H;
}

}  // namespace detail

// Determinant form of the rescaling identity: with the anisotropic change of
// variables A = diag(s^{n/2}, s), Hess(psi_k) = A^T Hess(psi) A / s^n, so
// det Hess(psi_k) = s^{2-n} det Hess(psi). The two sides are differenced with
// unrelated step sizes so agreement is evidence, not bookkeeping.
inline HessianReport hessian_identity_check(const Profile& p,
                                            const ZeroPoint& z, int k,
                                            double delta) {
  if (z.kind == ProfileKind::QuasiTorus)
    throw validation_error(
        "sheared-height analysis requires a sloped profile at the zero");
  if (!(delta > 0.0 && delta < 1.0))
    throw validation_error("delta must lie in (0,1)");

  const int n = std::max(z.n, 1);
  const double s = std::ldexp(std::pow(delta, 1.0 / n), k);
  const double sn = ipow(s, n);
  const double xi1w = std::pow(s, 0.5 * n);

  auto psi = [&](double a, double b) {
    return implicit_sheared_height(p, z, a, b);
  };
  auto psik = [&](double a, double b) {
    return implicit_sheared_height(p, z, xi1w * a, z.r + s * b) / sn;
  };

  HessianReport rep;
  rep.s = s;
  rep.min_abs_eig = std::numeric_limits<double>::infinity();
  const double heta = 4e-3;
  const double hxi1 = 3e-3 * xi1w;
  const double hxi2 = 3e-3 * s;
  const double floor = 1e-9;
  const double s2n = n >= 2 ? 1.0 / ipow(s, n - 2) : ipow(s, 2 - n);

  for (int i = 0; i < 5; ++i) {
    double eta1 = -0.8 + 0.4 * i;
    for (int j = 0; j < 5; ++j) {
      double eta2 = 0.55 + 0.1 * j;
      Mat2 Hk = detail::fd_hessian(psik, eta1, eta2, heta, heta);
      Mat2 H = detail::fd_hessian(psi, xi1w * eta1, z.r + s * eta2, hxi1,
                                  hxi2);
      double dk = Hk.det();
      double dxi = s2n * H.det();
      double scale = std::max({std::abs(dk), std::abs(dxi), floor});
      double err = (std::abs(dk) <= floor && std::abs(dxi) <= floor)
                       ? 0.0
                       : std::abs(dk - dxi) / scale;
      rep.max_rel_err = std::max(rep.max_rel_err, err);
      auto eig = Hk.eigenvalues();
      for (double lam : eig) {
        rep.min_abs_eig = std::min(rep.min_abs_eig, std::abs(lam));
        rep.max_abs_eig = std::max(rep.max_abs_eig, std::abs(lam));
      }
    }
  }
  return rep;
}

}  // namespace revdec
