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
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "revdec/common.hpp"
#include "revdec/series.hpp"

namespace revdec {

enum class ProfileKind { Cone, Torus, QuasiTorus, PerturbedCone, PowerSeries };

inline const char* to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::Cone: return "cone";
    case ProfileKind::Torus: return "torus";
    case ProfileKind::QuasiTorus: return "quasi-torus";
    case ProfileKind::PerturbedCone: return "perturbed-cone";
    case ProfileKind::PowerSeries: return "power-series";
  }
  return "?";
}

// Derivative values gamma(r), gamma'(r), ..., gamma^(order)(r) at one point.
struct Jet {
  double r = 0.0;
  std::vector<double> d;  // d[m] = gamma^(m)(r)

  int order() const { return static_cast<int>(d.size()) - 1; }
  double operator[](std::size_t m) const { return m < d.size() ? d[m] : 0.0; }
};

// One-variable profile curve gamma on a radial domain; the surface of
// revolution it generates is (xi1, xi2, gamma(sqrt(xi1^2 + xi2^2))).
// Immutable after construction; all evaluations are pure.
class Profile {
public:
  static constexpr int kDefaultMaxOrder = 8;

  // gamma(r) = slope * r.
  static Profile cone(double slope, Interval domain, int max_order = kDefaultMaxOrder) {
    Profile p(ProfileKind::Cone, domain, max_order);
    if (slope == 0.0 || !std::isfinite(slope))
      throw validation_error("cone requires a nonzero finite slope");
    p.require_standard_domain(domain);
    p.a_ = slope;
    return p;
  }

  // gamma(r) = sqrt(minor^2 - (r-1)^2), the upper half of the minor circle.
  static Profile torus(double minor, Interval domain, int max_order = kDefaultMaxOrder) {
    Profile p(ProfileKind::Torus, domain, max_order);
    if (!(minor > 0.0) || !std::isfinite(minor))
      throw validation_error("torus requires a positive minor radius");
    double half = std::max(std::abs(domain.lo - 1.0), std::abs(domain.hi - 1.0));
    if (!(half < minor)) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "torus domain half-width must stay below the minor radius "
                    "(need max|r-1| < %.17g, got %.17g)",
                    minor, half);
      throw validation_error(buf);
    }
    if (!(domain.lo > 0.0))
      throw validation_error("torus domain must keep r > 0");
    p.a_ = minor;
    return p;
  }

  // gamma(r) = 1 + (r-1)^n + sum_j tail[j] (r-1)^(n+1+j).
  static Profile quasi_torus(int n, std::vector<double> tail, Interval domain,
                             int max_order = kDefaultMaxOrder) {
    if (n < 2) throw validation_error("quasi-torus order must satisfy n >= 2");
    Profile p(ProfileKind::QuasiTorus, domain, max_order);
    p.require_standard_domain(domain);
    p.n_ = n;
    p.center_ = 1.0;
    p.coeffs_.assign(static_cast<std::size_t>(n) + 1 + tail.size(), 0.0);
    p.coeffs_[0] = 1.0;
    p.coeffs_[static_cast<std::size_t>(n)] = 1.0;
    for (std::size_t j = 0; j < tail.size(); ++j)
      p.coeffs_[static_cast<std::size_t>(n) + 1 + j] = tail[j];
    return p;
  }

  // gamma(r) = r + (r-1)^n + sum_j tail[j] (r-1)^(n+1+j).
  static Profile perturbed_cone(int n, std::vector<double> tail, Interval domain,
                                int max_order = kDefaultMaxOrder) {
    if (n < 3) throw validation_error("perturbed-cone order must satisfy n >= 3");
    Profile p(ProfileKind::PerturbedCone, domain, max_order);
    p.require_standard_domain(domain);
    p.n_ = n;
    p.center_ = 1.0;
    p.coeffs_.assign(static_cast<std::size_t>(n) + 1 + tail.size(), 0.0);
    p.coeffs_[0] = 1.0;
    p.coeffs_[1] = 1.0;
    p.coeffs_[static_cast<std::size_t>(n)] = 1.0;
    for (std::size_t j = 0; j < tail.size(); ++j)
      p.coeffs_[static_cast<std::size_t>(n) + 1 + j] = tail[j];
    return p;
  }

  // gamma(r) = sum_m coeffs[m] (r-center)^m, valid on |r-center| < radius.
  static Profile power_series(double center, std::vector<double> coeffs, double radius,
                              Interval domain, int max_order = kDefaultMaxOrder) {
    Profile p(ProfileKind::PowerSeries, domain, max_order);
    if (!(radius > 0.0)) throw validation_error("power-series convergence radius must be positive");
    if (coeffs.empty()) throw validation_error("power-series needs at least one coefficient");
    p.require_standard_domain(domain);
    if (std::isfinite(radius) &&
        !(domain.lo > center - radius && domain.hi < center + radius))
      throw validation_error("power-series domain must lie inside the convergence disk");
    p.center_ = center;
    p.coeffs_ = std::move(coeffs);
    p.radius_ = radius;
    return p;
  }

  ProfileKind kind() const { return kind_; }
  Interval domain() const { return domain_; }
  int max_order() const { return max_order_; }
  double cone_slope() const { return a_; }
  double torus_minor() const { return a_; }
  int canonical_order() const { return n_; }
  double series_center() const { return center_; }
  const std::vector<double>& series_coeffs() const { return coeffs_; }

  double value(double r) const {
    check_point(r);
    switch (kind_) {
      case ProfileKind::Cone: return a_ * r;
      case ProfileKind::Torus: return std::sqrt(a_ * a_ - (r - 1.0) * (r - 1.0));
      default: {
        // Horner on the stored coefficients about center_.
        double u = r - center_;
        double acc = 0.0;
        for (std::size_t j = coeffs_.size(); j-- > 0;) acc = acc * u + coeffs_[j];
        return acc;
      }
    }
  }

  // Taylor-mode jet: derivative values through `order`, exact recurrences.
  Jet jet(double r, int order) const {
    check_point(r);
    if (order < 0) throw validation_error("jet order must be nonnegative");
    if (order > max_order_) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "jet order %d exceeds configured maximum %d", order,
                    max_order_);
      throw capability_error(buf);
    }
    Jet out;
    out.r = r;
    out.d.assign(static_cast<std::size_t>(order) + 1, 0.0);
    switch (kind_) {
      case ProfileKind::Cone:
        out.d[0] = a_ * r;
        if (order >= 1) out.d[1] = a_;
        break;
      case ProfileKind::Torus: {
        double u0 = r - 1.0;
        Series s(static_cast<std::size_t>(order));
        s.at(0) = a_ * a_ - u0 * u0;
        if (order >= 1) s.at(1) = -2.0 * u0;
        if (order >= 2) s.at(2) = -1.0;
        Series g = s.sqrt();
        double fact = 1.0;
        for (int m = 0; m <= order; ++m) {
          if (m > 0) fact *= m;
          out.d[static_cast<std::size_t>(m)] = fact * g[static_cast<std::size_t>(m)];
        }
        break;
      }
      default: {
        double u = r - center_;
        for (int m = 0; m <= order; ++m) {
          double acc = 0.0;
          // gamma^(m)(r) = sum_{j>=m} c_j j!/(j-m)! u^(j-m), evaluated by
          // Horner from the top coefficient down.
          for (std::size_t j = coeffs_.size(); j-- > static_cast<std::size_t>(m);) {
            double fall = 1.0;
            for (int i = 0; i < m; ++i) fall *= static_cast<double>(j - static_cast<std::size_t>(i));
            acc = acc * u + fall * coeffs_[j];
          }
          out.d[static_cast<std::size_t>(m)] = acc;
        }
        break;
      }
    }
    return out;
  }

  // Taylor coefficients about r0: c_m = gamma^(m)(r0) / m!.
  std::vector<double> taylor_at(double r0, int order) const {
    Jet j = jet(r0, order);
    std::vector<double> c(j.d.size());
    double fact = 1.0;
    for (std::size_t m = 0; m < c.size(); ++m) {
      if (m > 0) fact *= static_cast<double>(m);
      c[m] = j.d[m] / fact;
    }
    return c;
  }

  std::string id() const {
    char buf[256];
    switch (kind_) {
      case ProfileKind::Cone:
        std::snprintf(buf, sizeof buf, "cone(slope=%.17g;domain=[%.17g,%.17g])", a_, domain_.lo,
                      domain_.hi);
        break;
      case ProfileKind::Torus:
        std::snprintf(buf, sizeof buf, "torus(minor=%.17g;domain=[%.17g,%.17g])", a_, domain_.lo,
                      domain_.hi);
        break;
      case ProfileKind::QuasiTorus:
        std::snprintf(buf, sizeof buf, "quasi-torus(n=%d;terms=%zu;domain=[%.17g,%.17g])", n_,
                      coeffs_.size(), domain_.lo, domain_.hi);
        break;
      case ProfileKind::PerturbedCone:
        std::snprintf(buf, sizeof buf, "perturbed-cone(n=%d;terms=%zu;domain=[%.17g,%.17g])", n_,
                      coeffs_.size(), domain_.lo, domain_.hi);
        break;
      case ProfileKind::PowerSeries:
        std::snprintf(buf, sizeof buf,
                      "power-series(center=%.17g;terms=%zu;domain=[%.17g,%.17g])", center_,
                      coeffs_.size(), domain_.lo, domain_.hi);
        break;
    }
    return buf;
  }

private:
  Profile(ProfileKind k, Interval domain, int max_order) : kind_(k), domain_(domain), max_order_(max_order) {
    if (!domain.valid()) throw validation_error("profile domain must be a nonempty finite interval");
    if (max_order < 2) throw validation_error("maximum jet order must be at least 2");
  }

  void require_standard_domain(const Interval& d) const {
    if (!(d.lo >= 0.5 && d.hi <= 2.0))
      throw validation_error("profile domain must lie inside [1/2, 2]");
  }

  void check_point(double r) const {
    if (!(r >= domain_.lo - 1e-12 && r <= domain_.hi + 1e-12))
      throw validation_error("evaluation point lies outside the profile domain");
  }

  ProfileKind kind_;
  Interval domain_;
  int max_order_ = kDefaultMaxOrder;
  double a_ = 0.0;                     // cone slope or torus minor radius
  int n_ = 0;                          // canonical leading order
  double center_ = 0.0;                // expansion center for series kinds
  double radius_ = std::numeric_limits<double>::infinity();
  std::vector<double> coeffs_;
};

}  // namespace revdec
