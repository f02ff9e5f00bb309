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

#include "revdec/common.hpp"

namespace revdec {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 normalized() const {
    double n = norm();
    if (n == 0.0) throw capability_error("cannot normalize a zero vector");
    return {x / n, y / n, z / n};
  }
};

struct Mat2 {
  // [[a, b], [c, d]]
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

  double det() const { return a * d - b * c; }
  double trace() const { return a + d; }

  // Real eigenvalues of a 2x2 with nonnegative discriminant; shape operators
  // of graphs are diagonalizable with real spectrum, so tiny negative
  // discriminants are rounding noise and get clamped.
  std::array<double, 2> eigenvalues() const {
    double t = trace(), disc = t * t - 4.0 * det();
    double s = std::sqrt(std::max(disc, 0.0));
    return {0.5 * (t + s), 0.5 * (t - s)};
  }
};

struct Mat3 {
  double m[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

  static Mat3 identity() { return {}; }

  static Mat3 diag(double a, double b, double c) {
    Mat3 r;
    r.m[0][0] = a; r.m[1][1] = b; r.m[2][2] = c;
    r.m[0][1] = r.m[0][2] = r.m[1][0] = r.m[1][2] = r.m[2][0] = r.m[2][1] = 0.0;
    return r;
  }

  // Rotation about the xi3 axis by angle t (counterclockwise in xi1-xi2).
  static Mat3 rotation_z(double t) {
    Mat3 r = diag(1, 1, 1);
    double c = std::cos(t), s = std::sin(t);
    r.m[0][0] = c; r.m[0][1] = -s;
    r.m[1][0] = s; r.m[1][1] = c;
    return r;
  }

  Vec3 apply(const Vec3& v) const {
    return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
  }

  Mat3 operator*(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double acc = 0.0;
        for (int k = 0; k < 3; ++k) acc += m[i][k] * o.m[k][j];
        r.m[i][j] = acc;
      }
    return r;
  }

  double det() const {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  }

  Mat3 inverse() const {
    double dt = det();
    if (dt == 0.0 || !std::isfinite(dt)) throw capability_error("matrix is singular");
    Mat3 r;
    r.m[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / dt;
    r.m[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / dt;
    r.m[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / dt;
    r.m[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / dt;
    r.m[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / dt;
    r.m[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / dt;
    r.m[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / dt;
    r.m[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / dt;
    r.m[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / dt;
    return r;
  }

  double frobenius() const {
    double acc = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) acc += m[i][j] * m[i][j];
    return std::sqrt(acc);
  }
};

// Invertible affine map x -> linear x + offset.
struct AffineMap {
  Mat3 linear;
  Vec3 offset;

  Vec3 apply(const Vec3& v) const { return linear.apply(v) + offset; }

  // (*this) after `inner`: apply(inner.apply(x)).
  AffineMap compose(const AffineMap& inner) const {
    return {linear * inner.linear, linear.apply(inner.offset) + offset};
  }

  AffineMap inverse() const {
    Mat3 li = linear.inverse();
    return {li, -li.apply(offset)};
  }

  // Rough conditioning estimate, |L|_F |L^-1|_F.
  double condition() const { return linear.frobenius() * linear.inverse().frobenius(); }
};

// Oriented box: center, three unit axes, halfwidths sorted descending.
// The "central plane" is spanned by the two wide axes; axis[2] is the
// thin direction.
struct BoxFrame {
  Vec3 center;
  Vec3 axis[3];
  double half[3] = {0, 0, 0};

  // Largest inflation factor needed to contain p; <= 1 means inside.
  double needed_inflation(const Vec3& p) const {
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
      double c = std::abs((p - center).dot(axis[i])) / half[i];
      worst = std::max(worst, c);
    }
    return worst;
  }

  bool contains(const Vec3& p, double inflate = 1.0) const {
    return needed_inflation(p) <= inflate;
  }

  double plane_distance(const Vec3& p) const { return std::abs((p - center).dot(axis[2])); }

  // Smallest pairwise deviation from orthogonality, in radians.
  double max_axis_skew() const {
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        worst = std::max(worst, std::abs(std::asin(std::clamp(axis[i].dot(axis[j]), -1.0, 1.0))));
    return worst;
  }

  // Builds an orthonormal frame covering the parallelepiped spanned by the
  // half-edge vectors e1, e2, e3 around `center`. Axes come from Gram-Schmidt
  // on the edges sorted by length; halfwidths are the support values of the
  // parallelepiped along those axes, then sorted descending.
  static BoxFrame from_edges(const Vec3& center, Vec3 e1, Vec3 e2, Vec3 e3) {
    Vec3 e[3] = {e1, e2, e3};
    // Sort edges by length, longest first, so the wide axes stay tangential.
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        if (e[j].norm() > e[i].norm()) std::swap(e[i], e[j]);
    Vec3 a0 = e[0].normalized();
    Vec3 a1 = (e[1] - a0 * a0.dot(e[1]));
    if (a1.norm() < 1e-14 * e[1].norm())
      throw capability_error("degenerate box edges: first two are collinear");
    a1 = a1.normalized();
    Vec3 a2 = a0.cross(a1).normalized();
    if (a2.dot(e[2]) < 0.0) a2 = -a2;

    BoxFrame f;
    f.center = center;
    f.axis[0] = a0; f.axis[1] = a1; f.axis[2] = a2;
    for (int i = 0; i < 3; ++i) {
      f.half[i] = std::abs(f.axis[i].dot(e[0])) + std::abs(f.axis[i].dot(e[1])) +
                  std::abs(f.axis[i].dot(e[2]));
    }
    // Keep halfwidths descending; axes travel with their widths.
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        if (f.half[j] > f.half[i]) {
          std::swap(f.half[i], f.half[j]);
          std::swap(f.axis[i], f.axis[j]);
        }
    return f;
  }
};

}  // namespace revdec
