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
#include <vector>

#include "revdec/common.hpp"

namespace revdec {

// Truncated power series in one variable: c[0] + c[1] t + ... + c[K] t^K.
// All operations propagate exact Taylor recurrences, so derivative values
// derived from these coefficients carry no differencing error.
class Series {
public:
  Series() = default;
  explicit Series(std::size_t order) : c_(order + 1, 0.0) {}
  Series(std::initializer_list<double> coeffs) : c_(coeffs) {}

  static Series constant(double v, std::size_t order) {
    Series s(order);
    s.c_[0] = v;
    return s;
  }

  // The expansion variable itself: value + t.
  static Series variable(double value, std::size_t order) {
    Series s(order);
    s.c_[0] = value;
    if (order >= 1) s.c_[1] = 1.0;
    return s;
  }

  std::size_t order() const { return c_.empty() ? 0 : c_.size() - 1; }
  double operator[](std::size_t k) const { return k < c_.size() ? c_[k] : 0.0; }
  double& at(std::size_t k) { return c_[k]; }
  const std::vector<double>& coeffs() const { return c_; }

  Series operator+(const Series& o) const {
    Series r(std::max(order(), o.order()));
    for (std::size_t k = 0; k < r.c_.size(); ++k) r.c_[k] = (*this)[k] + o[k];
    return r;
  }

  Series operator-(const Series& o) const {
    Series r(std::max(order(), o.order()));
    for (std::size_t k = 0; k < r.c_.size(); ++k) r.c_[k] = (*this)[k] - o[k];
    return r;
  }

  Series operator*(double s) const {
    Series r = *this;
    for (double& v : r.c_) v *= s;
    return r;
  }

  // Cauchy product truncated at the larger operand order.
  Series operator*(const Series& o) const {
    std::size_t ord = std::max(order(), o.order());
    Series r(ord);
    for (std::size_t k = 0; k <= ord; ++k) {
      double acc = 0.0;
      for (std::size_t j = 0; j <= k; ++j) acc += (*this)[j] * o[k - j];
      r.c_[k] = acc;
    }
    return r;
  }

  // Square root via the standard recurrence
  //   g_0 = sqrt(c_0),  g_k = (c_k - sum_{j=1}^{k-1} g_j g_{k-j}) / (2 g_0).
  Series sqrt() const {
    if (c_.empty() || c_[0] <= 0.0)
      throw capability_error("series sqrt requires a positive constant term");
    Series g(order());
    g.c_[0] = std::sqrt(c_[0]);
    for (std::size_t k = 1; k <= order(); ++k) {
      double acc = (*this)[k];
      for (std::size_t j = 1; j < k; ++j) acc -= g.c_[j] * g.c_[k - j];
      g.c_[k] = acc / (2.0 * g.c_[0]);
    }
    return g;
  }

  // Reciprocal via r_0 = 1/c_0, r_k = -(sum_{j=1}^{k} c_j r_{k-j}) / c_0.
  Series reciprocal() const {
    if (c_.empty() || c_[0] == 0.0)
      throw capability_error("series reciprocal requires a nonzero constant term");
    Series r(order());
    r.c_[0] = 1.0 / c_[0];
    for (std::size_t k = 1; k <= order(); ++k) {
      double acc = 0.0;
      for (std::size_t j = 1; j <= k; ++j) acc += c_[j] * r.c_[k - j];
      r.c_[k] = -acc / c_[0];
    }
    return r;
  }

private:
  std::vector<double> c_{0.0};
};

}  // namespace revdec
