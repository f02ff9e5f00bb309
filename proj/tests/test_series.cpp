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

#include "revdec/series.hpp"

using revdec::Series;

TEST_CASE("series product matches convolution") {
  Series a{1.0, 2.0, 3.0};
  Series b{4.0, 5.0};
  Series p = a * b;
  CHECK(p[0] == 4.0);
  CHECK(p[1] == 13.0);
  CHECK(p[2] == 22.0);
}

TEST_CASE("series sqrt reproduces the binomial expansion of sqrt(1 - t)") {
  // (1 - t)^(1/2) = 1 - t/2 - t^2/8 - t^3/16 - 5 t^4/128 - 7 t^5/256 - ...
  Series s(6);
  s.at(0) = 1.0;
  s.at(1) = -1.0;
  Series g = s.sqrt();
  const double expect[] = {1.0,      -1.0 / 2,  -1.0 / 8,   -1.0 / 16,
                           -5.0 / 128, -7.0 / 256, -21.0 / 1024};
  for (int k = 0; k <= 6; ++k)
    CHECK_THAT(g[static_cast<std::size_t>(k)],
               Catch::Matchers::WithinRel(expect[k], 1e-15));
}

TEST_CASE("series sqrt squared returns the input") {
  Series s(8);
  s.at(0) = 2.25;
  s.at(1) = -0.7;
  s.at(2) = 0.3;
  s.at(3) = 0.05;
  Series g = s.sqrt();
  Series back = g * g;
  for (std::size_t k = 0; k <= 8; ++k)
    CHECK_THAT(back[k], Catch::Matchers::WithinAbs(s[k], 1e-13));
}

TEST_CASE("series reciprocal inverts the product") {
  Series s(6);
  s.at(0) = 0.5;
  s.at(1) = 1.5;
  s.at(2) = -2.0;
  Series r = s.reciprocal();
  Series one = s * r;
  CHECK_THAT(one[0], Catch::Matchers::WithinRel(1.0, 1e-15));
  for (std::size_t k = 1; k <= 6; ++k)
    CHECK_THAT(one[k], Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("series sqrt rejects nonpositive leading term") {
  Series s(3);
  s.at(0) = -1.0;
  CHECK_THROWS_AS(s.sqrt(), revdec::capability_error);
}
