// Copyright 2026 The rmdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include "rmdp/lp.hpp"

using namespace rmdp;

TEST_CASE("small standard-form problem") {
  // min -x1 - 2 x2  s.t.  x1 + x2 + s1 = 4,  x2 + s2 = 3.  Optimum (1, 3).
  Matrix A(2, 4);
  A(0, 0) = 1;
  A(0, 1) = 1;
  A(0, 2) = 1;
  A(1, 1) = 1;
  A(1, 3) = 1;
  const std::vector<double> b = {4, 3};
  const std::vector<double> c = {-1, -2, 0, 0};
  const LpResult r = solve_standard_form(A, b, c);
  REQUIRE(r.status == LpStatus::kOptimal);
  CHECK(r.objective == doctest::Approx(-7.0));
  CHECK(r.x[0] == doctest::Approx(1.0));
  CHECK(r.x[1] == doctest::Approx(3.0));
}

TEST_CASE("infeasible and unbounded problems") {
  Matrix A(1, 2);
  A(0, 0) = 1;
  A(0, 1) = 1;
  const std::vector<double> neg = {-1};
  CHECK(solve_standard_form(A, neg, std::vector<double>{0, 0}).status == LpStatus::kInfeasible);
  Matrix B(1, 2);
  B(0, 0) = 1;
  B(0, 1) = -1;
  const std::vector<double> one = {1};
  CHECK(solve_standard_form(B, one, std::vector<double>{-1, 0}).status == LpStatus::kUnbounded);
}

TEST_CASE("degenerate problem terminates") {
  // Classic cycling example for the largest-coefficient rule.
  Matrix A(3, 7);
  const double rows[3][7] = {{0.5, -5.5, -2.5, 9, 1, 0, 0}, {0.5, -1.5, -0.5, 1, 0, 1, 0}, {1, 0, 0, 0, 0, 0, 1}};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 7; ++j) A(i, j) = rows[i][j];
  }
  const std::vector<double> b = {0, 0, 1};
  const std::vector<double> c = {-10, 57, 9, 24, 0, 0, 0};
  const LpResult r = solve_standard_form(A, b, c);
  REQUIRE(r.status == LpStatus::kOptimal);
  CHECK(r.objective == doctest::Approx(-1.0));
}

TEST_CASE("convex hull membership") {
  const std::vector<std::vector<double>> square = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  CHECK(in_convex_hull(std::vector<double>{0.5, 0.5}, square));
  CHECK(in_convex_hull(std::vector<double>{1, 1}, square));
  CHECK_FALSE(in_convex_hull(std::vector<double>{1.01, 0.5}, square));
  const std::vector<std::vector<double>> segment = {{0, 0}, {1, 1}};
  CHECK_FALSE(in_convex_hull(std::vector<double>{0.5, 0.4}, segment));
  CHECK(in_convex_hull(std::vector<double>{0.3, 0.3}, segment));
}
