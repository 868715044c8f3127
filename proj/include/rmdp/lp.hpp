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

#pragma once

#include <span>
#include <vector>

#include "rmdp/tensor.hpp"

namespace rmdp {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> x;
  double objective = 0.0;
  /// Phase-one objective: L1 violation of Ax = b at the end of phase one.
  double infeasibility = 0.0;
};

/// Dense two-phase tableau simplex with Bland's rule for
///
///     minimize c^T x  subject to  A x = b,  x >= 0.
///
/// The problem is declared infeasible when the phase-one optimum exceeds
/// `feasibility_tol`. Meant for tiny problems (tens of rows and columns).
LpResult solve_standard_form(const Matrix& A, std::span<const double> b,
                             std::span<const double> c, double feasibility_tol = 1e-9);

/// True iff `point` is a convex combination of `vertices` up to an L1
/// residual of `tol`.
bool in_convex_hull(std::span<const double> point, const std::vector<std::vector<double>>& vertices,
                    double tol = 1e-9);

}  // namespace rmdp
