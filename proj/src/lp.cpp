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

#include "rmdp/lp.hpp"

#include <cmath>
#include <limits>

#include "rmdp/error.hpp"

namespace rmdp {
namespace {

constexpr double kPivotEps = 1e-11;

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), t_(rows + 1, cols + 1) {}

  double& at(std::size_t i, std::size_t j) { return t_(i, j); }
  double& rhs(std::size_t i) { return t_(i, cols_); }
  double& cost(std::size_t j) { return t_(rows_, j); }
  double& objective() { return t_(rows_, cols_); }

  void pivot(std::size_t r, std::size_t c) {
    const double p = t_(r, c);
    for (std::size_t j = 0; j <= cols_; ++j) t_(r, j) /= p;
    t_(r, c) = 1.0;
    for (std::size_t i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) t_(i, j) -= f * t_(r, j);
      t_(i, c) = 0.0;
    }
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  Matrix t_;
};

enum class PhaseOutcome { kOptimal, kUnbounded };

// Runs simplex iterations over the columns [0, allowed_cols). `active` masks
// rows that still constrain the problem.
PhaseOutcome run_phase(Tableau& tab, std::vector<std::size_t>& basis,
                       const std::vector<bool>& active, std::size_t allowed_cols) {
  const std::size_t m = basis.size();
  const std::size_t max_iter = 100 * (m + allowed_cols) + 1000;
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    // Bland: lowest-index improving column.
    std::size_t enter = allowed_cols;
    for (std::size_t j = 0; j < allowed_cols; ++j) {
      if (tab.cost(j) < -kPivotEps) {
        enter = j;
        break;
      }
    }
    if (enter == allowed_cols) return PhaseOutcome::kOptimal;

    // Bland: among minimum-ratio rows, the one whose basic variable has the
    // lowest index.
    std::size_t leave = m;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (!active[i]) continue;
      const double a = tab.at(i, enter);
      if (a <= kPivotEps) continue;
      const double ratio = tab.rhs(i) / a;
      if (ratio < best_ratio - 1e-12 ||
          (std::abs(ratio - best_ratio) <= 1e-12 && leave < m && basis[i] < basis[leave])) {
        best_ratio = ratio;
        leave = i;
      }
    }
    if (leave == m) return PhaseOutcome::kUnbounded;
    tab.pivot(leave, enter);
    basis[leave] = enter;
  }
  throw NumericalError("simplex iteration limit reached");
}

}  // namespace

LpResult solve_standard_form(const Matrix& A, std::span<const double> b,
                             std::span<const double> c, double feasibility_tol) {
  const std::size_t m = A.rows();
  const std::size_t n = A.cols();
  if (b.size() != m || c.size() != n) throw InvalidInput("LP dimensions disagree");

  // Columns: n structural variables, then one artificial per row.
  Tableau tab(m, n + m);
  std::vector<std::size_t> basis(m);
  std::vector<bool> active(m, true);
  for (std::size_t i = 0; i < m; ++i) {
    const double sign = b[i] < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) tab.at(i, j) = sign * A(i, j);
    tab.at(i, n + i) = 1.0;
    tab.rhs(i) = sign * b[i];
    basis[i] = n + i;
  }

  // Phase one: minimize the sum of artificials.
  for (std::size_t j = 0; j < n; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) sum += tab.at(i, j);
    tab.cost(j) = -sum;
  }
  {
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) sum += tab.rhs(i);
    tab.objective() = -sum;
  }
  run_phase(tab, basis, active, n + m);

  LpResult result;
  result.infeasibility = -tab.objective();
  if (result.infeasibility > feasibility_tol) {
    result.status = LpStatus::kInfeasible;
    return result;
  }

  // Drive remaining artificials out of the basis; rows where that is
  // impossible are linearly dependent and get retired.
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) continue;
    std::size_t col = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(tab.at(i, j)) > 1e-9) {
        col = j;
        break;
      }
    }
    if (col == n) {
      active[i] = false;
    } else {
      tab.pivot(i, col);
      basis[i] = col;
    }
  }

  // Phase two with the true costs over structural columns only.
  for (std::size_t j = 0; j < n + m; ++j) {
    double d = j < n ? c[j] : 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (basis[i] < n) d -= c[basis[i]] * tab.at(i, j);
    }
    tab.cost(j) = d;
  }
  {
    double z = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (basis[i] < n) z += c[basis[i]] * tab.rhs(i);
    }
    tab.objective() = -z;
  }
  if (run_phase(tab, basis, active, n) == PhaseOutcome::kUnbounded) {
    result.status = LpStatus::kUnbounded;
    return result;
  }

  result.status = LpStatus::kOptimal;
  result.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n && active[i]) result.x[basis[i]] = std::max(0.0, tab.rhs(i));
  }
  result.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) result.objective += c[j] * result.x[j];
  return result;
}

bool in_convex_hull(std::span<const double> point, const std::vector<std::vector<double>>& vertices,
                    double tol) {
  if (vertices.empty()) return false;
  const std::size_t d = point.size();
  const std::size_t k = vertices.size();
  Matrix A(d + 1, k);
  std::vector<double> b(d + 1);
  for (std::size_t j = 0; j < k; ++j) {
    if (vertices[j].size() != d) throw InvalidInput("hull vertex dimension mismatch");
    // Exact hit needs no LP.
    if (sup_norm_diff(vertices[j], point) <= 1e-15) return true;
    for (std::size_t i = 0; i < d; ++i) A(i, j) = vertices[j][i];
    A(d, j) = 1.0;
  }
  for (std::size_t i = 0; i < d; ++i) b[i] = point[i];
  b[d] = 1.0;
  std::vector<double> c(k, 0.0);
  return solve_standard_form(A, b, c, tol).status == LpStatus::kOptimal;
}

}  // namespace rmdp
