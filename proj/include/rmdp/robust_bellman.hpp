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

#include <cstddef>
#include <span>
#include <vector>

#include "rmdp/mdp.hpp"
#include "rmdp/tensor.hpp"
#include "rmdp/uncertainty.hpp"

namespace rmdp {

/// Zero-sum game; the row player maximizes.
struct MatrixGame {
  Matrix payoff;
};

struct GameSolution {
  std::vector<double> strategy;
  double value = 0.0;
};

/// Optimal row strategy and game value by linear programming. A pure row
/// that attains the value is preferred (lowest index first); otherwise the
/// simplex basic solution is returned.
GameSolution solve_matrix_game(const MatrixGame& game);

/// out[s] = min over the set of sum_a pi[s][a] P_sa . (r_sa + gamma v).
std::vector<double> apply_T_pi(const MdpInstance& mdp, const UncertaintySet& set,
                               const Policy& policy, std::span<const double> v);

/// out[s] = sum_a pi[s][a] min over the set of P_sa . (r_sa + gamma v).
std::vector<double> apply_T_hat_pi(const MdpInstance& mdp, const UncertaintySet& set,
                                   const Policy& policy, std::span<const double> v);

struct OptimalStep {
  std::vector<double> values;
  Policy policy;
};

/// Per-state matrix game over actions and the vertices of the state marginal.
OptimalStep apply_T_opt(const MdpInstance& mdp, const UncertaintySet& set,
                        std::span<const double> v);
/// Same, with precomputed state marginals (one list per state).
OptimalStep apply_T_opt(const MdpInstance& mdp, const std::vector<std::vector<Matrix>>& marginals,
                        std::span<const double> v);

std::vector<std::vector<Matrix>> state_marginals(const UncertaintySet& set);

enum class RobustOperator { kPolicyS, kPolicySa, kOptimal };

struct FixedPointOptions {
  double tol = 1e-8;
  std::size_t max_iter = 1'000'000;
};

struct FixedPointReport {
  ValueVector value;
  std::size_t iterations = 0;
  /// Sup-norm change in the last iteration.
  double final_residual = 0.0;
  /// tol (1 - gamma) / (2 gamma), or tol itself when gamma = 0.
  double tolerance_target = 0.0;
};

/// Value iteration from zero. `policy` is required unless `op` is kOptimal.
FixedPointReport fixed_point(RobustOperator op, const MdpInstance& mdp, const UncertaintySet& set,
                             const Policy* policy, const FixedPointOptions& options = {});

/// Greedy policy of T_opt at u_star. Throws VerificationError unless
/// ||T^pi(u_star) - u_star|| <= 10 tol.
Policy extract_greedy_policy(const MdpInstance& mdp, const UncertaintySet& set,
                             std::span<const double> u_star, double tol = 1e-8);

/// Returns false when v is not sub-fixed for T^pi. Otherwise checks
/// v <= u^pi within 10 tol, throwing VerificationError on violation, and
/// returns true.
bool check_subfixed_dominated(const MdpInstance& mdp, const UncertaintySet& set,
                              const Policy& policy, std::span<const double> v, double tol = 1e-8);

}  // namespace rmdp
