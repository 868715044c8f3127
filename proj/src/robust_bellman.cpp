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

#include "rmdp/robust_bellman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rmdp/error.hpp"
#include "rmdp/lp.hpp"

namespace rmdp {

namespace {

double row_guarantee(const Matrix& payoff, std::size_t i) {
  auto r = payoff.row(i);
  return *std::min_element(r.begin(), r.end());
}

double mixed_guarantee(const Matrix& payoff, std::span<const double> x) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < payoff.cols(); ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < payoff.rows(); ++i) acc += x[i] * payoff(i, j);
    best = std::min(best, acc);
  }
  return best;
}

std::vector<double> pure(std::size_t m, std::size_t i) {
  std::vector<double> x(m, 0.0);
  x[i] = 1.0;
  return x;
}

}  // namespace

GameSolution solve_matrix_game(const MatrixGame& game) {
  const Matrix& G = game.payoff;
  const std::size_t m = G.rows();
  const std::size_t n = G.cols();
  if (m == 0 || n == 0) throw InvalidInput("matrix game must be nonempty");
  double lo = std::numeric_limits<double>::infinity();
  for (double g : G.flat()) {
    if (!std::isfinite(g)) throw InvalidInput("matrix game payoff must be finite");
    lo = std::min(lo, g);
  }

  std::size_t best_row = 0;
  for (std::size_t i = 1; i < m; ++i) {
    if (row_guarantee(G, i) > row_guarantee(G, best_row)) best_row = i;
  }
  if (m == 1 || n == 1) return {pure(m, best_row), row_guarantee(G, best_row)};

  // With B = G + K > 0 the game value is 1 / min { sum x : B^T x >= 1, x >= 0 }
  // and the optimal strategy is x normalized. Standard form adds one
  // surplus per column.
  const double shift = 1.0 - lo;
  Matrix A(n, m + n);
  std::vector<double> b(n, 1.0);
  std::vector<double> c(m + n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) A(j, i) = G(i, j) + shift;
    A(j, m + j) = -1.0;
  }
  for (std::size_t i = 0; i < m; ++i) c[i] = 1.0;
  const LpResult lp = solve_standard_form(A, b, c);
  if (lp.status != LpStatus::kOptimal) throw NumericalError("matrix game LP did not solve");
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) total += std::max(0.0, lp.x[i]);
  if (!(total > 0.0)) throw NumericalError("matrix game LP returned a zero strategy");
  std::vector<double> x(m);
  for (std::size_t i = 0; i < m; ++i) x[i] = std::max(0.0, lp.x[i]) / total;
  const double value = mixed_guarantee(G, x);

  const double pure_value = row_guarantee(G, best_row);
  if (pure_value >= value - 1e-12 * (1.0 + std::abs(value))) return {pure(m, best_row), pure_value};
  return {std::move(x), value};
}

namespace {

void check_inputs(const MdpInstance& mdp, const UncertaintySet& set, std::span<const double> v) {
  if (set.num_states() != mdp.num_states() || set.num_actions() != mdp.num_actions()) {
    throw InvalidInput("uncertainty set shape does not match the MDP");
  }
  if (v.size() != mdp.num_states()) throw InvalidInput("value vector length differs from S");
}

}  // namespace

std::vector<double> apply_T_pi(const MdpInstance& mdp, const UncertaintySet& set,
                               const Policy& policy, std::span<const double> v) {
  check_shapes(mdp, policy);
  check_inputs(mdp, set, v);
  const std::size_t S = mdp.num_states();
  const std::size_t A = mdp.num_actions();
  const double gamma = mdp.discount();
  std::vector<double> out(S);
  Matrix M(A, S);
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) {
      const double pi = policy(s, a);
      for (std::size_t t = 0; t < S; ++t) M(a, t) = pi * (mdp.reward(s, a, t) + gamma * v[t]);
    }
    out[s] = min_value_s(set, s, M);
  }
  return out;
}

std::vector<double> apply_T_hat_pi(const MdpInstance& mdp, const UncertaintySet& set,
                                   const Policy& policy, std::span<const double> v) {
  check_shapes(mdp, policy);
  check_inputs(mdp, set, v);
  const std::size_t S = mdp.num_states();
  const std::size_t A = mdp.num_actions();
  const double gamma = mdp.discount();
  std::vector<double> out(S, 0.0);
  std::vector<double> w(S);
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) {
      const double pi = policy(s, a);
      if (pi == 0.0) continue;
      for (std::size_t t = 0; t < S; ++t) w[t] = mdp.reward(s, a, t) + gamma * v[t];
      out[s] += pi * min_value_sa(set, s, a, w);
    }
  }
  return out;
}

std::vector<std::vector<Matrix>> state_marginals(const UncertaintySet& set) {
  std::vector<std::vector<Matrix>> out;
  for (std::size_t s = 0; s < set.num_states(); ++s) out.push_back(marginal_s(set, s));
  return out;
}

OptimalStep apply_T_opt(const MdpInstance& mdp, const std::vector<std::vector<Matrix>>& marginals,
                        std::span<const double> v) {
  const std::size_t S = mdp.num_states();
  const std::size_t A = mdp.num_actions();
  if (marginals.size() != S) throw InvalidInput("one marginal list per state required");
  if (v.size() != S) throw InvalidInput("value vector length differs from S");
  const double gamma = mdp.discount();
  std::vector<double> values(S);
  Matrix strategies(S, A);
  for (std::size_t s = 0; s < S; ++s) {
    const auto& blocks = marginals[s];
    MatrixGame game{Matrix(A, blocks.size())};
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      for (std::size_t a = 0; a < A; ++a) {
        double q = 0.0;
        for (std::size_t t = 0; t < S; ++t) q += blocks[k](a, t) * (mdp.reward(s, a, t) + gamma * v[t]);
        game.payoff(a, k) = q;
      }
    }
    GameSolution sol = solve_matrix_game(game);
    values[s] = sol.value;
    std::copy(sol.strategy.begin(), sol.strategy.end(), strategies.row(s).begin());
  }
  return {std::move(values), Policy(std::move(strategies))};
}

OptimalStep apply_T_opt(const MdpInstance& mdp, const UncertaintySet& set,
                        std::span<const double> v) {
  check_inputs(mdp, set, v);
  return apply_T_opt(mdp, state_marginals(set), v);
}

FixedPointReport fixed_point(RobustOperator op, const MdpInstance& mdp, const UncertaintySet& set,
                             const Policy* policy, const FixedPointOptions& options) {
  if (!(options.tol > 0.0)) throw InvalidInput("fixed point tolerance must be positive");
  if (op != RobustOperator::kOptimal && policy == nullptr) {
    throw InvalidInput("policy operators need a policy");
  }
  std::vector<double> zero(mdp.num_states(), 0.0);
  check_inputs(mdp, set, zero);

  std::vector<std::vector<Matrix>> marginals;
  if (op == RobustOperator::kOptimal) marginals = state_marginals(set);
  auto step = [&](std::span<const double> v) {
    switch (op) {
      case RobustOperator::kPolicyS: return apply_T_pi(mdp, set, *policy, v);
      case RobustOperator::kPolicySa: return apply_T_hat_pi(mdp, set, *policy, v);
      case RobustOperator::kOptimal: break;
    }
    return apply_T_opt(mdp, marginals, v).values;
  };

  const double gamma = mdp.discount();
  FixedPointReport report;
  report.tolerance_target = gamma > 0.0 ? options.tol * (1.0 - gamma) / (2.0 * gamma) : options.tol;
  std::vector<double> v = zero;
  for (std::size_t it = 1; it <= options.max_iter; ++it) {
    std::vector<double> next = step(v);
    const double diff = sup_norm_diff(next, v);
    v = std::move(next);
    if (gamma == 0.0 || diff <= report.tolerance_target) {
      report.iterations = it;
      report.final_residual = gamma == 0.0 ? 0.0 : diff;
      report.value.values = std::move(v);
      report.value.residual = report.final_residual;
      report.value.kind = op == RobustOperator::kPolicyS    ? ValueKind::kFixedPointS
                          : op == RobustOperator::kPolicySa ? ValueKind::kFixedPointSa
                                                            : ValueKind::kFixedPointOpt;
      return report;
    }
  }
  throw ConvergenceError("value iteration did not converge within " +
                         std::to_string(options.max_iter) + " iterations");
}

Policy extract_greedy_policy(const MdpInstance& mdp, const UncertaintySet& set,
                             std::span<const double> u_star, double tol) {
  OptimalStep step = apply_T_opt(mdp, set, u_star);
  const auto check = apply_T_pi(mdp, set, step.policy, u_star);
  const double gap = sup_norm_diff(check, u_star);
  if (gap > 10.0 * tol) {
    throw VerificationError("greedy policy misses the fixed point by " + std::to_string(gap));
  }
  return std::move(step.policy);
}

bool check_subfixed_dominated(const MdpInstance& mdp, const UncertaintySet& set,
                              const Policy& policy, std::span<const double> v, double tol) {
  const auto Tv = apply_T_pi(mdp, set, policy, v);
  for (std::size_t s = 0; s < v.size(); ++s) {
    if (v[s] > Tv[s] + 1e-12) return false;
  }
  FixedPointOptions opts;
  opts.tol = tol;
  const auto u = fixed_point(RobustOperator::kPolicyS, mdp, set, &policy, opts);
  for (std::size_t s = 0; s < v.size(); ++s) {
    if (v[s] > u.value[s] + 10.0 * tol) {
      throw VerificationError("sub-fixed vector exceeds the fixed point at state " +
                              std::to_string(s));
    }
  }
  return true;
}

}  // namespace rmdp
