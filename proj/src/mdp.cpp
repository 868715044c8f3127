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

#include "rmdp/mdp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "rmdp/error.hpp"

namespace rmdp {

void check_distribution(std::span<const double> dist, std::string_view what) {
  double sum = 0.0;
  for (double p : dist) {
    if (!std::isfinite(p) || p < -kStochasticTol) {
      std::ostringstream msg;
      msg << what << ": entry " << p << " is not a probability";
      throw InvalidInput(msg.str());
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kStochasticTol) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << ": entries sum to " << sum << ", not 1";
    throw InvalidInput(msg.str());
  }
}

TransitionKernel::TransitionKernel(Tensor3 probs) : probs_(std::move(probs)) {
  if (probs_.dim0() == 0 || probs_.dim1() == 0 || probs_.dim2() != probs_.dim0()) {
    throw InvalidInput("transition kernel must have shape S x A x S with S, A > 0");
  }
  for (std::size_t s = 0; s < num_states(); ++s) {
    for (std::size_t a = 0; a < num_actions(); ++a) {
      check_distribution(probs_.row(s, a), "transition row (" + std::to_string(s) + ", " +
                                               std::to_string(a) + ")");
    }
  }
}

Policy::Policy(Matrix action_probs) : probs_(std::move(action_probs)) {
  if (probs_.rows() == 0 || probs_.cols() == 0) {
    throw InvalidInput("policy must have at least one state and one action");
  }
  for (std::size_t s = 0; s < probs_.rows(); ++s) {
    check_distribution(probs_.row(s), "policy row " + std::to_string(s));
  }
}

Policy Policy::uniform(std::size_t num_states, std::size_t num_actions) {
  return Policy(Matrix(num_states, num_actions, 1.0 / static_cast<double>(num_actions)));
}

Policy Policy::deterministic(std::span<const std::size_t> actions, std::size_t num_actions) {
  Matrix m(actions.size(), num_actions);
  for (std::size_t s = 0; s < actions.size(); ++s) {
    if (actions[s] >= num_actions) throw InvalidInput("action index out of range");
    m(s, actions[s]) = 1.0;
  }
  return Policy(std::move(m));
}

bool Policy::is_deterministic(double tol) const {
  for (std::size_t s = 0; s < num_states(); ++s) {
    auto r = row(s);
    if (*std::max_element(r.begin(), r.end()) < 1.0 - tol) return false;
  }
  return true;
}

MdpInstance::MdpInstance(Tensor3 rewards, double discount, std::vector<double> initial_dist)
    : rewards_(std::move(rewards)), discount_(discount), initial_dist_(std::move(initial_dist)) {
  if (rewards_.dim0() == 0 || rewards_.dim1() == 0 || rewards_.dim2() != rewards_.dim0()) {
    throw InvalidInput("rewards must have shape S x A x S with S, A > 0");
  }
  if (!(discount_ >= 0.0 && discount_ < 1.0)) {
    throw InvalidInput("discount must lie in [0, 1)");
  }
  for (double r : rewards_.flat()) {
    if (!std::isfinite(r)) throw InvalidInput("rewards must be finite");
  }
  if (initial_dist_.size() != rewards_.dim0()) {
    throw InvalidInput("initial distribution length differs from the number of states");
  }
  check_distribution(initial_dist_, "initial distribution");
}

MdpInstance MdpInstance::with_initial_dist(std::vector<double> mu) const {
  return MdpInstance(rewards_, discount_, std::move(mu));
}

double MdpInstance::max_abs_reward() const {
  double m = 0.0;
  for (double r : rewards_.flat()) m = std::max(m, std::abs(r));
  return m;
}

bool MdpInstance::rewards_next_state_independent(double tol) const {
  for (std::size_t s = 0; s < num_states(); ++s) {
    for (std::size_t a = 0; a < num_actions(); ++a) {
      auto r = rewards_.row(s, a);
      for (double x : r) {
        if (std::abs(x - r[0]) > tol) return false;
      }
    }
  }
  return true;
}

std::string_view to_string(ValueKind kind) {
  switch (kind) {
    case ValueKind::kExact: return "exact";
    case ValueKind::kFixedPointS: return "fixed_point_s";
    case ValueKind::kFixedPointSa: return "fixed_point_sa";
    case ValueKind::kFixedPointOpt: return "fixed_point_opt";
    case ValueKind::kFiniteHorizon: return "finite_horizon";
  }
  return "unknown";
}

double weighted_value(std::span<const double> mu, std::span<const double> v) {
  if (mu.size() != v.size()) throw InvalidInput("initial distribution and value differ in length");
  return dot(mu, v);
}

void check_shapes(const MdpInstance& mdp, const Policy& policy) {
  if (policy.num_states() != mdp.num_states() || policy.num_actions() != mdp.num_actions()) {
    throw InvalidInput("policy shape does not match the MDP");
  }
}

void check_shapes(const MdpInstance& mdp, const TransitionKernel& kernel) {
  if (kernel.num_states() != mdp.num_states() || kernel.num_actions() != mdp.num_actions()) {
    throw InvalidInput("kernel shape does not match the MDP");
  }
}

namespace {

void check_value_length(const MdpInstance& mdp, std::span<const double> v) {
  if (v.size() != mdp.num_states()) throw InvalidInput("value vector length differs from S");
}

}  // namespace

std::vector<double> apply_T_pi_P(const MdpInstance& mdp, const Policy& policy,
                                 const TransitionKernel& kernel, std::span<const double> v) {
  check_shapes(mdp, policy);
  check_shapes(mdp, kernel);
  check_value_length(mdp, v);
  const std::size_t S = mdp.num_states();
  const std::size_t A = mdp.num_actions();
  const double gamma = mdp.discount();
  std::vector<double> out(S, 0.0);
  for (std::size_t s = 0; s < S; ++s) {
    double acc = 0.0;
    for (std::size_t a = 0; a < A; ++a) {
      const double pi = policy(s, a);
      if (pi == 0.0) continue;
      double q = 0.0;
      for (std::size_t t = 0; t < S; ++t) {
        q += kernel(s, a, t) * (mdp.reward(s, a, t) + gamma * v[t]);
      }
      acc += pi * q;
    }
    out[s] = acc;
  }
  return out;
}

ValueVector evaluate_exact(const MdpInstance& mdp, const Policy& policy,
                           const TransitionKernel& kernel) {
  check_shapes(mdp, policy);
  check_shapes(mdp, kernel);
  const auto S = static_cast<Eigen::Index>(mdp.num_states());
  const std::size_t A = mdp.num_actions();
  const double gamma = mdp.discount();

  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(S, S);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(S);
  for (Eigen::Index s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) {
      const double pi = policy(s, a);
      if (pi == 0.0) continue;
      for (Eigen::Index t = 0; t < S; ++t) {
        const double p = pi * kernel(s, a, t);
        system(s, t) -= gamma * p;
        rhs(s) += p * mdp.reward(s, a, t);
      }
    }
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  Eigen::VectorXd sol = lu.solve(rhs);
  if (!sol.allFinite()) throw NumericalError("policy evaluation system is singular");

  ValueVector out;
  out.values.assign(sol.data(), sol.data() + S);
  out.kind = ValueKind::kExact;
  out.residual = sup_norm_diff(out.values, apply_T_pi_P(mdp, policy, kernel, out.values));
  return out;
}

MdpSolution solve_mdp_exact(const MdpInstance& mdp, const TransitionKernel& kernel) {
  check_shapes(mdp, kernel);
  const std::size_t S = mdp.num_states();
  const std::size_t A = mdp.num_actions();
  const double gamma = mdp.discount();

  auto q_value = [&](std::span<const double> v, std::size_t s, std::size_t a) {
    double q = 0.0;
    for (std::size_t t = 0; t < S; ++t) q += kernel(s, a, t) * (mdp.reward(s, a, t) + gamma * v[t]);
    return q;
  };

  // Start from the myopic policy.
  std::vector<double> zero(S, 0.0);
  std::vector<std::size_t> actions(S, 0);
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 1; a < A; ++a) {
      if (q_value(zero, s, a) > q_value(zero, s, actions[s])) actions[s] = a;
    }
  }

  // Howard iteration terminates in at most A^S steps; the cap only guards
  // against floating point ping-pong on exact ties.
  constexpr int kMaxIterations = 10000;
  for (int it = 0; it < kMaxIterations; ++it) {
    Policy policy = Policy::deterministic(actions, A);
    ValueVector value = evaluate_exact(mdp, policy, kernel);
    bool changed = false;
    double residual = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      const double current = q_value(value.values, s, actions[s]);
      std::size_t best = actions[s];
      double best_q = current;
      for (std::size_t a = 0; a < A; ++a) {
        const double q = q_value(value.values, s, a);
        if (q > best_q) {
          best_q = q;
          best = a;
        }
      }
      residual = std::max(residual, std::abs(best_q - value.values[s]));
      if (best != actions[s] && best_q > current + 1e-12 * (1.0 + std::abs(current))) {
        actions[s] = best;
        changed = true;
      }
    }
    if (!changed) {
      value.residual = residual;
      return {std::move(policy), std::move(value)};
    }
  }
  throw ConvergenceError("policy iteration did not terminate");
}

}  // namespace rmdp
