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
#include <string_view>
#include <vector>

#include "rmdp/tensor.hpp"

namespace rmdp {

/// Tolerance on row sums and nonnegativity of every stored distribution.
inline constexpr double kStochasticTol = 1e-12;

/// Throws InvalidInput unless `dist` is a probability vector within
/// kStochasticTol. `what` names the offending object in the message.
void check_distribution(std::span<const double> dist, std::string_view what);

/// A single transition kernel P[s][a][s'], each row a distribution over next
/// states.
class TransitionKernel {
 public:
  explicit TransitionKernel(Tensor3 probs);

  std::size_t num_states() const { return probs_.dim0(); }
  std::size_t num_actions() const { return probs_.dim1(); }

  double operator()(std::size_t s, std::size_t a, std::size_t next) const {
    return probs_(s, a, next);
  }
  std::span<const double> row(std::size_t s, std::size_t a) const { return probs_.row(s, a); }
  /// Transitions out of state s as a contiguous actions x states block.
  std::span<const double> block(std::size_t s) const { return probs_.slab(s); }
  const Tensor3& probs() const { return probs_; }

  bool operator==(const TransitionKernel&) const = default;

 private:
  Tensor3 probs_;
};

/// Stationary randomized policy: one distribution over actions per state.
class Policy {
 public:
  explicit Policy(Matrix action_probs);

  static Policy uniform(std::size_t num_states, std::size_t num_actions);
  static Policy deterministic(std::span<const std::size_t> actions, std::size_t num_actions);

  std::size_t num_states() const { return probs_.rows(); }
  std::size_t num_actions() const { return probs_.cols(); }
  double operator()(std::size_t s, std::size_t a) const { return probs_(s, a); }
  std::span<const double> row(std::size_t s) const { return probs_.row(s); }
  const Matrix& probs() const { return probs_; }

  bool is_deterministic(double tol = 1e-9) const;

  bool operator==(const Policy&) const = default;

 private:
  Matrix probs_;
};

/// The tuple (states, actions, rewards, discount, initial distribution).
/// Rewards are always indexed r[s][a][s'].
class MdpInstance {
 public:
  MdpInstance(Tensor3 rewards, double discount, std::vector<double> initial_dist);

  std::size_t num_states() const { return rewards_.dim0(); }
  std::size_t num_actions() const { return rewards_.dim1(); }
  double reward(std::size_t s, std::size_t a, std::size_t next) const {
    return rewards_(s, a, next);
  }
  const Tensor3& rewards() const { return rewards_; }
  double discount() const { return discount_; }
  std::span<const double> initial_dist() const { return initial_dist_; }

  MdpInstance with_initial_dist(std::vector<double> mu) const;

  double max_abs_reward() const;
  /// True when r[s][a][.] is constant in the next state for every (s, a).
  bool rewards_next_state_independent(double tol = kStochasticTol) const;

  bool operator==(const MdpInstance&) const = default;

 private:
  Tensor3 rewards_;
  double discount_;
  std::vector<double> initial_dist_;
};

enum class ValueKind { kExact, kFixedPointS, kFixedPointSa, kFixedPointOpt, kFiniteHorizon };

std::string_view to_string(ValueKind kind);

struct ValueVector {
  std::vector<double> values;
  ValueKind kind = ValueKind::kExact;
  /// Sup-norm residual of the equation that defines the vector.
  double residual = 0.0;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t s) const { return values[s]; }
};

/// Expected discounted return mu^T v.
double weighted_value(std::span<const double> mu, std::span<const double> v);

/// Throws InvalidInput unless all shapes agree.
void check_shapes(const MdpInstance& mdp, const Policy& policy);
void check_shapes(const MdpInstance& mdp, const TransitionKernel& kernel);

/// v^{pi,P}: solves (I - gamma P_pi) v = r_pi by dense LU.
ValueVector evaluate_exact(const MdpInstance& mdp, const Policy& policy,
                           const TransitionKernel& kernel);

/// out[s] = sum_a pi[s][a] * sum_s' P[s][a][s'] (r[s][a][s'] + gamma v[s']).
std::vector<double> apply_T_pi_P(const MdpInstance& mdp, const Policy& policy,
                                 const TransitionKernel& kernel, std::span<const double> v);

struct MdpSolution {
  Policy policy;
  ValueVector value;
};

/// Optimal deterministic policy of the nominal MDP with the given kernel,
/// by Howard policy iteration with exact evaluation.
MdpSolution solve_mdp_exact(const MdpInstance& mdp, const TransitionKernel& kernel);

}  // namespace rmdp
