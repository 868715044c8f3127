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

// Independent reference computations for the tests. Nothing here calls the
// library's evaluators or operators.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "rmdp/mdp.hpp"
#include "rmdp/uncertainty.hpp"

namespace rmdp::testing {

// Expected one-step return of (s, a) under kernel rows P and values v.
inline double q_value(const MdpInstance& mdp, std::span<const double> p, std::size_t s, std::size_t a,
                      std::span<const double> v) {
  double acc = 0.0;
  for (std::size_t t = 0; t < p.size(); ++t) acc += p[t] * (mdp.reward(s, a, t) + mdp.discount() * v[t]);
  return acc;
}

inline std::vector<double> bellman_step(const MdpInstance& mdp, const Policy& pi, const Tensor3& P,
                                        std::span<const double> v) {
  std::vector<double> out(mdp.num_states(), 0.0);
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    for (std::size_t a = 0; a < mdp.num_actions(); ++a) out[s] += pi(s, a) * q_value(mdp, P.row(s, a), s, a, v);
  }
  return out;
}

// Successive approximation to machine precision.
inline std::vector<double> iterate_value(const MdpInstance& mdp, const Policy& pi, const Tensor3& P) {
  std::vector<double> v(mdp.num_states(), 0.0);
  for (int it = 0; it < 100000; ++it) {
    auto next = bellman_step(mdp, pi, P, v);
    double diff = 0.0;
    for (std::size_t s = 0; s < v.size(); ++s) diff = std::max(diff, std::abs(next[s] - v[s]));
    v = std::move(next);
    if (diff < 1e-15) break;
  }
  return v;
}

inline double mu_dot(const MdpInstance& mdp, std::span<const double> v) {
  double acc = 0.0;
  for (std::size_t s = 0; s < v.size(); ++s) acc += mdp.initial_dist()[s] * v[s];
  return acc;
}

// Componentwise min over listed kernels of one Bellman step.
inline std::vector<double> min_step_over(const MdpInstance& mdp, const Policy& pi,
                                         const std::vector<TransitionKernel>& kernels,
                                         std::span<const double> v) {
  std::vector<double> out(mdp.num_states(), std::numeric_limits<double>::infinity());
  for (const auto& k : kernels) {
    const auto step = bellman_step(mdp, pi, k.probs(), v);
    for (std::size_t s = 0; s < out.size(); ++s) out[s] = std::min(out[s], step[s]);
  }
  return out;
}

inline std::vector<double> unit(std::size_t n, std::size_t i) {
  std::vector<double> e(n, 0.0);
  e[i] = 1.0;
  return e;
}

inline std::vector<double> random_simplex(std::size_t n, std::mt19937_64& rng) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> x(n);
  double sum = 0.0;
  for (auto& xi : x) sum += (xi = ex(rng));
  for (auto& xi : x) xi /= sum;
  return x;
}

inline Tensor3 random_kernel(std::size_t S, std::size_t A, std::mt19937_64& rng) {
  Tensor3 P(S, A, S);
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) {
      const auto row = random_simplex(S, rng);
      std::copy(row.begin(), row.end(), P.row(s, a).begin());
    }
  }
  return P;
}

inline Tensor3 random_rewards(std::size_t S, std::size_t A, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Tensor3 r(S, A, S);
  for (auto& x : r.flat()) x = u(rng);
  return r;
}

inline Policy random_policy_matrix(std::size_t S, std::size_t A, std::mt19937_64& rng) {
  Matrix m(S, A);
  for (std::size_t s = 0; s < S; ++s) {
    const auto row = random_simplex(A, rng);
    std::copy(row.begin(), row.end(), m.row(s).begin());
  }
  return Policy(std::move(m));
}

}  // namespace rmdp::testing
