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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rmdp/mdp.hpp"
#include "rmdp/param_set.hpp"
#include "rmdp/uncertainty.hpp"

namespace rmdp {

/// Tolerance of every oracle comparison; grid and refinement error dominate.
inline constexpr double kOracleTol = 1e-5;

struct OracleOptions {
  /// Ceiling on kernel grid points per worst-case search.
  std::size_t grid_budget = 10'000'000;
  /// Ceiling on policy grid points per max-min search.
  std::size_t policy_budget = 1'000'000;
  /// Target bracket width of the golden-section refinement.
  double refine_width = 1e-6;
  std::size_t max_passes = 50;
};

struct Comparison {
  std::string quantity;
  double fast = 0.0;
  double oracle = 0.0;
  double difference = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct OracleReport {
  /// Minimum for worst-case searches, max-min value for policy searches.
  double value = 0.0;
  /// Location of the worst case in parameter space.
  std::vector<double> argmin_params;
  /// Kernel index when the parameter set is finite.
  std::optional<std::size_t> argmin_vertex;
  /// Width of the final refinement bracket; zero for exact finite searches.
  double refinement_width = 0.0;
  /// Maximizing policy of a max-min search.
  std::optional<Policy> policy;
  std::vector<Comparison> comparisons;
  std::size_t evaluations = 0;
};

/// mu^T v^{pi,P} for many kernels with one policy. Reuses its buffers, so a
/// single evaluator must not be shared between threads.
class ReturnEvaluator {
 public:
  ReturnEvaluator(const MdpInstance& mdp, const Policy& policy);
  double operator()(const Tensor3& kernel);

 private:
  const MdpInstance* mdp_;
  const Policy* policy_;
  std::vector<double> system_;
  std::vector<double> rhs_;
};

/// Grid (ties to the lowest index) followed by cyclic golden-section
/// refinement of f over the parameter box. Finite sets are searched
/// exhaustively.
OracleReport minimize_over_params(const ParamSet& params,
                                  const std::function<double(const Tensor3&)>& f,
                                  const OracleOptions& options = {});

/// min over the parameter set of mu^T v^{pi,P}.
OracleReport worst_case_oracle(const MdpInstance& mdp, const ParamSet& params,
                               const Policy& policy, const OracleOptions& options = {});

/// States whose action choice can matter: some probe kernel or the reward
/// differs across actions.
std::vector<std::size_t> action_relevant_states(const MdpInstance& mdp, const ParamSet& params);

/// max over stationary policies of the worst-case return. Each relevant
/// state's action distribution ranges over the simplex lattice with
/// `policy_grid_resolution` points per edge; the best lattice policy (ties
/// to the lowest index) is refined by pattern search over mass transfers.
OracleReport max_min_oracle(const MdpInstance& mdp, const ParamSet& params,
                            std::size_t policy_grid_resolution,
                            const OracleOptions& options = {});

/// Policy lattice points per edge, given the number of free policy
/// coordinates, that keep a max-min search at desk
/// scale: 101 for one coordinate, 21 for two, 9 for three or four, else 3.
std::size_t default_policy_grid(std::size_t coordinates);

enum class TractabilityMode { kS, kSa };

/// Compares mu^T u^pi (kS) or mu^T u-hat^pi (kSa) against the worst-case
/// oracle, and checks that the fixed point is the value of some kernel of
/// the set.
OracleReport verify_tractability(const MdpInstance& mdp, const UncertaintySet& set,
                                 const ParamSet& params, const Policy& policy,
                                 TractabilityMode mode, const OracleOptions& options = {});

struct DualityReport {
  OracleReport maxmin;
  /// min over kernels of the optimal nominal return.
  double minmax = 0.0;
  std::vector<double> minmax_params;
  double gap = 0.0;
};

DualityReport duality_gap(const MdpInstance& mdp, const ParamSet& params,
                          std::size_t policy_grid_resolution, const OracleOptions& options = {});

/// Backward induction v_H = 0, v_t = T^pi(v_{t+1}); returns v_0.
ValueVector nonstationary_adversary_dp(const MdpInstance& mdp, const UncertaintySet& set,
                                       const Policy& policy, std::size_t horizon);

struct DominanceReport {
  std::vector<std::vector<double>> initial_dists;
  /// Max-min search at each initial distribution.
  std::vector<OracleReport> optimal;
  /// cross(i, j): worst case of the policy optimal for dist i, started from j.
  Matrix cross;
  /// Worst case of the candidate policy at each distribution, if given.
  std::vector<double> candidate_values;
  /// Some single policy (the candidate or one of the per-start optima) is
  /// optimal within kOracleTol for every distribution.
  bool common_optimal = false;
};

DominanceReport policy_dominance_check(const MdpInstance& mdp, const ParamSet& params,
                                       const std::vector<std::vector<double>>& initial_dists,
                                       std::size_t policy_grid_resolution,
                                       const Policy* candidate = nullptr,
                                       const OracleOptions& options = {});

}  // namespace rmdp
