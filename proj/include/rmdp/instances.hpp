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
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rmdp/mdp.hpp"
#include "rmdp/param_set.hpp"
#include "rmdp/uncertainty.hpp"

namespace rmdp {

struct ExpectedValue {
  std::string quantity;
  double value = 0.0;
  double tolerance = 0.0;
  std::string provenance;
};

/// An MDP with its uncertainty set and optional parametric description used
/// by the oracles. When `params` is absent the oracles use
/// ParamSet::from_set(set).
struct NamedInstance {
  std::string name;
  MdpInstance mdp;
  UncertaintySet set;
  std::optional<ParamSet> params;
  std::string provenance;
  std::vector<ExpectedValue> expected;

  ParamSet oracle_params() const { return params ? *params : ParamSet::from_set(set); }
};

/// Two states, one action; the five kernels (p, q) in {(0,0), (0,1), (1,0),
/// (1,1), (1/2,1/2)} with P_0 = (p, 1 - p), P_1 = (q, 1 - q).
NamedInstance load_finite_square();
/// The four corner kernels of the square alone.
UncertaintySet finite_square_corners();

/// Five states a..e, two actions, one parameter p coupling the transitions
/// out of a and b. The best stationary policy depends on the start state.
/// Throws VerificationError if the reward reconstruction disagrees with the
/// closed-form return.
NamedInstance load_start_dependent();
/// Closed-form return for a stationary policy with probability `beta` of the
/// first action in state b, at parameter p, for the instance above.
double start_dependent_return(double p, double beta, std::span<const double> mu, double gamma);

/// Six states a..f, two actions, parameters (xi, p). States a..d are chosen
/// per state; e and f share one factor driven by p.
NamedInstance load_six_state_partitioned();

/// Four states a..d, three actions; varying coefficients at a and a varying
/// shared factor used by a and d.
NamedInstance load_four_state_coeff_factor();

/// Factor model with next-state dependent rewards on which the sa-extension
/// value is strictly below the worst case over the set.
NamedInstance load_factor_gap();

std::vector<std::string> instance_names();
/// Throws InvalidInput for unknown names.
NamedInstance load_instance(const std::string& name);

struct GeneratorSpec {
  std::size_t num_states = 3;
  std::size_t num_actions = 2;
  SetVariant variant = SetVariant::kSaRectangular;
  /// Vertices per component (kernels for ExplicitFinite).
  std::size_t vertices = 2;
  std::size_t num_factors = 2;
  /// Rewards constant in the next state.
  bool next_state_independent = false;
  double gamma_low = 0.5;
  double gamma_high = 0.95;
};

/// Deterministic in `seed`.
NamedInstance random_instance(const GeneratorSpec& spec, std::uint64_t seed);

/// Random stationary policy, rows uniform on the simplex.
Policy random_policy(std::size_t num_states, std::size_t num_actions, std::uint64_t seed);

struct GapSearchResult {
  NamedInstance instance;
  Policy policy;
  double sa_value = 0.0;
  double oracle_value = 0.0;
  std::uint64_t seed = 0;
  std::size_t attempts = 0;
};

/// Seeded search over small factor models with next-state dependent rewards
/// for oracle min - mu^T u-hat^pi > threshold. Returns the first hit.
std::optional<GapSearchResult> search_factor_gap(std::uint64_t seed, std::size_t max_attempts,
                                                 double threshold = 1e-4);

}  // namespace rmdp
