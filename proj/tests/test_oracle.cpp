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

#include <cmath>
#include <random>

#include "rmdp/error.hpp"
#include "rmdp/instances.hpp"
#include "rmdp/oracle.hpp"
#include "rmdp/robust_bellman.hpp"
#include "test_support.hpp"

using namespace rmdp;
using namespace rmdp::testing;

namespace {

Policy beta_policy(double beta) {
  Matrix m(5, 2);
  for (std::size_t s = 0; s < 5; ++s) m(s, 0) = 1.0;
  m(1, 0) = beta;
  m(1, 1) = 1.0 - beta;
  return Policy(std::move(m));
}

}  // namespace

TEST_CASE("return evaluator matches successive approximation") {
  std::mt19937_64 rng(1);
  const MdpInstance mdp(random_rewards(4, 3, rng), 0.7, random_simplex(4, rng));
  const Policy pi = random_policy_matrix(4, 3, rng);
  ReturnEvaluator eval(mdp, pi);
  for (int t = 0; t < 5; ++t) {
    const Tensor3 P = random_kernel(4, 3, rng);
    CHECK(eval(P) == doctest::Approx(mu_dot(mdp, iterate_value(mdp, pi, P))).epsilon(1e-12));
  }
}

TEST_CASE("finite sets are searched exactly") {
  const auto inst = load_start_dependent();
  const ParamSet finite = ParamSet::from_set(inst.set);
  CHECK(finite.kind() == ParamSet::Kind::kFinite);
  const Policy pi = beta_policy(0.0);
  const OracleReport r = worst_case_oracle(inst.mdp, finite, pi);
  double brute = 1e300;
  for (const auto& k : enumerate_vertices(inst.set)) brute = std::min(brute, mu_dot(inst.mdp, iterate_value(inst.mdp, pi, k.probs())));
  CHECK(r.value == doctest::Approx(brute).epsilon(1e-12));
  CHECK(r.refinement_width == 0.0);
  REQUIRE(r.argmin_vertex.has_value());
}

TEST_CASE("worst case over the parameter interval matches the closed form") {
  const auto inst = load_start_dependent();
  const ParamSet params = *inst.params;
  for (double beta : {0.0, 0.25, 0.5, 1.0}) {
    // Minimize the closed form on a fine grid.
    double closed = 1e300;
    for (int k = 0; k <= 200000; ++k) {
      closed = std::min(closed, start_dependent_return(k / 200000.0, beta, inst.mdp.initial_dist(), 0.25));
    }
    const OracleReport r = worst_case_oracle(inst.mdp, params, beta_policy(beta));
    CHECK(r.value == doctest::Approx(closed).epsilon(1e-8));
    CHECK(r.refinement_width <= 1e-6);
  }
}

TEST_CASE("golden-section refinement finds interior minima") {
  ParamSet box = ParamSet::affine({{"x", 0.0, 1.0}}, [] {
    Tensor3 base(2, 1, 2);
    base(0, 0, 0) = 1.0;
    base(1, 0, 1) = 1.0;
    return base;
  }(), {[] {
    Tensor3 d(2, 1, 2);
    d(0, 0, 0) = -1.0;
    d(0, 0, 1) = 1.0;
    return d;
  }()});
  box.set_grid_resolution(11);
  const double target = 0.3141592653;
  const OracleReport r = minimize_over_params(box, [&](const Tensor3& P) {
    const double x = P(0, 0, 1);
    return (x - target) * (x - target);
  });
  CHECK(r.argmin_params[0] == doctest::Approx(target).epsilon(1e-6));
}

TEST_CASE("max-min search at the two start states") {
  auto inst = load_start_dependent();
  const ParamSet params = *inst.params;
  const OracleReport at_a = max_min_oracle(inst.mdp, params, 101);
  CHECK(at_a.value == doctest::Approx(7.0 / 96.0).epsilon(1e-6));
  CHECK((*at_a.policy)(1, 0) == doctest::Approx(0.0).epsilon(1e-3));
  CHECK(at_a.argmin_params[0] == doctest::Approx(0.75).epsilon(1e-3));
  const MdpInstance from_b = inst.mdp.with_initial_dist(unit(5, 1));
  const OracleReport at_b = max_min_oracle(from_b, params, 101);
  CHECK(std::abs(at_b.value) < 1e-6);
  CHECK((*at_b.policy)(1, 0) == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("only states where actions differ are searched") {
  const auto inst = load_start_dependent();
  const auto states = action_relevant_states(inst.mdp, *inst.params);
  REQUIRE(states.size() == 1);
  CHECK(states[0] == 1);
  CHECK(default_policy_grid(1) == 101);
  CHECK(default_policy_grid(4) == 9);
}

TEST_CASE("tractability on an sa-rectangular set") {
  GeneratorSpec spec;
  spec.variant = SetVariant::kSaRectangular;
  const auto inst = random_instance(spec, 2);
  const Policy pi = Policy::uniform(3, 2);
  ParamSet params = inst.oracle_params();
  params.set_grid_resolution(6);
  const OracleReport r = verify_tractability(inst.mdp, inst.set, params, pi, TractabilityMode::kSa);
  REQUIRE(r.comparisons.size() == 2);
  for (const auto& c : r.comparisons) CHECK(c.pass);
}

TEST_CASE("duality holds on a singleton") {
  std::mt19937_64 rng(6);
  const TransitionKernel P(random_kernel(2, 2, rng));
  const MdpInstance mdp(random_rewards(2, 2, rng), 0.5, {0.5, 0.5});
  const auto set = UncertaintySet::singleton(P);
  const DualityReport d = duality_gap(mdp, ParamSet::from_set(set), 21);
  CHECK(std::abs(d.gap) < 1e-6);
}

TEST_CASE("finite-horizon adversary") {
  GeneratorSpec spec;
  spec.variant = SetVariant::kSRectangular;
  const auto inst = random_instance(spec, 8);
  const Policy pi = Policy::uniform(3, 2);
  const ValueVector one = nonstationary_adversary_dp(inst.mdp, inst.set, pi, 1);
  CHECK(one.kind == ValueKind::kFiniteHorizon);
  const std::vector<double> zero(3, 0.0);
  CHECK(sup_norm_diff(one.values, min_step_over(inst.mdp, pi, enumerate_vertices(inst.set), zero)) < 1e-14);
  CHECK_THROWS_AS(nonstationary_adversary_dp(inst.mdp, inst.set, pi, 0), InvalidInput);
}

TEST_CASE("no single stationary policy is optimal from both start states") {
  const auto inst = load_start_dependent();
  const DominanceReport d =
      policy_dominance_check(inst.mdp, *inst.params, {unit(5, 0), unit(5, 1)}, 101);
  CHECK_FALSE(d.common_optimal);
  CHECK(d.cross(0, 1) < d.optimal[1].value - 1e-3);
  CHECK(d.cross(1, 0) < d.optimal[0].value - 1e-3);
}

TEST_CASE("budgets") {
  const auto inst = load_six_state_partitioned();
  OracleOptions tight;
  tight.grid_budget = 10;
  CHECK_THROWS_AS(worst_case_oracle(inst.mdp, *inst.params, Policy::uniform(6, 2), tight), BudgetExceeded);
}
