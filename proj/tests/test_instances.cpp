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

#include <random>

#include "rmdp/error.hpp"
#include "rmdp/instances.hpp"
#include "rmdp/json_io.hpp"
#include "rmdp/robust_bellman.hpp"
#include "rmdp/oracle.hpp"
#include "test_support.hpp"

using namespace rmdp;
using namespace rmdp::testing;

namespace {

const SetVariant kAllVariants[] = {SetVariant::kExplicitFinite, SetVariant::kSRectangular,
                                   SetVariant::kSaRectangular,  SetVariant::kFactorModel,
                                   SetVariant::kPartitioned,    SetVariant::kCoeffFactor,
                                   SetVariant::kSaCoeffFactor};

const char* kTinyParametric = R"({
  "name": "tiny",
  "num_states": 2,
  "num_actions": 1,
  "gamma": 0.5,
  "mu": [1, 0],
  "rewards": [[[1, 0]], [[0, 0]]],
  "uncertainty": {
    "variant": "parametric",
    "parameters": [{"name": "p", "low": 0, "high": 1}],
    "kernel_template": [[["p", "1 - p"]], [[0, 1]]]
  },
  "expected": [{"quantity": "worst_case[1/1]", "value": 0, "tolerance": 1e-9, "provenance": "p = 0"}]
})";

}  // namespace

TEST_CASE("built-in instances load") {
  for (const auto& name : instance_names()) {
    CAPTURE(name);
    const NamedInstance inst = load_instance(name);
    CHECK(inst.name == name);
    CHECK_FALSE(inst.expected.empty());
    CHECK_FALSE(inst.provenance.empty());
  }
  CHECK_THROWS_AS(load_instance("missing"), InvalidInput);
}

TEST_CASE("finite square") {
  const auto inst = load_finite_square();
  CHECK(inst.set.vertex_count() == 5);
  CHECK(finite_square_corners().vertex_count() == 4);
}

TEST_CASE("start-dependent closed form against direct evaluation") {
  const auto inst = load_start_dependent();
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 10; ++t) {
    const double p = u(rng);
    const double beta = u(rng);
    const auto mu = random_simplex(5, rng);
    Matrix m(5, 2);
    for (std::size_t s = 0; s < 5; ++s) m(s, 0) = 1.0;
    m(1, 0) = beta;
    m(1, 1) = 1 - beta;
    const double p_arr[] = {p};
    const auto P = inst.params->kernel_at(p_arr);
    const auto v = iterate_value(inst.mdp, Policy(m), P.probs());
    double ret = 0.0;
    for (std::size_t s = 0; s < 5; ++s) ret += mu[s] * v[s];
    CHECK(ret == doctest::Approx(start_dependent_return(p, beta, mu, 0.25)).epsilon(1e-12));
  }
}

TEST_CASE("structured instances") {
  const auto six = load_six_state_partitioned();
  CHECK(six.set.variant() == SetVariant::kPartitioned);
  CHECK(six.params->num_parameters() == 2);
  const auto four = load_four_state_coeff_factor();
  CHECK(four.set.variant() == SetVariant::kCoeffFactor);
  const auto& cf = std::get<CoeffFactor>(four.set.model());
  CHECK(cf.factor_sets[0].size() == 1);
  CHECK(cf.factor_sets[1].size() == 1);
  // Every corner of the parameter box lies in the hull of the set.
  for (const auto& k : four.params->probe_kernels()) CHECK(hull_contains(four.set, k));
  for (const auto& k : six.params->probe_kernels()) CHECK(hull_contains(six.set, k));
}

TEST_CASE("gap fixture matches a fresh search") {
  const auto fixture = load_factor_gap();
  const auto found = search_factor_gap(1, 1);
  REQUIRE(found.has_value());
  CHECK(instance_to_json(found->instance)["rewards"] == instance_to_json(fixture)["rewards"]);
  CHECK(instance_to_json(found->instance)["uncertainty"] == instance_to_json(fixture)["uncertainty"]);
  CHECK(found->oracle_value - found->sa_value > 1e-4);
}

TEST_CASE("generator") {
  for (SetVariant v : kAllVariants) {
    CAPTURE(to_string(v));
    GeneratorSpec spec;
    spec.variant = v;
    const auto a = random_instance(spec, 17);
    const auto b = random_instance(spec, 17);
    CHECK(instance_to_json(a) == instance_to_json(b));
    CHECK(a.set.variant() == v);
    CHECK(instance_to_json(random_instance(spec, 18)) != instance_to_json(a));
  }
  GeneratorSpec spec;
  spec.next_state_independent = true;
  CHECK(random_instance(spec, 1).mdp.rewards_next_state_independent());
  spec.num_states = 0;
  CHECK_THROWS_AS(random_instance(spec, 1), InvalidInput);
}

TEST_CASE("factor model with state-based rewards is sa-tractable") {
  GeneratorSpec spec;
  spec.variant = SetVariant::kFactorModel;
  spec.next_state_independent = true;
  const auto inst = random_instance(spec, 5);
  const auto r = verify_tractability(inst.mdp, inst.set, inst.oracle_params(), random_policy(3, 2, 5),
                                     TractabilityMode::kSa);
  for (const auto& c : r.comparisons) CHECK(c.pass);
}

TEST_CASE("JSON round trip is bit-identical") {
  for (SetVariant v : kAllVariants) {
    CAPTURE(to_string(v));
    GeneratorSpec spec;
    spec.variant = v;
    const auto inst = random_instance(spec, 23);
    const Json j = instance_to_json(inst);
    const NamedInstance back = parse_instance(j.dump());
    CHECK(back.mdp == inst.mdp);
    CHECK(enumerate_vertices(back.set) == enumerate_vertices(inst.set));
    CHECK(instance_to_json(back) == j);
  }
  for (const auto& name : instance_names()) {
    CAPTURE(name);
    const auto inst = load_instance(name);
    const NamedInstance back = parse_instance(instance_to_json(inst).dump());
    CHECK(back.mdp == inst.mdp);
    CHECK(enumerate_vertices(back.set) == enumerate_vertices(inst.set));
    CHECK(back.expected.size() == inst.expected.size());
    if (inst.params && inst.params->kind() == ParamSet::Kind::kAffine) {
      REQUIRE(back.params.has_value());
      for (std::size_t k = 0; k < inst.params->probe_kernels().size(); ++k) {
        CHECK(back.params->probe_kernels()[k] == inst.params->probe_kernels()[k]);
      }
    }
  }
}

TEST_CASE("parametric instances") {
  const NamedInstance inst = parse_instance(kTinyParametric);
  CHECK(inst.set.variant() == SetVariant::kExplicitFinite);
  CHECK(inst.set.vertex_count() == 2);
  REQUIRE(inst.params.has_value());
  const double half[] = {0.5};
  CHECK(inst.params->kernel_at(half)(0, 0, 0) == doctest::Approx(0.5));
  CHECK(inst.expected.front().provenance == "p = 0");
}

TEST_CASE("affine expressions") {
  const std::vector<Parameter> ps = {{"p", 0, 1}, {"xi", 0, 1}};
  auto e = parse_affine("0.25 + 0.5*p - xi", ps);
  CHECK(e.constant == 0.25);
  CHECK(e.coefficients == std::vector<double>{0.5, -1.0});
  e = parse_affine("-p*2 + 1", ps);
  CHECK(e.constant == 1.0);
  CHECK(e.coefficients[0] == -2.0);
  e = parse_affine("1e-3", ps);
  CHECK(e.constant == 1e-3);
  const double c[] = {0.1, 0.0};
  const auto text = format_affine(0.3, c, ps);
  const auto back = parse_affine(text, ps);
  CHECK(back.constant == 0.3);
  CHECK(back.coefficients[0] == 0.1);
  CHECK_THROWS_AS(parse_affine("q", ps), InvalidInput);
  CHECK_THROWS_AS(parse_affine("1 +", ps), InvalidInput);
  CHECK_THROWS_AS(parse_affine("", ps), InvalidInput);
  CHECK_THROWS_AS(parse_affine("p p", ps), InvalidInput);
}

TEST_CASE("strict parsing") {
  Json j = Json::parse(kTinyParametric);
  j["extra"] = 1;
  CHECK_THROWS_AS(instance_from_json(j), InvalidInput);
  j = Json::parse(kTinyParametric);
  j["uncertainty"]["extra"] = 1;
  CHECK_THROWS_AS(instance_from_json(j), InvalidInput);
  j = Json::parse(kTinyParametric);
  j.erase("gamma");
  CHECK_THROWS_AS(instance_from_json(j), InvalidInput);
  j = Json::parse(kTinyParametric);
  j["mu"] = {0.5, 0.6};
  CHECK_THROWS_AS(instance_from_json(j), InvalidInput);
  j = Json::parse(kTinyParametric);
  j["uncertainty"]["kernel_template"][0][0][0] = "2*p";
  CHECK_THROWS_AS(instance_from_json(j), InvalidInput);
  j = Json::parse(kTinyParametric);
  j["uncertainty"]["variant"] = "unknown";
  CHECK_THROWS_AS(instance_from_json(j), InvalidInput);
  CHECK_THROWS_AS(parse_instance("{not json"), InvalidInput);
}

TEST_CASE("policies") {
  const Policy p = parse_inline_policy("1,0/0.25,0.75");
  CHECK(p(1, 1) == 0.75);
  CHECK(parse_inline_policy(format_inline_policy(p)) == p);
  CHECK(policy_from_json(Json::parse("[[1,0],[0,1]]")) == policy_from_json(Json::parse(R"({"policy": [[1,0],[0,1]]})")));
  CHECK_THROWS_AS(parse_inline_policy("1,0/1"), InvalidInput);
  CHECK_THROWS_AS(parse_inline_policy("0.5,0.6"), InvalidInput);
  CHECK_THROWS_AS(parse_inline_policy("a,b"), InvalidInput);
  CHECK_THROWS_AS(policy_from_json(Json::parse(R"({"pi": [[1]]})")), InvalidInput);
}
