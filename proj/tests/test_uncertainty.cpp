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

#include <limits>
#include <random>

#include "rmdp/error.hpp"
#include "rmdp/instances.hpp"
#include "rmdp/uncertainty.hpp"
#include "test_support.hpp"

using namespace rmdp;
using namespace rmdp::testing;

namespace {

const SetVariant kAllVariants[] = {SetVariant::kExplicitFinite, SetVariant::kSRectangular,
                                   SetVariant::kSaRectangular,  SetVariant::kFactorModel,
                                   SetVariant::kPartitioned,    SetVariant::kCoeffFactor,
                                   SetVariant::kSaCoeffFactor};

Matrix block(std::vector<std::vector<double>> rows) {
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  return m;
}

}  // namespace

TEST_CASE("enumeration order: first component slowest") {
  SRectangular m;
  m.per_state = {{block({{1, 0}}), block({{0, 1}})}, {block({{1, 0}}), block({{0.5, 0.5}}), block({{0, 1}})}};
  const UncertaintySet set(2, 1, m);
  CHECK(set.vertex_count() == 6);
  const auto v = enumerate_vertices(set);
  REQUIRE(v.size() == 6);
  CHECK(v[0](0, 0, 0) == 1.0);
  CHECK(v[0](1, 0, 0) == 1.0);
  CHECK(v[1](0, 0, 0) == 1.0);
  CHECK(v[1](1, 0, 0) == 0.5);
  CHECK(v[3](0, 0, 1) == 1.0);
  CHECK(v[5](1, 0, 1) == 1.0);
}

TEST_CASE("constructive minimizers agree with vertex enumeration") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (SetVariant variant : kAllVariants) {
    CAPTURE(to_string(variant));
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      GeneratorSpec spec;
      spec.variant = variant;
      spec.num_states = 3;
      spec.num_actions = 2;
      const NamedInstance inst = random_instance(spec, seed);
      const auto vertices = enumerate_vertices(inst.set);
      CHECK(vertices.size() == inst.set.vertex_count());
      for (std::size_t s = 0; s < 3; ++s) {
        Matrix M(2, 3);
        for (auto& x : M.flat()) x = u(rng);
        double brute = std::numeric_limits<double>::infinity();
        for (const auto& k : vertices) brute = std::min(brute, dot(k.block(s), M.flat()));
        CHECK(min_value_s(inst.set, s, M) == doctest::Approx(brute).epsilon(1e-12));
        const LinearMin lm = min_linear_s(inst.set, s, M);
        REQUIRE(lm.enumerated);
        REQUIRE_FALSE(lm.argmin.empty());
        for (auto i : lm.argmin) CHECK(dot(vertices[i].block(s), M.flat()) <= brute + kArgminTieTol);
        for (std::size_t a = 0; a < 2; ++a) {
          const std::vector<double> w = {u(rng), u(rng), u(rng)};
          double brute_sa = std::numeric_limits<double>::infinity();
          for (const auto& k : vertices) brute_sa = std::min(brute_sa, dot(k.row(s, a), w));
          CHECK(min_value_sa(inst.set, s, a, w) == doctest::Approx(brute_sa).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("marginals are the distinct per-state blocks") {
  GeneratorSpec spec;
  spec.variant = SetVariant::kSRectangular;
  spec.vertices = 3;
  const NamedInstance inst = random_instance(spec, 4);
  for (std::size_t s = 0; s < 3; ++s) CHECK(marginal_s(inst.set, s).size() == 3);
  CHECK(marginal_sa(inst.set, 0, 0).size() == 3);
}

TEST_CASE("rectangularity of reference sets") {
  CHECK(is_s_rectangular(load_finite_square().set));
  CHECK(is_s_rectangular(finite_square_corners()));
  CHECK(is_sa_rectangular(load_finite_square().set));
  CHECK_FALSE(is_s_rectangular(load_start_dependent().set));
  GeneratorSpec spec;
  spec.variant = SetVariant::kSaRectangular;
  const auto sa = random_instance(spec, 1);
  CHECK(is_sa_rectangular(sa.set));
  CHECK(is_s_rectangular(sa.set));
  spec.variant = SetVariant::kFactorModel;
  CHECK_FALSE(is_sa_rectangular(random_instance(spec, 1).set));
}

TEST_CASE("extensions contain the set") {
  const auto inst = load_start_dependent();
  const UncertaintySet ext = s_extension(inst.set);
  CHECK(ext.variant() == SetVariant::kSRectangular);
  for (const auto& k : enumerate_vertices(inst.set)) CHECK(hull_contains(ext, k));
  CHECK(ext.vertex_count() > inst.set.vertex_count());
  const UncertaintySet sa = sa_extension(inst.set);
  CHECK(sa.variant() == SetVariant::kSaRectangular);
  for (const auto& k : enumerate_vertices(ext)) CHECK(hull_contains(sa, k));
}

TEST_CASE("singleton set") {
  std::mt19937_64 rng(2);
  const TransitionKernel P(random_kernel(3, 2, rng));
  const auto set = UncertaintySet::singleton(P);
  CHECK(set.vertex_count() == 1);
  CHECK(enumerate_vertices(set).front() == P);
  CHECK(is_s_rectangular(set));
  CHECK(is_sa_rectangular(set));
}

TEST_CASE("invalid sets are rejected") {
  SRectangular bad;
  bad.per_state = {{block({{0.6, 0.6}})}, {block({{1, 0}})}};
  CHECK_THROWS_AS(UncertaintySet(2, 1, bad), InvalidInput);
  SRectangular short_list;
  short_list.per_state = {{block({{1, 0}})}};
  CHECK_THROWS_AS(UncertaintySet(2, 1, short_list), InvalidInput);
  FactorModel f;
  f.coefficients = Tensor3(2, 1, 1, 0.5);
  f.factor_sets = {{{1, 0}}};
  CHECK_THROWS_AS(UncertaintySet(2, 1, f), InvalidInput);
  CHECK_THROWS_AS(UncertaintySet(2, 1, ExplicitFinite{}), InvalidInput);
}

TEST_CASE("vertex budget") {
  SRectangular big;
  for (int s = 0; s < 70; ++s) {
    std::vector<double> a(70, 0.0);
    std::vector<double> b(70, 0.0);
    a[0] = 1.0;
    b[1] = 1.0;
    big.per_state.push_back({block({a}), block({b})});
  }
  const UncertaintySet set(70, 1, big);
  CHECK(set.vertex_count() == std::numeric_limits<std::size_t>::max());
  CHECK_THROWS_AS(enumerate_vertices(set), BudgetExceeded);
  // Constructive minimization still works.
  Matrix M(1, 70);
  M(0, 1) = -1.0;
  CHECK(min_value_s(set, 3, M) == doctest::Approx(-1.0));
}

TEST_CASE("variant names round trip") {
  for (SetVariant v : kAllVariants) CHECK(parse_set_variant(to_string(v)) == v);
  CHECK_FALSE(parse_set_variant("nope").has_value());
}
