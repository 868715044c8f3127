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

#include "rmdp/instances.hpp"

#include <cmath>
#include <random>
#include <string>

#include "rmdp/error.hpp"
#include "rmdp/json_io.hpp"
#include "rmdp/oracle.hpp"
#include "rmdp/robust_bellman.hpp"

namespace rmdp {

namespace {

std::vector<double> unit(std::size_t n, std::size_t i) {
  std::vector<double> e(n, 0.0);
  e[i] = 1.0;
  return e;
}

// Rewards r[s][a][s'] = state_reward[s].
Tensor3 state_rewards(std::span<const double> state_reward, std::size_t A) {
  const std::size_t S = state_reward.size();
  Tensor3 r(S, A, S);
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) {
      for (std::size_t t = 0; t < S; ++t) r(s, a, t) = state_reward[s];
    }
  }
  return r;
}

Matrix block_from_rows(const std::vector<std::vector<double>>& rows) {
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  return m;
}

std::vector<double> dirichlet(std::size_t n, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> x(n);
  double total = 0.0;
  for (double& v : x) total += v = expo(rng);
  for (double& v : x) v /= total;
  return x;
}

std::mt19937_64 seeded(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

NamedInstance load_finite_square() {
  const double pts[5][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {0.5, 0.5}};
  ExplicitFinite model;
  for (const auto& pq : pts) {
    Tensor3 P(2, 1, 2);
    P(0, 0, 0) = pq[0];
    P(0, 0, 1) = 1.0 - pq[0];
    P(1, 0, 0) = pq[1];
    P(1, 0, 1) = 1.0 - pq[1];
    model.kernels.emplace_back(std::move(P));
  }
  // Reward 1 on every transition into state 0.
  Tensor3 r(2, 1, 2);
  r(0, 0, 0) = 1.0;
  r(1, 0, 0) = 1.0;
  NamedInstance inst{"finite_square",
                     MdpInstance(std::move(r), 0.5, {0.5, 0.5}),
                     UncertaintySet(2, 1, std::move(model)),
                     std::nullopt,
                     "two-state finite set whose hull is the unit square",
                     {}};
  inst.expected = {
      {"ssp.strong_s", 1.0, 0.0, "the square's corners form a product set"},
      {"is_s_rectangular", 1.0, 0.0, "the hull of the five points is the full square"},
  };
  return inst;
}

UncertaintySet finite_square_corners() {
  const auto inst = load_finite_square();
  auto kernels = std::get<ExplicitFinite>(inst.set.model()).kernels;
  kernels.pop_back();
  return UncertaintySet(2, 1, ExplicitFinite{std::move(kernels)});
}

double start_dependent_return(double p, double beta, std::span<const double> mu, double gamma) {
  const double scaled = mu[0] * (gamma / 2.0 * (1.0 - p) + gamma * gamma * p * (1.0 - 2.0 * p) * (2.0 * beta - 1.0)) +
                        (mu[4] - mu[3] + 0.5 * mu[2]) + mu[1] * gamma * (2.0 * beta - 1.0) * (1.0 - 2.0 * p);
  return scaled / (1.0 - gamma);
}

NamedInstance load_start_dependent() {
  constexpr std::size_t S = 5;
  constexpr std::size_t A = 2;
  constexpr double gamma = 0.25;
  // Kernel entries are affine in p: P(p) = base + p * slope.
  Tensor3 base(S, A, S);
  Tensor3 slope(S, A, S);
  for (std::size_t a = 0; a < A; ++a) {
    base(0, a, 2) = 1.0;  // a -> (0, p, 1 - p, 0, 0)
    slope(0, a, 1) = 1.0;
    slope(0, a, 2) = -1.0;
  }
  base(1, 0, 4) = 1.0;  // b, a1 -> (0, 0, 0, p, 1 - p)
  slope(1, 0, 3) = 1.0;
  slope(1, 0, 4) = -1.0;
  base(1, 1, 3) = 1.0;  // b, a2 -> (0, 0, 0, 1 - p, p)
  slope(1, 1, 3) = -1.0;
  slope(1, 1, 4) = 1.0;
  for (std::size_t s = 2; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) base(s, a, s) = 1.0;
  }
  ParamSet params = ParamSet::affine({{"p", 0.0, 1.0}}, base, {slope});
  const double zero = 0.0;
  const double one = 1.0;
  ExplicitFinite ends{{params.kernel_at({&zero, 1}), params.kernel_at({&one, 1})}};

  const double reward[S] = {0.0, 0.0, 0.5, -1.0, 1.0};
  MdpInstance mdp(state_rewards(reward, A), gamma, unit(S, 0));

  // The rewards are reconstructed from the closed-form return; check the
  // two agree before handing the instance out.
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int probe = 0; probe < 20; ++probe) {
    const double p = u01(rng);
    const double beta = u01(rng);
    Matrix pi(S, A);
    for (std::size_t s = 0; s < S; ++s) {
      const double b = s == 1 ? beta : u01(rng);
      pi(s, 0) = b;
      pi(s, 1) = 1.0 - b;
    }
    const auto mu = dirichlet(S, rng);
    const MdpInstance m = mdp.with_initial_dist(mu);
    const double exact = weighted_value(mu, evaluate_exact(m, Policy(pi), params.kernel_at({&p, 1})).values);
    const double closed = start_dependent_return(p, beta, mu, gamma);
    if (std::abs(exact - closed) > 1e-10) {
      throw VerificationError("start-dependent instance disagrees with its closed-form return");
    }
  }

  NamedInstance inst{"start_dependent", std::move(mdp), UncertaintySet(S, A, std::move(ends)),
                     std::move(params), "five-state instance whose optimal stationary policy depends on the start", {}};
  const std::string prov = "closed-form return, gamma = 1/4";
  inst.expected = {
      {"maxmin@mu=0", 7.0 / 96.0, 1e-5, prov},
      {"maxmin.policy[1,0]@mu=0", 0.0, 1e-3, prov},
      {"maxmin.param[p]@mu=0", 0.75, 1e-3, prov},
      {"maxmin@mu=1", 0.0, 1e-6, prov},
      {"maxmin.policy[1,0]@mu=1", 0.5, 1e-3, prov},
      {"worst_case[1,0/0,1/1,0/1,0/1,0]@mu=1", -1.0 / 3.0, 1e-6, prov},
      {"worst_case[1,0/0.5,0.5/1,0/1,0/1,0]@mu=0", 0.0, 1e-6, prov},
      {"worst_case[1,0/0,1/1,0/1,0/1,0]@mu=0", 7.0 / 96.0, 1e-6, prov},
      {"is_s_rectangular", 0.0, 0.0, "p couples the transitions out of a and b"},
      {"ssp.strong_s", 0.0, 0.0, "p couples the transitions out of a and b"},
  };
  return inst;
}

NamedInstance load_six_state_partitioned() {
  constexpr std::size_t S = 6;
  constexpr std::size_t A = 2;
  enum : std::size_t { a, b, c, d, e, f };
  auto to = [&](std::size_t s) { return unit(S, s); };

  // First group: a randomizes between b and c via xi; b, c, d are fixed.
  SRectangular s_part;
  {
    std::vector<Matrix> a_blocks;
    for (double xi : {1.0, 0.0}) {
      std::vector<double> r1(S, 0.0), r2(S, 0.0);
      r1[b] = xi;
      r1[c] = 1.0 - xi;
      r2[b] = 1.0 - xi;
      r2[c] = xi;
      a_blocks.push_back(block_from_rows({r1, r2}));
    }
    s_part.per_state.push_back(std::move(a_blocks));
    s_part.per_state.push_back({block_from_rows({to(e), to(e)})});
    s_part.per_state.push_back({block_from_rows({to(f), to(f)})});
    s_part.per_state.push_back({block_from_rows({to(d), to(d)})});
  }
  // Second group: e and f both follow one factor w(p) = p e_d + (1 - p) e_a.
  FactorModel factor_part{Tensor3(2, A, 1, 1.0), {{to(d), to(a)}}};
  Partitioned model{{a, b, c, d}, std::move(s_part), {e, f}, std::move(factor_part)};

  Tensor3 base(S, A, S);
  Tensor3 d_xi(S, A, S);
  Tensor3 d_p(S, A, S);
  base(a, 0, c) = 1.0;
  d_xi(a, 0, b) = 1.0;
  d_xi(a, 0, c) = -1.0;
  base(a, 1, b) = 1.0;
  d_xi(a, 1, b) = -1.0;
  d_xi(a, 1, c) = 1.0;
  for (std::size_t act = 0; act < A; ++act) {
    base(b, act, e) = 1.0;
    base(c, act, f) = 1.0;
    base(d, act, d) = 1.0;
    for (std::size_t s : {e, f}) {
      base(s, act, a) = 1.0;
      d_p(s, act, a) = -1.0;
      d_p(s, act, d) = 1.0;
    }
  }
  const double reward[S] = {0.0, 0.0, 0.0, 0.0, 1.0, -1.0};
  NamedInstance inst{"six_state_partitioned",
                     MdpInstance(state_rewards(reward, A), 0.5, unit(S, a)),
                     UncertaintySet(S, A, std::move(model)),
                     ParamSet::affine({{"xi", 0.0, 1.0}, {"p", 0.0, 1.0}}, base, {d_xi, d_p}),
                     "six-state partitioned set; p drives the transitions out of e and f",
                     {}};
  inst.expected = {
      {"is_s_rectangular", 0.0, 0.0, "p couples two states"},
      {"ssp.weak_s", 1.0, 0.0, "partitioned sets satisfy the weak property"},
  };
  return inst;
}

NamedInstance load_four_state_coeff_factor() {
  constexpr std::size_t S = 4;
  constexpr std::size_t A = 3;
  enum : std::size_t { a, b, c, d };
  auto to = [&](std::size_t s) { return unit(S, s); };

  CoeffFactor model;
  model.factor_sets = {{to(b)}, {to(c)}, {to(a), to(d)}};
  auto coeff = [](std::vector<std::vector<double>> rows) { return block_from_rows(rows); };
  model.coeff_sets.resize(S);
  for (double xi : {1.0, 0.0}) {
    model.coeff_sets[a].push_back(coeff({{xi, 1.0 - xi, 0.0}, {1.0 - xi, xi, 0.0}, {0.0, 0.0, 1.0}}));
  }
  model.coeff_sets[b].push_back(coeff({{1, 0, 0}, {1, 0, 0}, {1, 0, 0}}));
  model.coeff_sets[c].push_back(coeff({{0, 1, 0}, {0, 1, 0}, {0, 1, 0}}));
  model.coeff_sets[d].push_back(coeff({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));

  // Affine description in (xi, p) with w3 = (p, 0, 0, 1 - p).
  Tensor3 base(S, A, S);
  Tensor3 d_xi(S, A, S);
  Tensor3 d_p(S, A, S);
  base(a, 0, c) = 1.0;
  d_xi(a, 0, b) = 1.0;
  d_xi(a, 0, c) = -1.0;
  base(a, 1, b) = 1.0;
  d_xi(a, 1, b) = -1.0;
  d_xi(a, 1, c) = 1.0;
  for (std::size_t s : {a, d}) {
    base(s, 2, d) = 1.0;
    d_p(s, 2, a) = 1.0;
    d_p(s, 2, d) = -1.0;
  }
  for (std::size_t act = 0; act < A; ++act) {
    base(b, act, b) = 1.0;
    base(c, act, c) = 1.0;
  }
  base(d, 0, b) = 1.0;
  base(d, 1, c) = 1.0;

  const double reward[S] = {0.0, 1.0, 0.0, -1.0};
  NamedInstance inst{"four_state_coeff_factor",
                     MdpInstance(state_rewards(reward, A), 0.5, unit(S, a)),
                     UncertaintySet(S, A, std::move(model)),
                     ParamSet::affine({{"xi", 0.0, 1.0}, {"p", 0.0, 1.0}}, base, {d_xi, d_p}),
                     "four-state set with varying coefficients and a varying shared factor",
                     {}};
  const std::string prov = "hand-derived: a mixes its first two actions";
  inst.expected = {
      {"robust_opt", 0.5, 1e-6, prov},
      {"maxmin", 0.5, 1e-5, prov},
      {"det_gap", 0.5, 1e-6, prov},
      {"ssp.weak_s", 1.0, 0.0, "coefficient-factor sets satisfy the weak property"},
  };
  return inst;
}

namespace {

// Frozen output of search_factor_gap(1, 1): random_instance on a three-state
// factor model, paired with random_policy(3, 2, 1).
constexpr const char* kFactorGapJson = R"json({"expected":[],"gamma":0.5123221900165976,"mu":[0.3287267289609366,0.6431015967615149,0.02817167427754838],"name":"factor_gap","num_actions":2,"num_states":3,"provenance":"random generator, seed 1","rewards":[[[-0.6296225431915039,-0.5687342050039974,0.7972194037709965],[-0.36148879439359405,0.528692533118426,-0.4039452749082024]],[[-0.41595718293475514,0.7410336345787332,-0.5194946630340992],[-0.634744554093376,0.31927796847464984,-0.295038370660895]],[[-0.6954178401210982,0.7450957470795487,-0.2290541601634769],[-0.48592686889430814,-0.36990670600494224,-0.7272874486598783]]],"uncertainty":{"coefficients":[[[0.6521657960028082,0.34783420399719184],[0.6499814816021432,0.35001851839785675]],[[0.40082393551856815,0.5991760644814318],[0.21071307909432432,0.7892869209056756]],[[0.21906162569202142,0.7809383743079785],[0.3961989742373959,0.603801025762604]]],"factor_sets":[[[0.30043771296011296,0.6882398406068634,0.01132244643302363],[0.10784143510156112,0.6018173663118078,0.29034119858663104]],[[0.8037791142544819,0.11190916129457733,0.08431172445094093],[0.16115881713188945,0.24560682848503365,0.5932343543830769]]],"variant":"factor_model"}})json";
constexpr const char* kFactorGapPolicy = "0.82623021648567574,0.17376978351432426/0.19547423903264693,0.80452576096735307/0.34055258734697458,0.65944741265302553";

}  // namespace

NamedInstance load_factor_gap() {
  NamedInstance inst = parse_instance(kFactorGapJson);
  inst.provenance = "seeded factor-model search, seed 1";
  const std::string policy = std::string("[") + kFactorGapPolicy + "]";
  const std::string prov = "exact operator and grid oracle on the frozen instance";
  inst.expected = {
      {"robust_sa" + policy, -0.80196468009881061, 1e-6, prov},
      {"worst_case" + policy, -0.77465103080289199, 1e-5, prov},
  };
  return inst;
}

std::vector<std::string> instance_names() {
  return {"finite_square", "start_dependent", "six_state_partitioned", "four_state_coeff_factor",
          "factor_gap"};
}

NamedInstance load_instance(const std::string& name) {
  if (name == "finite_square") return load_finite_square();
  if (name == "start_dependent") return load_start_dependent();
  if (name == "six_state_partitioned") return load_six_state_partitioned();
  if (name == "four_state_coeff_factor") return load_four_state_coeff_factor();
  if (name == "factor_gap") return load_factor_gap();
  throw InvalidInput("unknown instance: " + name);
}

Policy random_policy(std::size_t num_states, std::size_t num_actions, std::uint64_t seed) {
  auto rng = seeded(seed, 0x9e3779b9u);
  Matrix pi(num_states, num_actions);
  for (std::size_t s = 0; s < num_states; ++s) {
    const auto row = dirichlet(num_actions, rng);
    std::copy(row.begin(), row.end(), pi.row(s).begin());
  }
  return Policy(std::move(pi));
}

NamedInstance random_instance(const GeneratorSpec& spec, std::uint64_t seed) {
  const std::size_t S = spec.num_states;
  const std::size_t A = spec.num_actions;
  const std::size_t k = spec.vertices;
  const std::size_t r = spec.num_factors;
  if (S == 0 || A == 0 || k == 0 || r == 0) throw InvalidInput("generator sizes must be positive");
  if (!(0.0 <= spec.gamma_low && spec.gamma_low <= spec.gamma_high && spec.gamma_high < 1.0)) {
    throw InvalidInput("generator discount range must lie in [0, 1)");
  }
  auto rng = seeded(seed, 1);
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  std::uniform_real_distribution<double> disc(spec.gamma_low, spec.gamma_high);

  Tensor3 rewards(S, A, S);
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t a = 0; a < A; ++a) {
      const double base = entry(rng);
      for (std::size_t t = 0; t < S; ++t) rewards(s, a, t) = spec.next_state_independent ? base : entry(rng);
    }
  }
  const double gamma = disc(rng);
  auto mu = dirichlet(S, rng);

  auto block = [&] {
    Matrix m(A, S);
    for (std::size_t a = 0; a < A; ++a) {
      const auto row = dirichlet(S, rng);
      std::copy(row.begin(), row.end(), m.row(a).begin());
    }
    return m;
  };
  auto factor_sets = [&] {
    std::vector<std::vector<Distribution>> sets(r);
    for (auto& f : sets) {
      for (std::size_t j = 0; j < k; ++j) f.push_back(dirichlet(S, rng));
    }
    return sets;
  };
  auto coefficients = [&](std::size_t rows) {
    Tensor3 u(rows, A, r);
    for (std::size_t s = 0; s < rows; ++s) {
      for (std::size_t a = 0; a < A; ++a) {
        const auto row = dirichlet(r, rng);
        std::copy(row.begin(), row.end(), u.row(s, a).begin());
      }
    }
    return u;
  };

  UncertaintySet::Model model;
  switch (spec.variant) {
    case SetVariant::kExplicitFinite: {
      ExplicitFinite m;
      for (std::size_t j = 0; j < k; ++j) {
        Tensor3 P(S, A, S);
        for (std::size_t s = 0; s < S; ++s) {
          const Matrix b = block();
          std::copy(b.flat().begin(), b.flat().end(), P.slab(s).begin());
        }
        m.kernels.emplace_back(std::move(P));
      }
      model = std::move(m);
      break;
    }
    case SetVariant::kSRectangular: {
      SRectangular m;
      m.per_state.resize(S);
      for (auto& list : m.per_state) {
        for (std::size_t j = 0; j < k; ++j) list.push_back(block());
      }
      model = std::move(m);
      break;
    }
    case SetVariant::kSaRectangular: {
      SaRectangular m;
      m.per_state_action.assign(S, std::vector<std::vector<Distribution>>(A));
      for (auto& per_a : m.per_state_action) {
        for (auto& list : per_a) {
          for (std::size_t j = 0; j < k; ++j) list.push_back(dirichlet(S, rng));
        }
      }
      model = std::move(m);
      break;
    }
    case SetVariant::kFactorModel: {
      auto sets = factor_sets();
      model = FactorModel{coefficients(S), std::move(sets)};
      break;
    }
    case SetVariant::kPartitioned: {
      Partitioned m;
      const std::size_t n1 = (S + 1) / 2;
      for (std::size_t s = 0; s < S; ++s) (s < n1 ? m.s1_states : m.s2_states).push_back(s);
      m.s_part.per_state.resize(n1);
      for (auto& list : m.s_part.per_state) {
        for (std::size_t j = 0; j < k; ++j) list.push_back(block());
      }
      auto sets = factor_sets();
      m.factor_part = FactorModel{coefficients(S - n1), std::move(sets)};
      model = std::move(m);
      break;
    }
    case SetVariant::kCoeffFactor: {
      CoeffFactor m;
      m.factor_sets = factor_sets();
      m.coeff_sets.resize(S);
      for (auto& list : m.coeff_sets) {
        for (std::size_t j = 0; j < k; ++j) {
          Matrix u(A, r);
          for (std::size_t a = 0; a < A; ++a) {
            const auto row = dirichlet(r, rng);
            std::copy(row.begin(), row.end(), u.row(a).begin());
          }
          list.push_back(std::move(u));
        }
      }
      model = std::move(m);
      break;
    }
    case SetVariant::kSaCoeffFactor: {
      SaCoeffFactor m;
      m.factor_sets = factor_sets();
      m.coeff_sets.assign(S, std::vector<std::vector<Distribution>>(A));
      for (auto& per_a : m.coeff_sets) {
        for (auto& list : per_a) {
          for (std::size_t j = 0; j < k; ++j) list.push_back(dirichlet(r, rng));
        }
      }
      model = std::move(m);
      break;
    }
  }
  return NamedInstance{"random_" + std::string(to_string(spec.variant)) + "_" + std::to_string(seed),
                       MdpInstance(std::move(rewards), gamma, std::move(mu)),
                       UncertaintySet(S, A, std::move(model)),
                       std::nullopt,
                       "random generator, seed " + std::to_string(seed),
                       {}};
}

std::optional<GapSearchResult> search_factor_gap(std::uint64_t seed, std::size_t max_attempts,
                                                 double threshold) {
  GeneratorSpec spec;
  spec.num_states = 3;
  spec.num_actions = 2;
  spec.variant = SetVariant::kFactorModel;
  spec.vertices = 2;
  spec.num_factors = 2;
  spec.next_state_independent = false;
  for (std::size_t i = 0; i < max_attempts; ++i) {
    const std::uint64_t s = seed + i;
    NamedInstance inst = random_instance(spec, s);
    Policy pi = random_policy(spec.num_states, spec.num_actions, s);
    const auto fp = fixed_point(RobustOperator::kPolicySa, inst.mdp, inst.set, &pi);
    const double sa_value = weighted_value(inst.mdp.initial_dist(), fp.value.values);
    const double oracle = worst_case_oracle(inst.mdp, inst.oracle_params(), pi).value;
    if (oracle - sa_value > threshold) {
      return GapSearchResult{std::move(inst), std::move(pi), sa_value, oracle, s, i + 1};
    }
  }
  return std::nullopt;
}

}  // namespace rmdp
