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

// Acceptance suite. Prints one PASS/FAIL line per criterion with its
// runtime and exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "rmdp/commands.hpp"
#include "rmdp/instances.hpp"
#include "rmdp/oracle.hpp"
#include "rmdp/robust_bellman.hpp"
#include "rmdp/ssp.hpp"
#include "test_support.hpp"

using namespace rmdp;
using namespace rmdp::testing;

namespace {

constexpr double kSevenNinetySixths = 7.0 / 96.0;

const SetVariant kAllVariants[] = {SetVariant::kExplicitFinite, SetVariant::kSRectangular,
                                   SetVariant::kSaRectangular,  SetVariant::kFactorModel,
                                   SetVariant::kPartitioned,    SetVariant::kCoeffFactor,
                                   SetVariant::kSaCoeffFactor};

struct Outcome {
  bool pass = true;
  std::string note;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      note = what;
    }
  }
};

std::string fmt(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// Start-dependent instance with the whole mass on one state.
NamedInstance start_dependent_at(std::size_t state) {
  NamedInstance inst = load_start_dependent();
  inst.mdp = inst.mdp.with_initial_dist(unit(5, state));
  return inst;
}

// Policy that plays the first action everywhere except at b, where it
// plays the first action with probability beta.
Policy beta_policy(double beta) {
  Matrix m(5, 2);
  for (std::size_t s = 0; s < 5; ++s) m(s, 0) = 1.0;
  m(1, 0) = beta;
  m(1, 1) = 1.0 - beta;
  return Policy(std::move(m));
}

// Worst case over p of the closed-form return, on a fine grid.
double closed_form_worst(double beta, std::span<const double> mu) {
  double lo = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 100000; ++k) lo = std::min(lo, start_dependent_return(k / 100000.0, beta, mu, 0.25));
  return lo;
}

Outcome criterion1() {
  Outcome out;
  const RunReport r = cmd_solve(start_dependent_at(0), SolveMethod::kOracle, {});
  const ResultRow& row = r.results.front();
  const double beta = row.detail["policy"][1][0].get<double>();
  const double p = row.detail["argmin_params"]["p"].get<double>();
  // Closed form at the reported point as an independent check.
  const std::vector<double> mu = unit(5, 0);
  out.require(std::abs(row.value - kSevenNinetySixths) <= 1e-5, "max-min value " + fmt(row.value));
  out.require(std::abs(closed_form_worst(0.0, mu) - kSevenNinetySixths) <= 1e-9, "closed form disagrees");
  out.require(std::abs(beta) <= 1e-3, "maximizing beta " + fmt(beta));
  out.require(std::abs(p - 0.75) <= 1e-3, "worst-case p " + fmt(p));
  if (out.pass) out.note = "value " + fmt(row.value) + ", beta " + fmt(beta) + ", p " + fmt(p);
  return out;
}

Outcome criterion2() {
  Outcome out;
  const RunReport r = cmd_solve(start_dependent_at(1), SolveMethod::kOracle, {});
  const ResultRow& row = r.results.front();
  const double beta = row.detail["policy"][1][0].get<double>();
  out.require(std::abs(row.value) <= 1e-6, "max-min value " + fmt(row.value));
  out.require(std::abs(beta - 0.5) <= 1e-3, "maximizing beta " + fmt(beta));
  if (out.pass) out.note = "value " + fmt(row.value) + ", beta " + fmt(beta);
  return out;
}

Outcome criterion3() {
  Outcome out;
  const auto at_a = start_dependent_at(0);
  const auto at_b = start_dependent_at(1);
  const double gamma = at_a.mdp.discount();
  const double beta0_at_b = worst_case_oracle(at_b.mdp, *at_b.params, beta_policy(0.0)).value;
  const double half_at_a = worst_case_oracle(at_a.mdp, *at_a.params, beta_policy(0.5)).value;
  out.require(beta0_at_b <= -0.1 * gamma, "beta = 0 at b: " + fmt(beta0_at_b));
  out.require(half_at_a <= 1e-6 && half_at_a < kSevenNinetySixths - 1e-3, "beta = 1/2 at a: " + fmt(half_at_a));
  // Closed-form cross-check.
  out.require(std::abs(beta0_at_b - closed_form_worst(0.0, unit(5, 1))) <= 1e-6, "closed form at b disagrees");
  out.require(std::abs(half_at_a - closed_form_worst(0.5, unit(5, 0))) <= 1e-6, "closed form at a disagrees");
  if (out.pass) out.note = "beta=0 at b " + fmt(beta0_at_b) + ", beta=1/2 at a " + fmt(half_at_a);
  return out;
}

Outcome criterion4() {
  Outcome out;
  constexpr double kSlack = 2e-8;
  std::size_t kernels = 0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    GeneratorSpec spec;
    spec.variant = kAllVariants[i % 7];
    spec.num_states = 2 + i % 3;
    spec.num_actions = 2;
    const auto inst = random_instance(spec, 1000 + i);
    const Policy pi = random_policy(spec.num_states, spec.num_actions, 1000 + i);
    const auto u = fixed_point(RobustOperator::kPolicyS, inst.mdp, inst.set, &pi).value.values;
    const auto uhat = fixed_point(RobustOperator::kPolicySa, inst.mdp, inst.set, &pi).value.values;
    for (std::size_t s = 0; s < u.size(); ++s) {
      out.require(uhat[s] <= u[s] + kSlack, "u-hat above u on instance " + std::to_string(i));
    }
    for (const auto& k : enumerate_vertices(inst.set)) {
      const auto v = iterate_value(inst.mdp, pi, k.probs());
      ++kernels;
      for (std::size_t s = 0; s < u.size(); ++s) {
        out.require(u[s] <= v[s] + kSlack, "u above v on instance " + std::to_string(i));
      }
    }
  }
  if (out.pass) out.note = "200 instances, " + std::to_string(kernels) + " kernels";
  return out;
}

Outcome criterion5() {
  Outcome out;
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    GeneratorSpec spec;
    spec.variant = SetVariant::kFactorModel;
    spec.next_state_independent = true;
    const auto inst = random_instance(spec, 2000 + i);
    const Policy pi = random_policy(3, 2, 2000 + i);
    const auto uhat = fixed_point(RobustOperator::kPolicySa, inst.mdp, inst.set, &pi).value.values;
    const double fast = mu_dot(inst.mdp, uhat);
    const double oracle = worst_case_oracle(inst.mdp, ParamSet::convex(inst.set), pi).value;
    worst = std::max(worst, std::abs(fast - oracle));
  }
  out.require(worst <= 1e-4, "largest difference " + fmt(worst));
  if (out.pass) out.note = "largest |difference| " + fmt(worst);
  return out;
}

// Minimum over a grid of factor weights for a two-vertex, two-factor model,
// evaluated by successive approximation.
double factor_grid_min(const NamedInstance& inst, const Policy& pi, int points) {
  const auto& m = std::get<FactorModel>(inst.set.model());
  const std::size_t S = inst.mdp.num_states();
  const std::size_t A = inst.mdp.num_actions();
  double lo = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= points; ++i) {
    for (int j = 0; j <= points; ++j) {
      const double lam[2] = {static_cast<double>(i) / points, static_cast<double>(j) / points};
      Tensor3 P(S, A, S);
      for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t a = 0; a < A; ++a) {
          for (std::size_t f = 0; f < 2; ++f) {
            for (std::size_t t = 0; t < S; ++t) {
              const double w = lam[f] * m.factor_sets[f][0][t] + (1 - lam[f]) * m.factor_sets[f][1][t];
              P(s, a, t) += m.coefficients(s, a, f) * w;
            }
          }
        }
      }
      lo = std::min(lo, mu_dot(inst.mdp, iterate_value(inst.mdp, pi, P)));
    }
  }
  return lo;
}

Outcome criterion6() {
  Outcome out;
  const auto found = search_factor_gap(1, 500, 1e-4);
  out.require(found.has_value(), "no instance found in 500 attempts");
  if (!found) return out;
  const double gap = found->oracle_value - found->sa_value;
  out.require(gap > 1e-4, "gap " + fmt(gap));
  // Independent check: a coarse grid can only overestimate the minimum, so
  // it must sit at or above the oracle and above the sa value.
  const double grid = factor_grid_min(found->instance, found->policy, 100);
  out.require(grid >= found->oracle_value - 1e-9, "grid below oracle: " + fmt(grid));
  out.require(grid - found->oracle_value <= 1e-3, "grid far above oracle: " + fmt(grid));
  const double uhat = mu_dot(found->instance.mdp,
                             fixed_point(RobustOperator::kPolicySa, found->instance.mdp, found->instance.set,
                                         &found->policy, {1e-12, 1'000'000})
                                 .value.values);
  out.require(std::abs(uhat - found->sa_value) <= 1e-7, "sa value not reproducible");
  if (out.pass) {
    out.note = "seed " + std::to_string(found->seed) + ", oracle " + fmt(found->oracle_value) + ", sa " +
               fmt(found->sa_value) + ", gap " + fmt(gap);
  }
  return out;
}

// Coordinate values of an objective at one kernel.
std::vector<double> coordinate_values(const TransitionKernel& k, SspMode mode, const ObjectiveTensor& obj) {
  const std::size_t S = k.num_states();
  const std::size_t A = k.num_actions();
  std::vector<double> out;
  const bool pairs = mode == SspMode::kStrongSa || mode == SspMode::kWeakSa;
  for (std::size_t s = 0; s < S; ++s) {
    double state_total = 0.0;
    for (std::size_t a = 0; a < A; ++a) {
      double val = 0.0;
      for (std::size_t t = 0; t < S; ++t) {
        double coef = 0.0;
        if (const auto* V = std::get_if<Tensor3>(&obj)) coef = (*V)(s, a, t);
        if (const auto* v = std::get_if<ValueObjective>(&obj)) coef = v->v[t];
        if (const auto* pv = std::get_if<PolicyValueObjective>(&obj)) coef = pv->policy(s, a) * pv->v[t];
        val += k(s, a, t) * coef;
      }
      if (pairs) {
        out.push_back(val);
      } else {
        state_total += val;
      }
    }
    if (!pairs) out.push_back(state_total);
  }
  return out;
}

Outcome criterion7() {
  Outcome out;
  const std::pair<SetVariant, SspMode> pairs[] = {
      {SetVariant::kSRectangular, SspMode::kStrongS}, {SetVariant::kSaRectangular, SspMode::kStrongSa},
      {SetVariant::kFactorModel, SspMode::kWeakS},    {SetVariant::kPartitioned, SspMode::kWeakS},
      {SetVariant::kCoeffFactor, SspMode::kWeakS},    {SetVariant::kFactorModel, SspMode::kWeakSa},
      {SetVariant::kSaCoeffFactor, SspMode::kWeakSa}};
  std::size_t checked = 0;
  for (const auto& [variant, mode] : pairs) {
    for (std::uint64_t inst_seed = 0; inst_seed < 5; ++inst_seed) {
      GeneratorSpec spec;
      spec.variant = variant;
      const auto inst = random_instance(spec, 3000 + inst_seed);
      const SspChecker checker(inst.set);
      const auto vertices = enumerate_vertices(inst.set);
      for (std::size_t i = 0; i < 100; ++i) {
        const auto obj = sample_objective(3, 2, mode, 77 + inst_seed, i);
        const SspVerdict v = checker.check(mode, obj);
        ++checked;
        const std::string where = std::string(to_string(variant)) + "/" + std::string(to_string(mode));
        out.require(v.holds && v.certificate.has_value(), where + " failed");
        if (!v.holds || !v.certificate) continue;
        // The certificate must attain the brute-force minimum of every coordinate.
        std::vector<double> lo = coordinate_values(vertices.front(), mode, obj);
        for (const auto& k : vertices) {
          const auto vals = coordinate_values(k, mode, obj);
          for (std::size_t c = 0; c < lo.size(); ++c) lo[c] = std::min(lo[c], vals[c]);
        }
        const auto cert = coordinate_values(*v.certificate, mode, obj);
        for (std::size_t c = 0; c < lo.size(); ++c) {
          out.require(cert[c] <= lo[c] + 1e-9, where + " certificate is not a minimizer");
        }
      }
    }
  }
  // Analytic witness: V[s][a][s'] = pi[s][a] v[s'] with pi the first action
  // and v = (0, 0, 1, 1, 0).
  const auto sd = load_start_dependent();
  Tensor3 V(5, 2, 5);
  for (std::size_t s = 0; s < 5; ++s) {
    V(s, 0, 2) = 1.0;
    V(s, 0, 3) = 1.0;
  }
  const SspVerdict w = check_strong_ssp_s(sd.set, V);
  out.require(!w.holds, "start-dependent set satisfies the strong property at the witness");
  // Independent: the state-a minimizer is p = 1 and the state-b minimizer
  // p = 0, so no single kernel attains both.
  const double p1[] = {1.0};
  const double p0[] = {0.0};
  const auto K1 = sd.params->kernel_at(p1);
  const auto K0 = sd.params->kernel_at(p0);
  const auto at1 = coordinate_values(K1, SspMode::kStrongS, V);
  const auto at0 = coordinate_values(K0, SspMode::kStrongS, V);
  out.require(at1[0] < at0[0] && at0[1] < at1[1], "analytic minimizers differ from expectation");
  if (out.pass) out.note = std::to_string(checked) + " certificates verified; witness rejects strong_s";
  return out;
}

Outcome criterion8() {
  Outcome out;
  std::mt19937_64 rng(8080);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::size_t counts[4] = {0, 0, 0, 0};
  for (std::uint64_t i = 0; i < 500; ++i) {
    GeneratorSpec spec;
    spec.variant = kAllVariants[i % 7];
    const auto inst = random_instance(spec, 4000 + i);
    const std::size_t S = 3;
    const std::size_t A = 2;
    Tensor3 V(S, A, S);
    for (auto& x : V.flat()) x = u(rng);
    std::vector<double> v(S);
    for (auto& x : v) x = u(rng);
    const Policy pi = random_policy_matrix(S, A, rng);
    Tensor3 Vpi(S, A, S);
    Tensor3 Vv(S, A, S);
    for (std::size_t s = 0; s < S; ++s) {
      for (std::size_t a = 0; a < A; ++a) {
        for (std::size_t t = 0; t < S; ++t) {
          Vpi(s, a, t) = pi(s, a) * v[t];
          Vv(s, a, t) = v[t];
        }
      }
    }
    const SspChecker c(inst.set);
    const bool strong_sa = c.check(SspMode::kStrongSa, V).holds;
    const bool strong_s = c.check(SspMode::kStrongS, V).holds;
    const bool strong_s_lift = c.check(SspMode::kStrongS, Vpi).holds;
    const bool strong_sa_lift = c.check(SspMode::kStrongSa, Vv).holds;
    const bool weak_s = c.check(SspMode::kWeakS, PolicyValueObjective{pi, v}).holds;
    const bool weak_sa = c.check(SspMode::kWeakSa, ValueObjective{v}).holds;
    const std::string at = " at sample " + std::to_string(i);
    out.require(!strong_sa || strong_s, "strong_sa without strong_s" + at);
    out.require(!strong_s_lift || weak_s, "strong_s without weak_s" + at);
    out.require(!strong_sa_lift || weak_sa, "strong_sa without weak_sa" + at);
    out.require(!weak_sa || weak_s, "weak_sa without weak_s" + at);
    counts[0] += strong_sa;
    counts[1] += strong_s;
    counts[2] += weak_sa;
    counts[3] += weak_s;
  }
  if (out.pass) {
    out.note = "holds: strong_sa " + std::to_string(counts[0]) + ", strong_s " + std::to_string(counts[1]) +
               ", weak_sa " + std::to_string(counts[2]) + ", weak_s " + std::to_string(counts[3]) + " of 500";
  }
  return out;
}

Outcome criterion9() {
  Outcome out;
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    GeneratorSpec spec;
    spec.variant = SetVariant::kFactorModel;
    spec.next_state_independent = true;
    const auto inst = random_instance(spec, 5000 + i);
    const ParamSet params = ParamSet::convex(inst.set);
    const std::size_t coords = action_relevant_states(inst.mdp, params).size() * (inst.mdp.num_actions() - 1);
    const DualityReport d = duality_gap(inst.mdp, params, default_policy_grid(coords));
    worst = std::max(worst, std::abs(d.gap));
  }
  out.require(worst <= 1e-4, "largest gap " + fmt(worst));
  if (out.pass) out.note = "largest |minmax - maxmin| " + fmt(worst);
  return out;
}

Outcome criterion10() {
  Outcome out;
  std::size_t checks = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    GeneratorSpec spec;
    spec.variant = kAllVariants[i % 7];
    const auto inst = random_instance(spec, 6000 + i);
    const Policy pi = random_policy(3, 2, 6000 + i);
    const auto u = fixed_point(RobustOperator::kPolicyS, inst.mdp, inst.set, &pi, {1e-13, 1'000'000}).value.values;
    const double gamma = inst.mdp.discount();
    for (std::size_t H : {1, 5, 20}) {
      const auto vH = nonstationary_adversary_dp(inst.mdp, inst.set, pi, H).values;
      const double bound = std::pow(gamma, static_cast<double>(H)) * inst.mdp.max_abs_reward() / (1.0 - gamma);
      out.require(sup_norm_diff(vH, u) <= bound, "bound violated on instance " + std::to_string(i));
      ++checks;
    }
  }
  if (out.pass) out.note = std::to_string(checks) + " horizon checks";
  return out;
}

Outcome criterion11() {
  Outcome out;
  // Residuals of full fixed-point runs.
  std::size_t reports = 0;
  for (std::uint64_t i = 0; i < 35; ++i) {
    GeneratorSpec spec;
    spec.variant = kAllVariants[i % 7];
    const auto inst = random_instance(spec, 7000 + i);
    const Policy pi = random_policy(3, 2, 7000 + i);
    for (auto op : {RobustOperator::kPolicyS, RobustOperator::kPolicySa, RobustOperator::kOptimal}) {
      const FixedPointReport r = fixed_point(op, inst.mdp, inst.set, &pi);
      out.require(r.final_residual <= r.tolerance_target, "residual above target");
      ++reports;
    }
  }
  // Contraction and monotonicity on random pairs.
  std::mt19937_64 rng(1111);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::uniform_real_distribution<double> shift(0.0, 1.0);
  for (std::uint64_t i = 0; i < 1000; ++i) {
    GeneratorSpec spec;
    spec.variant = kAllVariants[i % 7];
    const auto inst = random_instance(spec, 8000 + i % 50);
    const Policy pi = random_policy_matrix(3, 2, rng);
    std::vector<double> x(3), y(3), z(3);
    for (std::size_t s = 0; s < 3; ++s) {
      x[s] = u(rng);
      y[s] = u(rng);
      z[s] = x[s] + shift(rng);
    }
    const double gamma = inst.mdp.discount();
    const double dist = sup_norm_diff(x, y);
    const std::vector<std::function<std::vector<double>(const std::vector<double>&)>> ops = {
        [&](const std::vector<double>& v) { return apply_T_pi(inst.mdp, inst.set, pi, v); },
        [&](const std::vector<double>& v) { return apply_T_hat_pi(inst.mdp, inst.set, pi, v); },
        [&](const std::vector<double>& v) { return apply_T_opt(inst.mdp, inst.set, v).values; }};
    for (const auto& T : ops) {
      out.require(sup_norm_diff(T(x), T(y)) <= gamma * dist + 1e-12, "contraction violated");
      const auto tx = T(x);
      const auto tz = T(z);
      for (std::size_t s = 0; s < 3; ++s) out.require(tx[s] <= tz[s] + 1e-12, "monotonicity violated");
    }
  }
  if (out.pass) out.note = std::to_string(reports) + " reports, 1000 pairs x 3 operators";
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    double limit_seconds;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {1, "max-min from the first start state", 10, criterion1},
      {2, "max-min from the second start state", 5, criterion2},
      {3, "disjoint optimal policies", 5, criterion3},
      {4, "ordering of robust values", 60, criterion4},
      {5, "weak tractability of factor models", 120, criterion5},
      {6, "gap without state-based rewards", 300, criterion6},
      {7, "structural SSP suite", 60, criterion7},
      {8, "SSP implication chain", 60, criterion8},
      {9, "duality gap", 300, criterion9},
      {10, "non-stationary adversary bound", 60, criterion10},
      {11, "fixed-point quality", 30, criterion11},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.note = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (out.pass && secs > c.limit_seconds) {
      out.pass = false;
      out.note = "runtime " + fmt(secs) + " s exceeds " + fmt(c.limit_seconds) + " s";
    }
    failures += !out.pass;
    std::printf("criterion %2d: %s  %-40s %8.2f s  %s\n", c.id, out.pass ? "PASS" : "FAIL", c.title, secs,
                out.note.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
